"""
ceprecode

Constant-envelope precoding with constructive interference for multi-user
MISO downlink, solved by Riemannian conjugate gradient on an oblique
manifold, together with the interference-reduction and cross-entropy
baselines and a Monte-Carlo experiment harness.
"""

__version__ = "1.0.0"
__author__ = "ceprecode developers"
