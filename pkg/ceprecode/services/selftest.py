"""
In-process invariant suite behind ``ceprecode selftest``.

Checks the manifold geometry, the objective identities and the gradient on
random instances without needing pytest. Each check returns a failure
description or None.
"""

import logging
import math
from typing import Callable, List, Optional

import numpy as np

from .. import config
from ..models.data_models import SymbolVector
from .manifold import oblique_random, retract, tangent_project
from .objective import euclidean_gradient, eval_g, exact_objective, rotate_channel, sector_margins, smoothed_objective
from .simulator import detect_psk, draw_symbols, generate_channel
from .solver import flop_model

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator], Optional[str]]


def _random_instance(rng: np.random.Generator, max_n: int = 16, max_m: int = 6):
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(m, max(m, max_n) + 1))
    order = int(rng.choice([3, 4, 8, 16]))
    amplitude = float(rng.uniform(0.5, 2.0))
    power_budget = float(rng.uniform(0.5, 4.0))
    H = generate_channel(n, m, rng)
    s = draw_symbols(m, order, amplitude, rng)
    return H, s, power_budget


def check_retraction_membership(rng: np.random.Generator) -> Optional[str]:
    X = oblique_random(int(rng.integers(1, 65)), rng)
    V = tangent_project(X, rng.standard_normal(X.data.shape))
    Y = retract(X, V, float(rng.uniform(-5, 5)))
    deviation = np.max(np.abs(np.linalg.norm(Y.data, axis=0) - 1.0))
    if deviation >= config.MEMBERSHIP_TOL:
        return f"retracted column norm off by {deviation:.3e}"
    return None


def check_projection(rng: np.random.Generator) -> Optional[str]:
    X = oblique_random(int(rng.integers(1, 65)), rng)
    G = rng.standard_normal(X.data.shape) * 10 ** rng.uniform(-3, 3)
    U = tangent_project(X, G)
    scale = max(1.0, float(np.max(np.abs(G))))
    radial = np.max(np.abs(np.einsum("ij,ij->j", X.data, U.data)))
    if radial >= config.TANGENCY_TOL * scale:
        return f"projection leaves radial part {radial:.3e}"
    again = tangent_project(X, U)
    if not np.allclose(again.data, U.data, atol=1e-12 * scale):
        return "projection is not idempotent"
    if not np.array_equal(retract(X, U, 0.0).data, X.data):
        return "retraction with zero step moved the point"
    return None


def check_sector_identity(rng: np.random.Generator) -> Optional[str]:
    H, s, power_budget = _random_instance(rng)
    ch = rotate_channel(H, s, power_budget)
    X = oblique_random(H.n_antennas, rng, power_budget)
    g = eval_g(X, ch)
    pairs = np.maximum(g[0::2], g[1::2])
    margins = sector_margins(X.to_precoder(), H, s)
    error = np.max(np.abs(margins - (pairs + s.amplitude * s.beta)))
    if error > 1e-10 * max(1.0, float(np.max(np.abs(margins)))):
        return f"sector identity off by {error:.3e}"
    return None


def check_sandwich(rng: np.random.Generator) -> Optional[str]:
    H, s, power_budget = _random_instance(rng)
    ch = rotate_channel(H, s, power_budget)
    X = oblique_random(H.n_antennas, rng, power_budget)
    epsilon = float(10 ** rng.uniform(-3, 1))
    exact = exact_objective(X, ch).exact_value
    gap = smoothed_objective(X, ch, epsilon) - exact
    slack = 1e-12 * max(1.0, abs(exact))
    if not -slack <= gap <= epsilon * math.log(2 * H.n_users) + slack:
        return f"log-sum-exp gap {gap:.3e} outside [0, {epsilon * math.log(2 * H.n_users):.3e}]"
    return None


def check_gradient(rng: np.random.Generator) -> Optional[str]:
    H, s, power_budget = _random_instance(rng, max_n=8, max_m=4)
    ch = rotate_channel(H, s, power_budget)
    X = oblique_random(H.n_antennas, rng, power_budget)
    epsilon = float(rng.choice([1.0, 0.1]))
    G = euclidean_gradient(X, ch, epsilon)
    step = 1e-6
    numeric = np.zeros_like(G)
    for index in np.ndindex(*G.shape):
        E = np.zeros_like(G)
        E[index] = step
        numeric[index] = (smoothed_objective(X.data + E, ch, epsilon)
                          - smoothed_objective(X.data - E, ch, epsilon)) / (2 * step)
    error = np.linalg.norm(G - numeric) / max(np.linalg.norm(numeric), 1e-8)
    if error > 1e-5:
        return f"gradient relative error {error:.3e}"
    return None


def check_constants(rng: np.random.Generator) -> Optional[str]:
    if flop_model(64, 20, "gradient") != 84840 or flop_model(64, 20, "direction") != 16768:
        return "flop model does not give 84840 / 16768 at N=64, M=20"
    if detect_psk(np.exp(1j * np.pi / 4), 4).index != 0:
        return "PSK detector tie does not go to the smaller index"
    if not math.isclose(SymbolVector([0], order=8).beta, math.tan(math.pi / 8)):
        return "8-PSK sector slope is wrong"
    return None


CHECKS = {
    "retraction membership": check_retraction_membership,
    "tangent projection": check_projection,
    "sector identity": check_sector_identity,
    "log-sum-exp sandwich": check_sandwich,
    "gradient vs finite differences": check_gradient,
    "closed-form constants": check_constants,
}


def run_selftest(cases: int = 200, seed: int = 0) -> List[str]:
    """
    Runs every check on ``cases`` random draws (the gradient check on a tenth of them).

    Returns:
        List[str]: Failure descriptions, empty when everything passes
    """
    rng = np.random.default_rng(seed)
    failures = []
    for name, check in CHECKS.items():
        repeats = 1 if check is check_constants else max(1, cases // 10 if check is check_gradient else cases)
        for case in range(repeats):
            problem = check(rng)
            if problem:
                failures.append(f"{name} (case {case}): {problem}")
                break
        logger.info(f"{name}: {'failed' if failures and failures[-1].startswith(name) else 'ok'}")
    return failures
