"""Allows ``python -m ceprecode``."""

import sys

from .main import main

sys.exit(main())
