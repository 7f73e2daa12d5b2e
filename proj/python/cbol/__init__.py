"""Classifier-pruned Bayesian optimization on a synthetic latent linac."""

import os
from pathlib import Path

# Installed wheels carry their own copy of the committed assets.
_bundled = Path(__file__).with_name("assets")
if _bundled.is_dir():
    os.environ.setdefault("CBOL_ASSET_DIR", str(_bundled))

from ._core import *  # noqa: E402,F401,F403
from ._core import __doc__  # noqa: E402,F401
