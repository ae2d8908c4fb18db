import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dptell.classical import Model, Params  # noqa: E402
from dptell.numerics import DEFAULT_SEED  # noqa: E402

SPECIAL_ELLS = (0.3, 0.5, 1.7, 2.5, math.pi)


def random_draws(count: int, model: str | None = None, seed: int = DEFAULT_SEED, ells=SPECIAL_ELLS):
    """Valid deformation parameters; the listed ells come first, then uniform ones."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m = model or ("J1" if i % 2 == 0 else "L1")
        ell = ells[i % len(ells)] if i < 2 * len(ells) else float(rng.uniform(0.1, 4.0))
        g = float(rng.uniform(1.6, 5.0))
        h = float(rng.uniform(0.6, 5.0)) if m == "J1" else None
        out.append((Model(m), Params(g, h, ell)))
    return out


@pytest.fixture
def j1():
    return Model.J1, Params(2.0, 3.0, 0.5)


@pytest.fixture
def l1():
    return Model.L1, Params(2.0, None, 1.0)
