"""Linear structural-equation-model simulation and dataset I/O."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import WeightedDag, format_float, topological_order

NOISE_KINDS = ("gaussian", "exponential")


@dataclass(frozen=True)
class Dataset:
    """An n x d sample matrix, one column per vertex."""

    X: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.X, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError("X must be 2-D (n, d)")
        if not np.all(np.isfinite(x)):
            raise ValueError("X has non-finite entries")
        object.__setattr__(self, "X", x)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def save_csv(self, path) -> None:
        rows = (",".join(format_float(v) for v in row) for row in self.X)
        Path(path).write_text("\n".join(rows) + "\n")

    @classmethod
    def load_csv(cls, path) -> "Dataset":
        return cls(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))


def simulate_linear(w: WeightedDag, n: int, noise: str = "gaussian",
                    seed: int = 0, standardize: bool = False) -> Dataset:
    """Sample a linear SEM: each variable is its parents' weighted sum plus noise.

    Noise is drawn up front as an (n, d) block, one column per vertex, then
    columns are filled in topological order; the output is therefore exactly
    invariant to how topological ties are broken.  ``gaussian`` noise is
    standard normal; ``exponential`` is Exp(1), uncentered (mean 1), which
    shifts the equilibrium means away from zero.  With ``standardize`` each
    column is rescaled to zero mean and unit variance (off by default).

    Raises:
        CyclicGraphError: if the support of ``w`` has a cycle.
        ValueError: for ``n < 1`` or an unknown noise kind.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if noise not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {noise!r}, expected one of {NOISE_KINDS}")
    order = topological_order(w.graph)
    d = w.d
    mat = w.matrix()
    rng = np.random.default_rng(seed)
    if noise == "gaussian":
        eps = rng.standard_normal((n, d))
    else:
        eps = rng.exponential(1.0, size=(n, d))
    x = np.empty((n, d))
    for v in order:
        pa = list(w.graph.parents(v))
        if pa:
            x[:, v] = x[:, pa] @ mat[pa, v] + eps[:, v]
        else:
            x[:, v] = eps[:, v]
    if standardize:
        std = x.std(axis=0)
        if np.any(std == 0):
            raise ValueError("cannot standardize a constant column")
        x = (x - x.mean(axis=0)) / std
    return Dataset(x)
