"""Linear variational inequalities on the unit box.

An instance is (D, c, rho) with D in [-1,1]^{m x m} and c in [-1,1]^m.
A point z in [0,1]^m is accepted when every componentwise slack
(Dz+c)_j (z'_j - z_j) stays above -rho for all feasible z'_j; since the
slack is affine in z'_j its worst case sits at an endpoint, so only
z'_j in {0, 1} is ever evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LinVIInstance", "SlackReport", "check_solution", "brute_force_solve", "gen_random"]


@dataclass(frozen=True)
class LinVIInstance:
    m: int
    D: np.ndarray
    c: np.ndarray
    rho: float

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if D.shape != (self.m, self.m) or c.shape != (self.m,):
            raise ValueError(f"expected D {self.m}x{self.m} and c of length {self.m}")
        if np.abs(D).max(initial=0.0) > 1.0 or np.abs(c).max(initial=0.0) > 1.0:
            raise ValueError("entries of D and c must lie in [-1, 1]")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "c", c)

    def operator(self, z: np.ndarray) -> np.ndarray:
        return self.D @ z + self.c

    def to_json_dict(self) -> dict:
        return {"m": self.m, "D": self.D.tolist(), "c": self.c.tolist(), "rho": self.rho}

    @classmethod
    def from_json_dict(cls, d: dict) -> "LinVIInstance":
        return cls(m=int(d["m"]), D=np.array(d["D"], dtype=float),
                   c=np.array(d["c"], dtype=float), rho=float(d["rho"]))


@dataclass(frozen=True)
class SlackReport:
    slacks: np.ndarray  # per-component worst slack over endpoint moves
    rho: float
    passed: bool

    @property
    def worst(self) -> float:
        return float(self.slacks.min())

    def to_json_dict(self) -> dict:
        return {"slacks": self.slacks.tolist(), "rho": self.rho, "pass": self.passed}


def check_solution(inst: LinVIInstance, z: np.ndarray, rho: float | None = None) -> SlackReport:
    """Componentwise acceptance test; rho defaults to the instance value."""
    rho = inst.rho if rho is None else float(rho)
    z = np.asarray(z, dtype=float)
    if z.shape != (inst.m,):
        raise ValueError(f"z must have length {inst.m}")
    if z.min() < 0.0 or z.max() > 1.0:
        raise ValueError("z must lie in the unit box")
    v = inst.operator(z)
    slacks = np.minimum(v * (0.0 - z), v * (1.0 - z))
    return SlackReport(slacks=slacks, rho=rho, passed=bool(slacks.min() >= -rho))


def _grid_values(grid_step: float) -> np.ndarray:
    k = round(1.0 / grid_step)
    if abs(k * grid_step - 1.0) > 1e-12 or k < 2:
        raise ValueError("grid_step must evenly divide [0, 1]")
    return np.arange(k + 1) * grid_step


def brute_force_solve(inst: LinVIInstance, grid_step: float) -> np.ndarray:
    """Exhaustive oracle for m <= 3: the grid point maximizing the minimum slack.

    Boxes always carry exact solutions and the slack moves by at most
    3m per unit coordinate change, so refining the grid drives the
    returned slack toward 0 from below. Exact slack ties are frequent
    (every exact solution scores 0), so ties prefer the point with the
    smallest operator magnitude, then the lexicographically smallest.
    """
    if inst.m > 3:
        raise ValueError("brute force is limited to m <= 3")
    vals = _grid_values(grid_step)
    grids = np.meshgrid(*([vals] * inst.m), indexing="ij")
    Z = np.stack([g.ravel() for g in grids], axis=1)  # lexicographic order
    V = Z @ inst.D.T + inst.c
    slack = np.minimum(-V * Z, V * (1.0 - Z)).min(axis=1)
    best = slack == slack.max()
    tied = np.flatnonzero(best)
    vmag = np.abs(V[tied]).max(axis=1)
    return Z[tied[int(np.argmin(vmag))]].copy()


def gen_random(m: int, seed: int, rho: float = 0.1) -> LinVIInstance:
    """Entries i.i.d. uniform on [-1, 1]; deterministic in the seed."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    return LinVIInstance(m=m, D=rng.uniform(-1.0, 1.0, size=(m, m)),
                         c=rng.uniform(-1.0, 1.0, size=m), rho=rho)
