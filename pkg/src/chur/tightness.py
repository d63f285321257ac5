"""Derivative-free search for the largest value of |Phi|^2 + |Phi_tilde|^2
reachable within a state family at a fixed conjugation angle, probing how
tight the bound is empirically.

The objective is evaluated through the same machinery the verification
sweeps use, so a long optimization run doubles as a randomized stress test:
no iterate may ever exceed the bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .charfunc import char_sweep
from .core import bound
from .grid import MOMENTUM, POSITION, GridSpec
from .states import CombSpec, GaussianSpec, make_comb, make_gaussian

DEFAULT_EVALUATIONS = 2000
DEFAULT_RESTARTS = 5

_GAUSSIAN_GRID = GridSpec(16384, 140.0)
_COMB_GRID = GridSpec(131072, 320.0)

# parameter boxes in log space
_GAUSSIAN_BOX = {"sigma": (0.05, 8.0)}
_COMB_BOX = {"period_ratio": (0.75, 4.0 / 3.0), "tooth_ratio": (0.003, 0.08),
             "envelope_ratio": (4.0, 24.0)}


@dataclass(frozen=True)
class TightnessQuery:
    """Search request at one conjugation angle.

    ``lambda_split`` optionally fixes lambda_x (lambda_p follows from the
    angle); by default the split is symmetric.  The family parameter box
    can be overridden per key via ``bounds``.
    """

    gamma: float
    family: str = "gaussian"
    lambda_split: Optional[float] = None
    max_evaluations: int = DEFAULT_EVALUATIONS
    restarts: int = DEFAULT_RESTARTS
    seed: int = 0
    hbar: float = 1.0
    grid: Optional[GridSpec] = None
    bounds: Optional[dict] = None

    def __post_init__(self):
        if self.family not in ("gaussian", "comb"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.max_evaluations < 1 or self.restarts < 1:
            raise ValueError("budget values must be positive")

    def split(self) -> tuple:
        """(lambda_x, lambda_p) with hbar * lambda_x * lambda_p == gamma."""
        if self.lambda_split is not None:
            lx = float(self.lambda_split)
            if lx == 0.0:
                raise ValueError("lambda_split must be nonzero")
            return lx, self.gamma / (self.hbar * lx)
        if self.gamma == 0.0:
            return 0.0, 0.0
        lx = np.sqrt(abs(self.gamma) / self.hbar)
        return lx, self.gamma / (self.hbar * lx)


@dataclass(frozen=True)
class TightnessResult:
    gamma: float
    bound: float
    best_lambda_big: float
    gap: float
    family: str
    best_params: dict
    evaluations: int
    budget_exhausted: bool
    max_iterate: float

    RECORD_HEADER = "gamma,bound,best_lambda_big,gap,family,params_json,evaluations"

    def record(self) -> str:
        params = json.dumps({k: self.best_params[k] for k in sorted(self.best_params)},
                            separators=(",", ":"))
        quoted = '"' + params.replace('"', '""') + '"'
        return (f"{self.gamma!r},{self.bound!r},{self.best_lambda_big!r},{self.gap!r},"
                f"{self.family},{quoted},{self.evaluations}")


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.exhausted = False

    def take(self) -> bool:
        if self.used >= self.limit:
            self.exhausted = True
            return False
        self.used += 1
        return True


class _GaussianFamily:
    names = ("sigma",)

    def __init__(self, grid, box):
        self.grid = grid
        self.box = np.log([box["sigma"]])

    def state(self, params):
        return make_gaussian(GaussianSpec(sigma_x=float(np.exp(params[0]))), self.grid)

    def describe(self, params):
        return {"sigma": float(np.exp(params[0]))}

    def seeds(self, n):
        lo, hi = self.box[0]
        return np.linspace(lo, hi, n)[:, None]


class _CombFamily:
    names = ("period_ratio", "tooth_ratio", "envelope_ratio")

    def __init__(self, grid, box, period_scale):
        self.grid = grid
        self.period_scale = period_scale
        self.box = np.log([box[k] for k in self.names])

    def _spec(self, params):
        ratio, w_ratio, env_ratio = np.exp(params)
        period = self.period_scale * ratio
        tooth = max(w_ratio * period, 2.05 * self.grid.dx)
        envelope = env_ratio * period
        # trim the tooth count (and if needed the envelope) to the window
        usable = 0.98 * self.grid.length
        half = int(np.floor(((usable - 8.0 * envelope) / period - 1.0) / 2.0))
        cap = int(np.ceil(3.5 * env_ratio))
        if half < 1:
            envelope = (usable - 3.0 * period) / 8.0
            half = 1
        return CombSpec(period, tooth, min(half, cap), envelope)

    def state(self, params):
        return make_comb(self._spec(params), self.grid)

    def describe(self, params):
        spec = self._spec(params)
        return {"period": float(spec.period), "tooth_sigma": float(spec.tooth_sigma),
                "half_teeth": int(spec.half_teeth), "envelope_sigma": float(spec.envelope_sigma)}

    def seeds(self, n):
        per_axis = max(2, int(round(n ** (1.0 / 3.0))))
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in self.box]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        return pts


def _make_family(query: TightnessQuery, lambda_x: float):
    if query.family == "gaussian":
        box = dict(_GAUSSIAN_BOX)
        box.update(query.bounds or {})
        return _GaussianFamily(query.grid or _GAUSSIAN_GRID, box)
    box = dict(_COMB_BOX)
    box.update(query.bounds or {})
    period_scale = 2.0 * np.pi / abs(lambda_x) if lambda_x != 0.0 else 1.0
    return _CombFamily(query.grid or _COMB_GRID, box, period_scale)


def maximize_lambda(query: TightnessQuery) -> TightnessResult:
    """Coarse seeding plus simplex refinement; deterministic for a fixed seed."""
    lam_x, lam_p = query.split()
    b = bound(query.gamma)
    family = _make_family(query, lam_x)
    budget = _Budget(query.max_evaluations)
    lo, hi = family.box[:, 0], family.box[:, 1]
    tracker = {"best": -np.inf, "best_params": None, "max_seen": -np.inf}

    def objective(params):
        if not budget.take():
            return 0.0  # flat once the budget is gone; simplex stalls out
        clipped = np.clip(params, lo, hi)
        penalty = float(np.sum((params - clipped) ** 2))
        state = family.state(clipped)
        phi = char_sweep(state, [lam_x], POSITION)[0]
        phi_t = char_sweep(state, [lam_p], MOMENTUM)[0]
        lam_big = abs(phi) ** 2 + abs(phi_t) ** 2
        tracker["max_seen"] = max(tracker["max_seen"], lam_big)
        if lam_big - penalty > tracker["best"]:
            tracker["best"] = lam_big - penalty
            tracker["best_params"] = np.array(clipped)
        return -(lam_big - 1e-3 * penalty)

    seeds = family.seeds(max(query.restarts * 4, 16))
    scores = np.array([-objective(s) for s in seeds])
    order = np.argsort(-scores, kind="stable")
    rng = np.random.default_rng(query.seed)
    starts = [seeds[i] for i in order[: query.restarts]]
    while len(starts) < query.restarts:
        starts.append(lo + (hi - lo) * rng.random(lo.size))

    per_restart = max(8, (query.max_evaluations - budget.used) // query.restarts)
    for x0 in starts:
        if budget.used >= budget.limit:
            budget.exhausted = True
            break
        jitter = 0.02 * (hi - lo) * rng.standard_normal(lo.size)
        minimize(objective, np.clip(x0 + jitter, lo, hi), method="Nelder-Mead",
                 options={"maxfev": per_restart, "xatol": 1e-7, "fatol": 1e-12,
                          "disp": False})

    best_params = tracker["best_params"]
    best = float(tracker["best"])
    return TightnessResult(query.gamma, b, best, b - best, query.family,
                           family.describe(best_params), budget.used,
                           budget.exhausted, float(tracker["max_seen"]))


def gap_profile(gammas, **query_kwargs) -> list:
    """:func:`maximize_lambda` over a deduplicated ascending list of angles."""
    gs = np.unique(np.asarray(list(gammas), dtype=float))
    return [maximize_lambda(TightnessQuery(gamma=float(g), **query_kwargs)) for g in gs]
