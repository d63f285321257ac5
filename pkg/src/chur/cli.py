"""Command-line entry point: configuration handling, sweep orchestration,
and report emission.

Commands: verify | figure1 | sweep | mask | qubit | finite-dim | lqc |
tightness.  Exit codes: 0 when every checked relation holds, 1 when a
violation beyond tolerance is found, 2 on configuration or usage errors.
All outputs are deterministic functions of (config, seed): reports embed
the effective configuration, never timestamps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .charfunc import char_momentum_autocorr, char_sweep
from .core import ChurEvaluation, bound, evaluate_chur, evaluate_grid, proof_chain_check
from .errors import ChurError, ConfigError
from .grid import MOMENTUM, POSITION, GridSpec, load_state, variance
from .mask import (MaskSpec, detection_profile, mask_from_file,
                   mask_uncertainty_relation)
from .protocols import (LqcScenario, QubitReadout, WeylPair, finite_dim_sweep,
                        lqc_bound_check, qubit_exact, qubit_sampled)
from .states import (CombSpec, GaussianSpec, RandomStateSpec, make_comb,
                     make_gaussian, make_random)
from .tightness import TightnessQuery, TightnessResult, maximize_lambda

GLOBAL_DEFAULTS = {
    "seed": 0,
    "grid_n": 4096,
    "grid_length": 40.0,
    "hbar": 1.0,
    "out": None,
    "workers": 1,
    "debug_bound_scale": 1.0,
}

COMMAND_DEFAULTS = {
    "verify": {
        "n_states": 1000, "n_modes": 32, "mode_scale": 1.0,
        "lambda_min": -5.0, "lambda_max": 5.0, "lambda_points": 21,
        "identity_states": 100, "identity_tol": 1e-8,
        "proof_states": 10, "proof_lambda_points": 3,
        "violation_tol": 1e-9, "gram_tol": 1e-10, "lower_tol": 1e-10,
    },
    "figure1": {"a_min": 0.01, "a_max": 10.0, "a_count": 50, "a_values": None,
                "sigma_x": 1.0},
    "sweep": {"state": {"kind": "gaussian", "sigma_x": 1.0},
              "lambda_min": -5.0, "lambda_max": 5.0, "lambda_points": 21},
    "mask": {"mask": {"kind": "top_hat", "width": 1.0, "kappa": 1.0},
             "mask_file": None, "state": {"kind": "gaussian", "sigma_x": 1.0},
             "y_min": None, "y_max": None, "y_points": None},
    "qubit": {"state": {"kind": "gaussian", "sigma_x": 1.0},
              "lambda_min": -5.0, "lambda_max": 5.0, "lambda_points": 21,
              "shots": 0, "reconstruction_tol": 1e-10},
    "finite-dim": {"dims": [2, 3, 4, 8, 16, 64], "n_states": 100000},
    "lqc": {"q_constant": 1.0, "lambda_b_values": [0.1, 1.0, 10.0],
            "sigma_v": 1.0, "n_states": 10},
    "tightness": {"gammas": [0.1, 1.5707963267948966, 3.141592653589793],
                  "family": "gaussian", "lambda_split": None,
                  "evaluations": 2000, "restarts": 5},
}


def _load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    return data


def build_config(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flag overrides; reject unknown keys."""
    cfg = dict(GLOBAL_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[command])
    path = args.config or os.environ.get("CHUR_DEFAULT_CONFIG")
    if path:
        data = _load_config_file(path)
        for key, value in data.items():
            if key not in cfg:
                raise ConfigError(f"unknown configuration key: {key!r}")
            cfg[key] = value
    for flag, key in (("seed", "seed"), ("grid_n", "grid_n"),
                      ("grid_length", "grid_length"), ("hbar", "hbar"),
                      ("out", "out"), ("workers", "workers")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "self_test", False):
        cfg["debug_bound_scale"] = 0.4
        if command == "verify":
            cfg["n_states"] = min(cfg["n_states"], 20)
            cfg["identity_states"] = min(cfg["identity_states"], 5)
            cfg["proof_states"] = min(cfg["proof_states"], 3)
    _validate_types(cfg)
    return cfg


def _validate_types(cfg: dict) -> None:
    for key, caster, cond in (
        ("seed", int, lambda v: True),
        ("grid_n", int, lambda v: v >= 2),
        ("grid_length", float, lambda v: v > 0),
        ("hbar", float, lambda v: v > 0),
        ("workers", int, lambda v: v >= 1),
        ("debug_bound_scale", float, lambda v: v > 0),
    ):
        try:
            cfg[key] = caster(cfg[key])
        except (TypeError, ValueError):
            raise ConfigError(f"configuration key {key!r} has invalid value {cfg[key]!r}")
        if not cond(cfg[key]):
            raise ConfigError(f"configuration key {key!r} out of range: {cfg[key]!r}")


def _grid(cfg) -> GridSpec:
    return GridSpec(cfg["grid_n"], cfg["grid_length"], cfg["hbar"])


def _build_state(spec: dict, grid: GridSpec, default_seed: int = 0):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("state spec must be an object with a 'kind' key")
    kind = spec["kind"]
    params = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "gaussian":
            return make_gaussian(GaussianSpec(**params), grid)
        if kind == "comb":
            return make_comb(CombSpec(**params), grid)
        if kind == "random":
            params.setdefault("seed", default_seed)
            return make_random(RandomStateSpec(**params), grid)
        if kind == "file":
            return load_state(params["path"])
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad parameters for state kind {kind!r}: {exc}")
    raise ConfigError(f"unknown state kind: {kind!r}")


def _build_mask(cfg) -> MaskSpec:
    if cfg.get("mask_file"):
        path = cfg["mask_file"]
        if not os.path.exists(path):
            raise ConfigError(f"mask file not found: {path}")
        kappa = cfg["mask"].get("kappa", 1.0) if isinstance(cfg.get("mask"), dict) else 1.0
        return mask_from_file(path, kappa=kappa)
    spec = cfg["mask"]
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("mask spec must be an object with a 'kind' key")
    params = {k: v for k, v in spec.items() if k != "kind"}
    try:
        return MaskSpec(spec["kind"], **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad mask spec: {exc}")


class Report:
    """Accumulates provenance comments plus body lines; one writer."""

    def __init__(self, command: str, cfg: dict):
        self.lines = [f"# tool: chur {__version__}", f"# command: {command}"]
        for key in sorted(cfg):
            if key == "out":
                continue
            self.lines.append(f"# config.{key}: {json.dumps(cfg[key], sort_keys=True)}")

    def add(self, line: str) -> None:
        self.lines.append(line)

    def write(self, out_path) -> None:
        text = "\n".join(self.lines) + "\n"
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify


def _verify_chunk(payload) -> dict:
    (grid_args, seeds, n_modes, mode_scale, lam_lo, lam_hi, lam_n,
     bound_scale, vtol) = payload
    grid = GridSpec(*grid_args)
    lxs = np.linspace(lam_lo, lam_hi, lam_n)
    lps = np.linspace(lam_lo, lam_hi, lam_n)
    worst_excess = -np.inf
    min_gram = np.inf
    min_lower = np.inf
    for seed in seeds:
        st = make_random(RandomStateSpec(seed=seed, n_modes=n_modes,
                                         mode_scale=mode_scale), grid)
        res = evaluate_grid(st, lxs, lps)
        excess = res.capital_lambda - bound_scale * res.bound
        worst_excess = max(worst_excess, float(excess.max()))
        min_gram = min(min_gram, res.min_gram_det)
        for rep, lams, vals in ((POSITION, lxs, res.phi), (MOMENTUM, lps, res.phi_tilde)):
            sig2 = variance(st, rep)
            margin = vals.real - (1.0 - 0.5 * lams**2 * sig2)
            min_lower = min(min_lower, float(margin.min()))
    return {"worst_excess": worst_excess, "min_gram": min_gram, "min_lower": min_lower}


def cmd_verify(cfg) -> int:
    grid = _grid(cfg)
    report = Report("verify", cfg)
    seeds = [cfg["seed"] + i for i in range(int(cfg["n_states"]))]
    payload_base = ((grid.n_points, grid.length, grid.hbar, grid.center),
                    None, int(cfg["n_modes"]), float(cfg["mode_scale"]),
                    float(cfg["lambda_min"]), float(cfg["lambda_max"]),
                    int(cfg["lambda_points"]), float(cfg["debug_bound_scale"]),
                    float(cfg["violation_tol"]))
    workers = int(cfg["workers"])
    if workers > 1 and len(seeds) > 1:
        chunks = [seeds[i::workers] for i in range(workers)]
        payloads = [payload_base[:1] + (chunk,) + payload_base[2:] for chunk in chunks if chunk]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_verify_chunk, payloads))
    else:
        parts = [_verify_chunk(payload_base[:1] + (seeds,) + payload_base[2:])]
    worst_excess = max(p["worst_excess"] for p in parts)
    min_gram = min(p["min_gram"] for p in parts)
    min_lower = min(p["min_lower"] for p in parts)

    # Fourier-integral vs autocorrelation identity
    lxs = np.linspace(cfg["lambda_min"], cfg["lambda_max"], int(cfg["lambda_points"]))
    ident_err = 0.0
    ident_states = [make_gaussian(GaussianSpec(1.0), grid)]
    ident_states += [make_random(RandomStateSpec(seed=cfg["seed"] + 7000 + i,
                                                 n_modes=int(cfg["n_modes"])), grid)
                     for i in range(int(cfg["identity_states"]))]
    for st in ident_states:
        direct = char_sweep(st, lxs, POSITION)
        auto = np.array([char_momentum_autocorr(st, lx) for lx in lxs])
        ident_err = max(ident_err, float(np.max(np.abs(direct - auto))))

    # proof chain on a sub-grid
    sub = np.linspace(cfg["lambda_min"], cfg["lambda_max"], int(cfg["proof_lambda_points"]))
    proof_failures = 0
    for i in range(int(cfg["proof_states"])):
        st = make_random(RandomStateSpec(seed=cfg["seed"] + 9000 + i,
                                         n_modes=int(cfg["n_modes"])), grid)
        for lx in sub:
            for lp in sub:
                if not proof_chain_check(st, lx, lp).passed:
                    proof_failures += 1

    chur_ok = worst_excess <= cfg["violation_tol"]
    gram_ok = min_gram >= -cfg["gram_tol"]
    lower_ok = min_lower >= -cfg["lower_tol"]
    ident_ok = ident_err <= cfg["identity_tol"]
    proof_ok = proof_failures == 0
    report.add(f"states_checked: {len(seeds)}")
    report.add(f"max_bound_excess: {worst_excess!r}")
    report.add(f"min_gram_det: {min_gram!r}")
    report.add(f"min_lower_bound_margin: {min_lower!r}")
    report.add(f"identity_max_error: {ident_err!r}")
    report.add(f"proof_chain_failures: {proof_failures}")
    for name, ok in (("chur", chur_ok), ("gram", gram_ok), ("lower_bound", lower_ok),
                     ("identity", ident_ok), ("proof_chain", proof_ok)):
        report.add(f"check_{name}: {'pass' if ok else 'FAIL'}")
    all_ok = chur_ok and gram_ok and lower_ok and ident_ok and proof_ok
    report.add(f"verdict: {'pass' if all_ok else 'FAIL'}")
    report.write(cfg["out"])
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# figure1


def cmd_figure1(cfg) -> int:
    grid = _grid(cfg)
    report = Report("figure1", cfg)
    report.add("gamma,bound,gaussian_lambda")
    if cfg["a_values"] is not None:
        a_values = [float(a) for a in cfg["a_values"]]
    else:
        count = int(cfg["a_count"])
        a_values = list(np.geomspace(cfg["a_min"], cfg["a_max"], count)) if count > 0 else []
    st = make_gaussian(GaussianSpec(float(cfg["sigma_x"])), grid)
    sx = np.sqrt(variance(st, POSITION))
    sp = np.sqrt(variance(st, MOMENTUM))
    b_opt = np.sqrt(grid.hbar * sx / sp)
    ok = True
    for a in a_values:
        if a < 0:
            raise ConfigError("a values must be non-negative")
        lam_x = np.sqrt(a) / b_opt
        lam_p = np.sqrt(a) * b_opt / grid.hbar
        ev = evaluate_chur(st, lam_x, lam_p)
        ok = ok and ev.holds()
        report.add(f"{ev.gamma!r},{ev.bound!r},{ev.capital_lambda!r}")
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(cfg) -> int:
    grid = _grid(cfg)
    report = Report("sweep", cfg)
    st = _build_state(cfg["state"], grid, default_seed=cfg["seed"])
    lams = np.linspace(cfg["lambda_min"], cfg["lambda_max"], int(cfg["lambda_points"]))
    report.add(ChurEvaluation.RECORD_HEADER)
    ok = True
    for lx in lams:
        for lp in lams:
            ev = evaluate_chur(st, lx, lp)
            ok = ok and ev.capital_lambda <= cfg["debug_bound_scale"] * ev.bound + 1e-9
            report.add(ev.record())
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# mask


def cmd_mask(cfg) -> int:
    grid = _grid(cfg)
    report = Report("mask", cfg)
    mask = _build_mask(cfg)
    st = _build_state(cfg["state"], grid, default_seed=cfg["seed"])
    y_grid = None
    if cfg["y_points"] is not None:
        if cfg["y_min"] is None or cfg["y_max"] is None:
            raise ConfigError("y_points requires y_min and y_max")
        y_grid = np.linspace(float(cfg["y_min"]), float(cfg["y_max"]), int(cfg["y_points"]))
    prof = detection_profile(mask, st, y_grid)
    if mask.is_integrable:
        ur = mask_uncertainty_relation(mask, st, y_grid)
        report.add(f"# ur_lhs: {ur.lhs!r}")
        report.add(f"# ur_rhs: {ur.rhs!r}")
        report.add(f"# ur_holds: {str(ur.holds).lower()}")
        report.add(f"# ur_cap_holds: {str(ur.cap_holds).lower()}")
        ok = ur.holds and ur.cap_holds
    else:
        report.add("# ur_holds: skipped (mask not square-integrable)")
        ok = True
    report.add("y,q,p")
    for y, q, p in zip(prof.y_samples, prof.q_values, prof.p_values):
        qv = float(abs(q)) if mask.is_complex else float(q)
        pv = float(abs(p)) if mask.is_complex else float(p)
        report.add(f"{float(y)!r},{qv!r},{pv!r}")
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# qubit


def cmd_qubit(cfg) -> int:
    grid = _grid(cfg)
    report = Report("qubit", cfg)
    st = _build_state(cfg["state"], grid, default_seed=cfg["seed"])
    lams = np.linspace(cfg["lambda_min"], cfg["lambda_max"], int(cfg["lambda_points"]))
    shots = int(cfg["shots"])
    report.add(QubitReadout.RECORD_HEADER)
    worst = 0.0
    for lp in lams:
        exact = qubit_exact(st, lp)
        expected = complex(char_sweep(st, [lp], MOMENTUM)[0])
        worst = max(worst, abs(exact.reconstructed - expected))
        row = qubit_sampled(st, lp, shots, seed=cfg["seed"]) if shots else exact
        report.add(row.record())
    report.add(f"# reconstruction_max_error: {worst!r}")
    report.write(cfg["out"])
    return 0 if worst <= cfg["reconstruction_tol"] else 1


# ---------------------------------------------------------------------------
# finite-dim


def cmd_finite_dim(cfg) -> int:
    report = Report("finite-dim", cfg)
    report.add("d,phi,lhs_max,bound")
    ok = True
    for d in cfg["dims"]:
        pair = WeylPair.clock_and_shift(int(d))
        vals = finite_dim_sweep(pair, int(cfg["n_states"]), seed=cfg["seed"])
        lhs_max = float(vals.max())
        b = bound(pair.phase)
        ok = ok and lhs_max <= b + 1e-12
        report.add(f"{int(d)},{pair.phase!r},{lhs_max!r},{b!r}")
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# lqc


def cmd_lqc(cfg) -> int:
    hbar_q = float(cfg["hbar"]) * float(cfg["q_constant"])
    grid = GridSpec(cfg["grid_n"], cfg["grid_length"], hbar_q)
    report = Report("lqc", cfg)
    report.add("lambda_b,state,sigma_v,rhs,abs_holonomy,holds,intermediate_holds")
    states = [("gaussian", make_gaussian(GaussianSpec(float(cfg["sigma_v"])), grid))]
    for i in range(int(cfg["n_states"])):
        states.append((f"random{i}",
                       make_random(RandomStateSpec(seed=cfg["seed"] + i), grid)))
    ok = True
    for lb in cfg["lambda_b_values"]:
        for name, st in states:
            res = lqc_bound_check(LqcScenario(q_constant=float(cfg["q_constant"]),
                                              lambda_b=float(lb), state_v=st,
                                              hbar=float(cfg["hbar"])))
            ok = ok and res.holds and res.intermediate_holds
            report.add(f"{float(lb)!r},{name},{res.sigma_v!r},{res.rhs!r},"
                       f"{res.abs_holonomy!r},{int(res.holds)},{int(res.intermediate_holds)}")
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# tightness


def cmd_tightness(cfg) -> int:
    report = Report("tightness", cfg)
    report.add(TightnessResult.RECORD_HEADER)
    ok = True
    gammas = np.unique(np.asarray([float(g) for g in cfg["gammas"]]))
    for gamma in gammas:
        query = TightnessQuery(gamma=float(gamma), family=cfg["family"],
                               lambda_split=cfg["lambda_split"],
                               max_evaluations=int(cfg["evaluations"]),
                               restarts=int(cfg["restarts"]), seed=cfg["seed"],
                               hbar=cfg["hbar"])
        res = maximize_lambda(query)
        ok = ok and res.gap >= -1e-9 and res.max_iterate <= res.bound + 1e-9
        report.add(res.record())
    report.write(cfg["out"])
    return 0 if ok else 1


# ---------------------------------------------------------------------------


COMMANDS = {
    "verify": cmd_verify,
    "figure1": cmd_figure1,
    "sweep": cmd_sweep,
    "mask": cmd_mask,
    "qubit": cmd_qubit,
    "finite-dim": cmd_finite_dim,
    "lqc": cmd_lqc,
    "tightness": cmd_tightness,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chur",
        description="Verification toolkit for the characteristic-function "
                    "uncertainty relation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int)
        p.add_argument("--grid-n", dest="grid_n", type=int)
        p.add_argument("--grid-length", dest="grid_length", type=float)
        p.add_argument("--hbar", type=float)
        p.add_argument("--out")
        p.add_argument("--workers", type=int)
        p.add_argument("--self-test", dest="self_test", action="store_true",
                       help="corrupt the bound by 0.4x; the run must exit 1")
    return parser


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args.command, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"chur: configuration error: {exc}", file=sys.stderr)
        return 2
    except ChurError as exc:
        print(f"chur: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"chur: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
