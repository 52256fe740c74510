"""Command-line front end: flat key=value configs in, CSV/JSON artifacts out.

Commands: map | sweep-deltaD | trajectories | converge | verify | solve-gp.
Values from ``--config`` are overridden by explicit flags. Exit codes: 0 on
success, 2 for infeasible constraints, 3 for an invalid config.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .affine import FixedPointFamilyError, classify, fixed_points, iterate
from .constructions import (
    CONVENTIONS,
    ThreeQubitParams,
    TwoQubitParams,
    comparison_maps,
    phi_appD_general,
    phi_correlated,
    phi_E_general,
    phi_env_coherent,
    phi_gp_3qubit,
    phi_gp_finetuned,
    phi_pc,
    solve_gp_constraints,
)
from .core import InvalidStateError
from .harness import CLAIMS, VacuousCheckError, run_claim
from .thermo import convergence_steps, delta_D, l1_coherence

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID = 0, 2, 3

CONSTRUCTIONS = ("pc", "env_coherent", "correlated", "gp_finetuned", "gp_3qubit", "appD", "general2q")
CLAIM_IDS = tuple(sorted(CLAIMS))

FLOAT_KEYS = {
    "J": 0.0, "h": 0.0, "h1": 0.0, "h2": 0.0, "t": 1.0,
    "b1": 0.0, "b2": 0.0, "b3": 0.0,
    "f1": 0.0, "f2": 0.0, "f3": 0.0, "f3_E": 0.0,
    "c11": 0.0, "c12": 0.0, "c13": 0.0, "c21": 0.0, "c22": 0.0, "c23": 0.0,
    "c31": 0.0, "c32": 0.0, "c33": 0.0, "c_asym": 0.0,
    "phi0": 0.0, "phi1": 0.0, "phi2": 0.0, "alpha": 0.0, "theta": 0.0,
    "eps": 1e-8,
}
INT_KEYS = {"seed": 0, "trials": 0, "n": 0, "steps": 10, "sweep_steps": 41, "n_max": 10_000, "cloud": 200}
STR_KEYS = {"construction": "pc", "convention": "physical", "claim": "all", "starts": "0,+"}
OPTIONAL_KEYS = {"rG"}  # no default: absent means "not given"

NAMED_STATES = {
    "0": (0.0, 0.0, 1.0), "1": (0.0, 0.0, -1.0),
    "+": (1.0, 0.0, 0.0), "-": (-1.0, 0.0, 0.0),
    "+i": (0.0, 1.0, 0.0), "-i": (0.0, -1.0, 0.0),
}

CONVENTION_NOTES = (
    "log = natural (nats)",
    "U = exp(-i H t); time enters as J t and h t",
    "site 1 = leftmost tensor factor; rho = (I + a.sigma)/2",
    "two-qubit fields multiply Z directly (H_S = h Z); magnitudes in the physical convention unless convention=printed",
)


class ConfigError(ValueError):
    pass


class Infeasible(RuntimeError):
    def __init__(self, reason, detail):
        super().__init__(detail)
        self.reason = reason


# -- configuration ----------------------------------------------------------------

def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    return raw


def _parse_float(key, value):
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace("pi", repr(math.pi))
    try:
        # allow simple fractions such as pi/4
        if "/" in text:
            num, den = text.split("/", 1)
            out = float(num or 1) / float(den)
        elif "*" in text:
            a, b = text.split("*", 1)
            out = float(a) * float(b)
        else:
            out = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: cannot parse {value!r} as a number") from exc
    if not math.isfinite(out):
        raise ConfigError(f"{key}: value must be finite")
    return out


def build_config(raw):
    """Typed config from raw string values, with defaults and bound checks."""
    known = set(FLOAT_KEYS) | set(INT_KEYS) | set(STR_KEYS) | OPTIONAL_KEYS
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = dict(FLOAT_KEYS)
    cfg.update(INT_KEYS)
    cfg.update(STR_KEYS)
    cfg["rG"] = None
    for key, value in raw.items():
        if value is None:
            continue
        if key in INT_KEYS:
            try:
                cfg[key] = int(str(value).strip())
            except ValueError as exc:
                raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc
        elif key in STR_KEYS:
            cfg[key] = str(value).strip()
        else:
            cfg[key] = _parse_float(key, value)
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg["construction"] not in CONSTRUCTIONS:
        raise ConfigError(f"construction must be one of {', '.join(CONSTRUCTIONS)}")
    if cfg["convention"] not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {', '.join(CONVENTIONS)}")
    for vec in (("b1", "b2", "b3"), ("f1", "f2", "f3")):
        if math.fsum(cfg[k] ** 2 for k in vec) > 1 + 1e-12:
            raise ConfigError(f"({', '.join(vec)}) lies outside the Bloch ball")
    if cfg["f1"] ** 2 + cfg["f2"] ** 2 + cfg["f3_E"] ** 2 > 1 + 1e-12:
        raise ConfigError("(f1, f2, f3_E) lies outside the Bloch ball")
    if cfg["rG"] is not None and abs(cfg["rG"]) > 1:
        raise ConfigError("|rG| must not exceed 1")
    if cfg["steps"] < 0:
        raise ConfigError("steps must be non-negative")
    if cfg["sweep_steps"] < 1:
        raise ConfigError("sweep_steps must be at least 1")
    if cfg["n_max"] < 1:
        raise ConfigError("n_max must be at least 1")
    if cfg["cloud"] < 0:
        raise ConfigError("cloud must be non-negative")
    if cfg["eps"] <= 0:
        raise ConfigError("eps must be positive")
    if cfg["trials"] < 0:
        raise ConfigError("trials must be non-negative")
    if cfg["n"] and not 2 <= cfg["n"] <= 4:
        raise ConfigError("n must lie in 2..4")
    if cfg["claim"] != "all" and cfg["claim"] not in CLAIMS:
        raise ConfigError(f"unknown claim {cfg['claim']!r}; available: {', '.join(CLAIM_IDS)}")
    parse_starts(cfg["starts"])


def parse_starts(text):
    starts = []
    for item in str(text).split(","):
        item = item.strip()
        if item not in NAMED_STATES:
            raise ConfigError(f"unknown initial state {item!r}; available: {', '.join(NAMED_STATES)}")
        starts.append(item)
    return starts


def _fmt(x):
    if x is None:
        return "none"
    if isinstance(x, float):
        return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0
    return str(x)


def header_lines(command, cfg):
    lines = [f"qubitmaps {__version__}", f"command: {command}"]
    lines += [f"convention: {note}" for note in CONVENTION_NOTES]
    lines += [f"config: {key} = {_fmt(cfg[key])}" for key in sorted(cfg)]
    return lines


def _csv_text(command, cfg, columns, rows, extra=()):
    out = [f"# {line}" for line in header_lines(command, cfg)]
    out += [f"# {line}" for line in extra]
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(_fmt(float(v)) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool) else str(v) for v in row))
    return "\n".join(out) + "\n"


def _json_text(command, cfg, payload):
    meta = {"version": __version__, "command": command, "conventions": list(CONVENTION_NOTES),
            "config": {k: cfg[k] for k in sorted(cfg)}}
    return json.dumps({"meta": meta, **payload}, indent=2, sort_keys=True) + "\n"


# -- map construction ------------------------------------------------------------

def _b(cfg):
    return (cfg["b1"], cfg["b2"], cfg["b3"])


def build_map(cfg):
    """``(map, r_G or None, extra json fields)`` for the configured construction."""
    name, conv, t = cfg["construction"], cfg["convention"], cfg["t"]
    extra = {}
    r_g = cfg["rG"]
    if name == "pc":
        m = phi_pc(cfg["J"], cfg["h"], cfg["b3"], t, conv)
    elif name == "env_coherent":
        m = phi_env_coherent(cfg["J"], cfg["h"], _b(cfg), t, conv)
    elif name == "correlated":
        m = phi_correlated(cfg["J"], cfg["h"], cfg["b3"], cfg["c31"], cfg["c32"], cfg["c_asym"], t, conv)
    elif name == "gp_finetuned":
        if r_g is None:
            raise ConfigError("gp_finetuned needs rG")
        m, chi = phi_gp_finetuned(cfg["J"], cfg["h"], _b(cfg), r_g, t, conv)
        extra["correlations"] = chi.tolist()
    elif name == "gp_3qubit":
        if r_g is not None:
            sol = solve_gp_constraints(cfg["b3"], r_g, cfg["f1"], cfg["f2"], t)
            extra["gp_solution"] = sol.to_json()
            if not sol.feasible:
                raise Infeasible(sol.infeasibility_reason.value, "Gibbs-preserving constraints are infeasible")
            p = sol.params(cfg["h"], cfg["f1"], cfg["f2"])
        else:
            p = ThreeQubitParams(cfg["J"], cfg["h"], cfg["b3"], cfg["f1"], cfg["f2"], cfg["f3"])
        m = phi_gp_3qubit(p, t)
    elif name == "appD":
        m = phi_appD_general(cfg["phi0"], cfg["phi1"], cfg["phi2"], cfg["alpha"], cfg["theta"], _b(cfg))
    else:  # general2q
        c = np.array([[cfg[f"c{i}{j}"] for j in (1, 2, 3)] for i in (1, 2, 3)])
        m = phi_E_general(TwoQubitParams(cfg["J"], cfg["h1"], cfg["h2"]), _b(cfg), c, t, conv)
    return m, r_g, extra


def fibonacci_sphere(count):
    """``count`` nearly uniform unit vectors (golden-angle spiral)."""
    if count == 0:
        return np.zeros((0, 3))
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    r = np.sqrt(1 - z ** 2)
    phi = np.pi * (3 - np.sqrt(5)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _comparison(cfg):
    if cfg["rG"] is None:
        raise ConfigError("rG is required for the PC / E / GP comparison")
    if cfg["b3"] == 0:
        raise ConfigError("b3 must be nonzero for the PC / E / GP comparison")
    sol = solve_gp_constraints(cfg["b3"], cfg["rG"], cfg["f1"], cfg["f2"], cfg["t"])
    if not sol.feasible:
        raise Infeasible(sol.infeasibility_reason.value, "Gibbs-preserving constraints are infeasible")
    maps, sol = comparison_maps(cfg["b3"], cfg["rG"], cfg["h"], cfg["f1"], cfg["f2"], cfg["f3_E"], cfg["t"])
    return maps, sol


# -- commands ---------------------------------------------------------------------
# each returns {filename: text}; nothing is written until the whole set is built

def cmd_map(cfg):
    m, r_g, extra = build_map(cfg)
    cls = classify(m, r_g)
    try:
        fp = fixed_points(m)
        fixed = {"bloch": fp.bloch.tolist(), "physical": fp.physical, "unique": True}
    except FixedPointFamilyError:
        fixed = {"bloch": None, "physical": None, "unique": False}
    payload = {
        "construction": cfg["construction"],
        "map": m.to_json(),
        "augmented": m.augmented().tolist(),
        "classification": cls.to_json(),
        "fixed_point": fixed,
        "choi_min_eigenvalue": cls.choi_min_eigenvalue,
        **extra,
    }
    files = {
        "map.csv": _csv_text("map", cfg, ["r0", "r1", "r2", "r3"], m.augmented().tolist(),
                             ["augmented matrix: row 0 = (1, 0, 0, 0), column 0 = tau, block = T"]),
        "map.json": _json_text("map", cfg, payload),
    }
    if cfg["cloud"]:
        rows = []
        for k, a in enumerate(fibonacci_sphere(cfg["cloud"])):
            rows.append([k, *a, *m(a)])
        files["cloud.csv"] = _csv_text("map", cfg, ["index", "a1", "a2", "a3", "out1", "out2", "out3"], rows,
                                       ["Fibonacci-sphere pure inputs and their images"])
    return files


def sweep_axis(r_g, steps):
    grid = np.linspace(-1.0, 1.0, steps) if steps > 1 else np.array([-1.0, 1.0])
    # the exact thermal point replaces any grid point that rounds onto it
    grid = grid[np.abs(grid - r_g) > 1e-12]
    return np.union1d(grid, [-1.0, 1.0, r_g])


def cmd_sweep_deltaD(cfg):
    maps, sol = _comparison(cfg)
    r_g = cfg["rG"]
    rows = []
    for a3 in sweep_axis(r_g, cfg["sweep_steps"]):
        a0 = (0.0, 0.0, float(a3))
        d = {k: delta_D(maps[k], a0, r_g) for k in ("PC", "E", "GP")}
        rows.append([float(a3), d["PC"], d["E"], d["GP"], d["GP"] - d["PC"]])
    notes = [f"solved J = {_fmt(sol.J)}, f3 = {_fmt(sol.f3)}",
             "deltaD = D(Phi[rho] || rho_G) in nats; delta = deltaD_GP - deltaD_PC"]
    return {"sweep_deltaD.csv": _csv_text("sweep-deltaD", cfg, ["a3", "dD_PC", "dD_E", "dD_GP", "delta"], rows, notes)}


def cmd_trajectories(cfg):
    maps, sol = _comparison(cfg)
    rows = []
    for label in ("PC", "E", "GP"):
        for start in parse_starts(cfg["starts"]):
            for k, a in enumerate(iterate(maps[label], NAMED_STATES[start], cfg["steps"])):
                rows.append([label, start, k, *a, l1_coherence(a)])
    notes = [f"solved J = {_fmt(sol.J)}, f3 = {_fmt(sol.f3)}", "l1 = |rho_01| + |rho_10|"]
    return {"trajectories.csv": _csv_text("trajectories", cfg, ["map", "start", "step", "a1", "a2", "a3", "l1"], rows, notes)}


def cmd_converge(cfg):
    maps, sol = _comparison(cfg)
    rows = []
    for label in ("PC", "E", "GP"):
        for start in parse_starts(cfg["starts"]):
            res = convergence_steps(maps[label], NAMED_STATES[start], cfg["eps"], cfg["n_max"])
            rows.append([label, start, res.steps, "true" if res.converged else "false"])
    notes = [f"solved J = {_fmt(sol.J)}, f3 = {_fmt(sol.f3)}",
             "steps = smallest n >= 1 with trace norm ||rho_(n+1) - rho_n||_1 < eps"]
    return {"converge.csv": _csv_text("converge", cfg, ["map", "start", "steps", "converged"], rows, notes)}


def cmd_verify(cfg):
    ids = CLAIM_IDS if cfg["claim"] == "all" else (cfg["claim"],)
    lines = []
    for cid in ids:
        report = run_claim(cid, trials=cfg["trials"] or None, seed=cfg["seed"], n=cfg["n"] or None)
        lines.append(report.to_json())
    meta = json.dumps({"meta": {"version": __version__, "command": "verify",
                                "config": {k: cfg[k] for k in sorted(cfg)}}}, sort_keys=True)
    return {"verify.jsonl": "\n".join([meta, *lines]) + "\n"}


def cmd_solve_gp(cfg):
    if cfg["rG"] is None:
        raise ConfigError("solve-gp needs rG")
    try:
        sol = solve_gp_constraints(cfg["b3"], cfg["rG"], cfg["f1"], cfg["f2"], cfg["t"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    files = {"solve_gp.json": _json_text("solve-gp", cfg, {"solution": sol.to_json()})}
    if not sol.feasible:
        raise _InfeasibleWithFiles(sol.infeasibility_reason.value, files)
    return files


class _InfeasibleWithFiles(Infeasible):
    """Infeasible, but the solver record is still worth writing."""

    def __init__(self, reason, files):
        super().__init__(reason, "Gibbs-preserving constraints are infeasible")
        self.files = files


COMMANDS = {
    "map": cmd_map,
    "sweep-deltaD": cmd_sweep_deltaD,
    "trajectories": cmd_trajectories,
    "converge": cmd_converge,
    "verify": cmd_verify,
    "solve-gp": cmd_solve_gp,
}

OVERRIDES = ("J", "h", "b3", "rG", "f1", "f2", "t")


def make_parser():
    parser = argparse.ArgumentParser(prog="qubitmaps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qubitmaps {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--out", metavar="DIR", default="out")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--claim", help=f"claim id for verify ({', '.join(CLAIM_IDS)} or all)")
    parser.add_argument("--construction", help=f"map constructor ({', '.join(CONSTRUCTIONS)})")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")
    for key in OVERRIDES:
        parser.add_argument(f"--{key}", metavar="X")
    return parser


def _write(out_dir, files):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(out / name)


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        raw = read_config_file(args.config) if args.config else {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            raw[key.strip()] = value.strip()
        for key in ("seed", "trials", "claim", "construction", *OVERRIDES):
            value = getattr(args, key)
            if value is not None:
                raw[key] = value
        cfg = build_config(raw)
        files = COMMANDS[args.command](cfg)
    except _InfeasibleWithFiles as exc:
        _write(args.out, exc.files)
        print(f"infeasible: {exc.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Infeasible as exc:
        print(f"infeasible: {exc.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, InvalidStateError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"invalid config: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except VacuousCheckError as exc:
        print(f"verification control failed: {exc}", file=sys.stderr)
        return 1
    _write(args.out, files)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
