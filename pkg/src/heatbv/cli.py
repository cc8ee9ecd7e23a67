"""Config-driven experiment runner.

Subcommands: build-space, heat-verify, besov, bv, be, ineq, suite, summarize.
Reports are deterministic JSON (config hash + seed + space fingerprint
embedded, no timestamps); wall-clock metadata lives in a separate manifest.

Exit codes: 0 ok, 2 config error, 3 capacity, 4 numeric failure,
5 invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from . import batteries, bakry_emery, besov, bv, inequalities
from .errors import CapacityError, ConfigError, HeatBVError, InvariantViolation, NumericError
from .grids import geometric_grid, resolved_radius_grid, resolved_time_range
from .heat import gaussian_bound_fit, heat_invariant_residuals, spectral_decompose
from .space import (build_space, doubling_profile, load_space, save_space)

EXIT_CODES = {ConfigError: 2, CapacityError: 3, NumericError: 4, InvariantViolation: 5}

KNOWN_CONFIG_KEYS = {
    "space": {"builder", "file", "dim", "side", "h", "level", "legs", "leg_length", "subdivision"},
    "run": {"seed", "out", "suites", "cap"},
    "grids": {"points_per_decade", "tmin", "tmax", "tsteps"},
    "thresholds": {"pass", "flag"},
    "battery": {"size", "kind"},
}

DEFAULT_THRESHOLDS = {"pass": 3.0, "flag": 10.0}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}")
    for section, keys in cfg.items():
        if section not in KNOWN_CONFIG_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        if isinstance(keys, dict):
            bad = set(keys) - KNOWN_CONFIG_KEYS[section]
            if bad:
                raise ConfigError(f"unknown keys in [{section}]: {sorted(bad)}")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _space_from_args(args, cfg) -> tuple:
    section = dict(cfg.get("space", {}))
    cap = getattr(args, "cap", None) or cfg.get("run", {}).get("cap")
    if getattr(args, "space", None):
        return load_space(args.space, cap=cap), section
    if getattr(args, "builder", None):
        section["builder"] = args.builder
    if not section.get("builder") and not section.get("file"):
        raise ConfigError("no space given: pass --space FILE, --builder, or a [space] config section")
    if section.get("file"):
        return load_space(section["file"], cap=cap), section
    builder = section.pop("builder")
    params = {k: v for k, v in section.items() if k != "file"}
    for key in ("dim", "side", "level", "legs", "subdivision"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    if getattr(args, "h", None) is not None:
        params["h"] = args.h
    return build_space(builder, cap=cap, **params), {"builder": builder, **params}


class _Encoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)


def write_report(out_dir: Path, name: str, payload: dict, cfg: dict, seed: int, fingerprint: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {"report": name, "version": __version__, "configHash": config_hash(cfg),
           "seed": seed, "space": fingerprint, "data": payload}
    path = out_dir / f"{name}.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1, cls=_Encoder)
        fh.write("\n")
    return path


def append_manifest(out_dir: Path, files: list[Path]):
    manifest = {"generatedAt": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "files": sorted(p.name for p in files)}
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Suite pieces (shared by subcommands and `suite`)


def _time_grid(S, args, cfg, points_per_decade=8):
    g = cfg.get("grids", {})
    tmin = getattr(args, "tmin", None) or g.get("tmin")
    tmax = getattr(args, "tmax", None) or g.get("tmax")
    lo, hi = resolved_time_range(S.h, S.diameter)
    tmin = lo if tmin is None else float(tmin)
    tmax = hi if tmax is None else float(tmax)
    if not (lo * 0.999 <= tmin <= tmax <= hi * 1.001):
        raise ConfigError(f"time grid [{tmin:g}, {tmax:g}] outside resolved range [{lo:g}, {hi:g}]")
    steps = getattr(args, "tsteps", None) or g.get("tsteps")
    if steps:
        return np.geomspace(tmin, tmax, int(steps))
    return geometric_grid(tmin, tmax, points_per_decade)


def run_heat_suite(S, D, t_grid, seed) -> dict:
    residuals = heat_invariant_residuals(S, D, t_grid=t_grid, seed=seed)
    fit = gaussian_bound_fit(S, D, t_grid=t_grid, seed=seed)
    return {"residuals": residuals, "gaussianFit": fit.to_dict()}


def run_besov_suite(S, D, seed, p: float = 1.0, battery=None) -> dict:
    if battery is None:
        battery = (batteries.halfspace_indicators(S, seed=seed)
                   + batteries.smoothed_vectors(S, D, count=8, seed=seed)
                   + batteries.lipschitz_battery(S, count=6, seed=seed))
    r_grid = resolved_radius_grid(S.h, S.diameter, points_per_decade=8)
    ratios = []
    rows = []
    for name, f in battery:
        cmpres = besov.compare_seminorms(S, D, f, p, alpha=1.0, r_grid=r_grid)
        slope = besov.smoothness_exponent(cmpres.heat)
        rows.append({"function": name, "ratio": cmpres.ratio,
                     "heatSeminorm": cmpres.heat.seminorm,
                     "metricSeminorm": cmpres.metric.seminorm, "heatSlope": slope})
        if cmpres.heat.seminorm > 0:
            ratios.append(cmpres.ratio)
    spread = max(ratios) / min(ratios) if ratios else 1.0
    return {"p": p, "rows": rows, "ratioSpread": spread}


def run_bv_suite(S, seed, alpha_list=(0.05, 0.1, 0.2)) -> dict:
    sets = batteries.halfspace_indicators(S, count=4, seed=seed) + [
        (name, members.astype(float)) for name, members in batteries.random_sets(S, 4, seed=seed)]
    rows = []
    hp_cs = []
    for name, f in sets:
        members = f > 0.5
        rep = bv.coarea_bv(S, f)
        hp = bv.check_hausdorff_perimeter(S, members, alpha_list)
        rows.append({"set": name, "perimeter": bv.perimeter(S, members),
                     "bvEnergy": rep.bvEnergy, "sobolevEnergy": rep.sobolevEnergy,
                     "hausdorffPerimeterC": hp["fittedC"]})
        if hp["fittedC"] > 0:
            hp_cs.append(hp["fittedC"])
    return {"rows": rows,
            "hausdorffPerimeterC": max(hp_cs) if hp_cs else 0.0,
            "hausdorffPerimeterStability": (max(hp_cs) / min(hp_cs)) if hp_cs else 1.0}


def run_be_suite(S, D, t_grid, seed, checks=("weak", "quasi", "hamilton", "pseudo", "cross", "riesz"),
                 p: float = 2.0) -> list[dict]:
    reports = []
    for check in checks:
        if check == "weak":
            reports.append(bakry_emery.weak_be_constant(S, D, t_grid, seed=seed).to_dict())
        elif check == "quasi":
            reports.append(bakry_emery.quasi_be_constant(S, D, t_grid, seed=seed).to_dict())
        elif check == "hamilton":
            reports.append(bakry_emery.hamilton_check(S, D, t_grid, seed=seed).to_dict())
        elif check == "pseudo":
            for pp in (1.0, 2.0, 4.0):
                reports.append(bakry_emery.pseudo_poincare_check(S, D, pp, t_grid=t_grid, seed=seed).to_dict())
        elif check == "cross":
            reports.append(bakry_emery.cross_term_check(S, D, p, t_grid=t_grid, seed=seed).to_dict())
        elif check == "riesz":
            reports.append(bakry_emery.riesz_check(S, D, p, seed=seed).to_dict())
        elif check == "kernel-gradient":
            reports.append(bakry_emery.kernel_gradient_bound(S, D, t_grid, seed=seed).to_dict())
        else:
            raise ConfigError(f"unknown curvature check '{check}'")
    return reports


def run_ineq_suite(S, seed, p: float = 1.0, delta: float = 1.0) -> dict:
    prof = doubling_profile(S, seed=seed)
    Q = max(prof.Q, 1.01)
    sets = batteries.halfspace_indicators(S, count=4, seed=seed)
    weak_cs, iso_cs, sob_cs, frac_cs = [], [], [], []
    rows = []
    for name, f in sets:
        members = f > 0.5
        rec_weak = inequalities.weak_embedding_check(S, f, p, min(delta, 0.9 * Q / p), Q)
        rec_frac = inequalities.fractional_isoperimetry(S, members, min(delta, 0.9 * Q), Q)
        rec_sob = inequalities.bv_sobolev_check(S, f, Q)
        rec_iso = inequalities.isoperimetric_check(S, members, Q)
        rows.append({"set": name, "weakEmbedding": rec_weak.to_dict(),
                     "fracIso": rec_frac.to_dict(), "bvSobolev": rec_sob.to_dict(),
                     "isoperimetric": rec_iso.to_dict()})
        for lst, rec in ((weak_cs, rec_weak), (frac_cs, rec_frac), (sob_cs, rec_sob), (iso_cs, rec_iso)):
            if rec.constant > 0:
                lst.append(rec.constant)
    def spread(v):
        return max(v) / min(v) if v else 1.0
    return {"doubling": prof.to_dict(), "rows": rows,
            "spreads": {"weakEmbedding": spread(weak_cs), "fracIso": spread(frac_cs),
                        "bvSobolev": spread(sob_cs), "isoperimetric": spread(iso_cs)}}


def build_summary(reports: dict, thresholds: dict) -> list[dict]:
    """One row per verified inequality: tag, fitted constant, stability, status."""
    def status(stab):
        if not np.isfinite(stab):
            return "flag"
        if stab <= thresholds["pass"]:
            return "pass"
        return "flag" if stab <= thresholds["flag"] else "fail"

    rows = []
    if "besov" in reports:
        s = reports["besov"]["ratioSpread"]
        rows.append({"check": "besov-equivalence", "constant": s, "stability": s, "status": status(s)})
    if "be" in reports:
        for rep in reports["be"]:
            tag = {"weak": "weak-curvature", "quasi": "quasi-curvature",
                   "hamilton": "hamilton-gradient", "pseudoPoincare": "pseudo-poincare",
                   "crossTerm": "kernel-cross-term", "riesz": "riesz-comparability",
                   "kernelGradient": "kernel-gradient"}[rep["kind"]]
            if rep.get("p") is not None:
                tag += f"-p{rep['p']:g}"
            rows.append({"check": tag, "constant": rep["constant"],
                         "stability": rep["stability"], "status": status(rep["stability"])})
    if "bv" in reports:
        stab = reports["bv"]["hausdorffPerimeterStability"]
        rows.append({"check": "hausdorff-perimeter", "constant": reports["bv"]["hausdorffPerimeterC"],
                     "stability": stab, "status": status(stab)})
    if "ineq" in reports:
        for tag, spread in reports["ineq"]["spreads"].items():
            rows.append({"check": tag, "constant": spread, "stability": spread,
                         "status": status(spread)})
    return rows


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_build_space(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    out = args.out or "space.json"
    save_space(S, out)
    print(f"wrote {out}: {S.fingerprint()}")
    return 0


def cmd_heat_verify(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    seed = _seed(args, cfg)
    D = spectral_decompose(S)
    t_grid = _time_grid(S, args, cfg)
    payload = run_heat_suite(S, D, t_grid, seed)
    out_dir = Path(args.out or "reports")
    path = write_report(out_dir, "heat", payload, cfg, seed, S.fingerprint())
    append_manifest(out_dir, [path])
    worst = max(payload["residuals"].values())
    print(f"heat-verify: worst residual {worst:.3e}, report {path}")
    return 0


def cmd_besov(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    seed = _seed(args, cfg)
    D = spectral_decompose(S)
    f = _battery_function(S, D, args.battery, seed)
    p, alpha = args.p, args.alpha
    profiles = []
    if args.kind in ("heat", "both"):
        profiles.append(besov.heat_besov_profile(S, D, f, p, alpha=alpha / 2.0))
    if args.kind in ("metric", "both"):
        profiles.append(besov.metric_besov_profile(S, f, p, alpha=alpha))
    out = Path(args.out or "besov.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "scale", "energy", "scaled_energy"])
        for prof in profiles:
            for s, e in zip(prof.grid, prof.energies):
                w.writerow([prof.kind, s, e, e * s ** (-prof.alpha)])
    sidecar = {"profiles": [dict(prof.to_dict(), slope=besov.smoothness_exponent(prof))
                            for prof in profiles]}
    with open(out.with_suffix(".json"), "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=1, cls=_Encoder)
    print(f"besov: wrote {out} and {out.with_suffix('.json')}")
    return 0


def cmd_bv(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    seed = _seed(args, cfg)
    f = _function_arg(S, args.function, seed)
    rep = bv.coarea_bv(S, f)
    alpha_list = [float(a) for a in (args.alpha_list or "0.05,0.1,0.2").split(",")]
    eps_list = ([float(e) for e in args.eps_list.split(",")] if args.eps_list
                else [2.0 * S.h, 4.0 * S.h])
    relaxed = bv.relaxed_bv(S, f, eps_list)
    hp = bv.check_hausdorff_perimeter(S, f > 0.5, alpha_list) if set(np.unique(f)) <= {0.0, 1.0} else None
    out_dir = Path(args.out or "reports")
    payload = {"coarea": rep.to_dict(), "relaxedBV": relaxed,
               "hausdorffPerimeter": hp}
    path = write_report(out_dir, "bv", payload, cfg, seed, S.fingerprint())
    with open(out_dir / "bv_levels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "gap", "perimeter"])
        for lvl, gap, per in zip(rep.levels[:-1], rep.gaps, rep.perimeters):
            w.writerow([lvl, gap, per])
    append_manifest(out_dir, [path])
    print(f"bv: energy {rep.bvEnergy:.6g} over {len(rep.gaps)} gaps, report {path}")
    return 0


def cmd_be(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    seed = _seed(args, cfg)
    D = spectral_decompose(S)
    t_grid = _time_grid(S, args, cfg)
    checks = (("weak", "quasi", "hamilton", "pseudo", "cross", "riesz")
              if args.check == "all" else (args.check,))
    reports = run_be_suite(S, D, t_grid, seed, checks=checks, p=args.p)
    out_dir = Path(args.out or "reports")
    path = write_report(out_dir, "be", {"reports": reports}, cfg, seed, S.fingerprint())
    append_manifest(out_dir, [path])
    for rep in reports:
        ptag = "" if rep["p"] is None else f" p={rep['p']:g}"
        print(f"be[{rep['kind']}{ptag}]: "
              f"constant {rep['constant']:.6g}, stability {rep['stability']:.3g}")
    return 0


def cmd_ineq(args, cfg) -> int:
    seed = _seed(args, cfg)
    out_dir = Path(args.out or "reports")
    if args.check == "koch" or args.koch:
        resolutions = [int(r) for r in (args.koch or "257,513").split(",")]
        payload = inequalities.koch_study(resolutions)
        path = write_report(out_dir, "koch", payload, cfg, seed, {"kind": "pixel-grid"})
        append_manifest(out_dir, [path])
        for row in payload["rows"]:
            print(f"koch[{row['resolution']}]: exponent {row['exponent']:.4f} "
                  f"(target {row['targetExponent']:.4f}), control {row['controlExponent']:.4f}")
        return 0
    S, _ = _space_from_args(args, cfg)
    payload = run_ineq_suite(S, seed, p=args.p, delta=args.delta)
    path = write_report(out_dir, "ineq", payload, cfg, seed, S.fingerprint())
    with open(out_dir / "ineq_scales.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["set", "check", "constant"])
        for row in payload["rows"]:
            for check in ("weakEmbedding", "fracIso", "bvSobolev", "isoperimetric"):
                w.writerow([row["set"], check, row[check]["constant"]])
    append_manifest(out_dir, [path])
    print(f"ineq: Q = {payload['doubling']['Q']:.3f}, report {path}")
    return 0


def cmd_suite(args, cfg) -> int:
    S, _ = _space_from_args(args, cfg)
    seed = _seed(args, cfg)
    out_dir = Path(args.out or cfg.get("run", {}).get("out", "reports"))
    thresholds = {**DEFAULT_THRESHOLDS, **cfg.get("thresholds", {})}
    D = spectral_decompose(S)
    t_grid = _time_grid(S, args, cfg)
    fp = S.fingerprint()
    reports = {
        "heat": run_heat_suite(S, D, t_grid, seed),
        "besov": run_besov_suite(S, D, seed),
        "bv": run_bv_suite(S, seed),
        "be": run_be_suite(S, D, t_grid, seed),
        "ineq": run_ineq_suite(S, seed),
    }
    files = [write_report(out_dir, name,
                          {"reports": payload} if name == "be" else payload,
                          cfg, seed, fp)
             for name, payload in reports.items()]
    summary = build_summary(reports, thresholds)
    files.append(write_report(out_dir, "summary", {"rows": summary}, cfg, seed, fp))
    append_manifest(out_dir, files)
    for row in summary:
        print(f"{row['status']:>5}  {row['check']:<28} constant {row['constant']:.6g}")
    return 0


def cmd_summarize(args, cfg) -> int:
    report_dir = Path(args.reports)
    if not report_dir.is_dir():
        raise ConfigError(f"report directory not found: {report_dir}")
    thresholds = {**DEFAULT_THRESHOLDS, **cfg.get("thresholds", {})}
    by_space: dict[str, dict] = {}
    for path in sorted(report_dir.glob("*.json")):
        if path.name in ("manifest.json", "summary.json"):
            continue
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"warning: skipping unreadable report {path.name}: {exc}", file=sys.stderr)
            continue
        if "report" not in doc or "data" not in doc:
            print(f"warning: skipping non-report file {path.name}", file=sys.stderr)
            continue
        key = json.dumps(doc.get("space", {}), sort_keys=True)
        group = by_space.setdefault(key, {})
        name = doc["report"]
        group[name] = doc["data"]["reports"] if name == "be" else doc["data"]
    out = Path(args.out or (report_dir / "summary.csv"))
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["space", "check", "constant", "stability", "status"])
        for key, group in sorted(by_space.items()):
            for row in build_summary(group, thresholds):
                w.writerow([key, row["check"], row["constant"], row["stability"], row["status"]])
    print(f"summarize: wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# Plumbing


def _seed(args, cfg) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    run = cfg.get("run", {})
    if "seed" in run:
        return int(run["seed"])
    return 0


def _battery_function(S, D, name: str, seed: int) -> np.ndarray:
    table = dict(batteries.halfspace_indicators(S, seed=seed)
                 + batteries.lipschitz_battery(S, seed=seed)
                 + batteries.smoothed_vectors(S, D, count=4, seed=seed))
    if name not in table:
        raise ConfigError(f"unknown battery function '{name}'; known: {sorted(table)}")
    return table[name]


def _function_arg(S, spec: str, seed: int) -> np.ndarray:
    if spec.endswith(".json"):
        with open(spec) as fh:
            vals = json.load(fh)
        f = np.asarray(vals, dtype=float)
        if f.shape != (S.n,):
            raise ConfigError(f"function file has {f.shape} values, expected ({S.n},)")
        return f
    table = dict(batteries.halfspace_indicators(S, seed=seed)
                 + batteries.lipschitz_battery(S, seed=seed))
    if spec not in table:
        raise ConfigError(f"unknown builtin function '{spec}'; known: {sorted(table)}")
    return table[spec]


def _add_space_args(p: argparse.ArgumentParser):
    p.add_argument("--space", help="space JSON file")
    p.add_argument("--builder", choices=["lattice", "torus", "gasket", "spider"])
    p.add_argument("--dim", type=int)
    p.add_argument("--side", type=int)
    p.add_argument("--h", type=float)
    p.add_argument("--level", type=int)
    p.add_argument("--legs", type=int)
    p.add_argument("--subdivision", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heatbv",
                                 description="Heat kernels, Besov seminorms and BV checks on graph Dirichlet spaces")
    ap.add_argument("--config", help="TOML experiment config")
    ap.add_argument("--seed", type=int, help="seed overriding the config")
    ap.add_argument("--cap", type=int, help="vertex capacity for the dense eigensolver")
    ap.add_argument("--out", dest="global_out", metavar="OUT",
                    help="default output path for the subcommand")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-space", help="construct a space and save it as JSON")
    _add_space_args(p)
    p.add_argument("--out")

    p = sub.add_parser("heat-verify", help="semigroup invariants and the Gaussian kernel fit")
    _add_space_args(p)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--tsteps", type=int)
    p.add_argument("--out")

    p = sub.add_parser("besov", help="heat/metric seminorm profile of one battery function")
    _add_space_args(p)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kind", choices=["heat", "metric", "both"], default="both")
    p.add_argument("--battery", default="halfspace[axis0]")
    p.add_argument("--out")

    p = sub.add_parser("bv", help="co-area BV report for one function")
    _add_space_args(p)
    p.add_argument("--function", required=True, help="builtin name or JSON array file")
    p.add_argument("--alpha-list", dest="alpha_list")
    p.add_argument("--eps-list", dest="eps_list")
    p.add_argument("--out")

    p = sub.add_parser("be", help="curvature-condition constant estimation")
    _add_space_args(p)
    p.add_argument("--check", default="all",
                   choices=["weak", "quasi", "hamilton", "kernel-gradient", "pseudo", "cross", "riesz", "all"])
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--tsteps", type=int)
    p.add_argument("--out")

    p = sub.add_parser("ineq", help="embedding / isoperimetric verifications")
    _add_space_args(p)
    p.add_argument("--koch", help="comma-separated snowflake resolutions")
    p.add_argument("--check", default="all",
                   choices=["weak", "fraciso", "sobolev", "iso", "koch", "all"])
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--out")

    p = sub.add_parser("suite", help="run every suite and emit 6 reports")
    _add_space_args(p)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--tsteps", type=int)
    p.add_argument("--out")

    p = sub.add_parser("summarize", help="fold report JSONs into a summary CSV")
    p.add_argument("reports")
    p.add_argument("--out")
    return ap


HANDLERS = {
    "build-space": cmd_build_space,
    "heat-verify": cmd_heat_verify,
    "besov": cmd_besov,
    "bv": cmd_bv,
    "be": cmd_be,
    "ineq": cmd_ineq,
    "suite": cmd_suite,
    "summarize": cmd_summarize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "out", None) is None:
        args.out = args.global_out
    try:
        cfg = load_config(args.config)
        return HANDLERS[args.command](args, cfg)
    except HeatBVError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for cls, code in EXIT_CODES.items():
            if isinstance(exc, cls):
                return code
        return 1


if __name__ == "__main__":
    sys.exit(main())
