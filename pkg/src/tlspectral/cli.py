"""Batch driver: configure a deformation parameter and a functor, run
the requested verification suites, and emit a machine-readable report.

Exit status: 0 when every requested check passes, 1 when a check
fails, 2 on configuration errors.  JSON reports carry the full
per-check residuals; CSV is a flat projection of the dimension table.
"""
import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_TOL, Tolerance
from .qfunctor import (
    EmbeddingFunctor,
    ProjectionFamilyFunctor,
    check_axioms,
    dimension_bounds,
    load_functor,
    make_embedding,
    make_fiber,
    make_weight_zero,
)
from .repcat import rep_category
from .spectral import (
    _atomic_write,
    build_algebra,
    commutativity_probe,
    linear_independence_check,
    structure_records,
)
from .subgroup import SubspaceFamily, check_family, full_family
from .tlcat import DualityDatum

__all__ = ["ConfigError", "RunConfig", "validate_config", "build_functor",
           "run", "main"]

CHECK_NAMES = ("axioms", "bounds", "algebra", "subgroup", "commutativity")
FUNCTOR_NAMES = ("embedding", "weight-zero", "fiber", "user-file")
ENV_EQ_TOL = "TLSPECTRAL_EQ_TOL"
ENV_RANK_TOL = "TLSPECTRAL_RANK_TOL"


class ConfigError(ValueError):
    """Invalid flags, environment, or input files; maps to exit 2."""


@dataclass(frozen=True)
class RunConfig:
    mu: float
    functor: str
    fiber_pairs: tuple = ()
    functor_file: str = None
    max_spin: int = 2
    max_word: int = 4
    checks: tuple = CHECK_NAMES
    tol: Tolerance = DEFAULT_TOL
    output: str = None
    fmt: str = "json"


def _float_env(env, key, fallback):
    raw = env.get(key)
    if raw is None:
        return fallback
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}")


def validate_config(ns, env=None):
    """Normalize parsed flags and the environment into a RunConfig."""
    env = os.environ if env is None else env
    mu = float(ns.mu)
    if not 0 < mu <= 1:
        raise ConfigError(f"mu must satisfy 0 < mu <= 1, got {mu}")
    if ns.functor not in FUNCTOR_NAMES:
        raise ConfigError(f"unknown functor {ns.functor!r}")

    pairs = ()
    if ns.fiber_pairs:
        if ns.functor != "fiber":
            raise ConfigError("--fiber-pairs only applies to the fiber functor")
        try:
            pairs = tuple(float(x) for x in str(ns.fiber_pairs).split(","))
        except ValueError:
            raise ConfigError(f"malformed fiber pairs {ns.fiber_pairs!r}")
        defect = abs(sum(l * l + mu * mu / (l * l) for l in pairs)
                     - (1 + mu * mu))
        if defect > 1e-9:
            raise ConfigError(f"fiber pair blocks violate the norm "
                              f"constraint, residual {defect:.3e}")
    elif ns.functor == "fiber":
        raise ConfigError("the fiber functor needs --fiber-pairs")

    if ns.functor == "user-file":
        if not ns.functor_file:
            raise ConfigError("the user-file functor needs --functor-file")
        if not os.path.exists(ns.functor_file):
            raise ConfigError(f"functor file not found: {ns.functor_file}")

    raw = [c for c in str(ns.checks or "").split(",") if c]
    for c in raw:
        if c not in CHECK_NAMES:
            raise ConfigError(f"unknown check {c!r}, pick from "
                              f"{','.join(CHECK_NAMES)}")
    checks = tuple(raw) if raw else CHECK_NAMES

    if ns.max_spin < 0:
        raise ConfigError("max-spin must be nonnegative")
    if ns.max_word < 1:
        raise ConfigError("max-word must be at least 1")

    eq = ns.eq_tol if ns.eq_tol is not None else \
        _float_env(env, ENV_EQ_TOL, DEFAULT_TOL.eq_tol)
    rank = ns.rank_tol if ns.rank_tol is not None else \
        _float_env(env, ENV_RANK_TOL, DEFAULT_TOL.rank_tol)
    try:
        tol = Tolerance(eq, rank)
    except ValueError as e:
        raise ConfigError(str(e))

    fmt = ns.format
    if fmt is None:
        fmt = "csv" if (ns.output or "").endswith(".csv") else "json"

    return RunConfig(mu=mu, functor=ns.functor, fiber_pairs=pairs,
                     functor_file=ns.functor_file, max_spin=int(ns.max_spin),
                     max_word=int(ns.max_word), checks=checks, tol=tol,
                     output=ns.output, fmt=fmt)


def build_functor(config):
    if config.functor == "embedding":
        return make_embedding(config.mu)
    if config.functor == "weight-zero":
        return make_weight_zero(config.mu)
    if config.functor == "fiber":
        datum = DualityDatum.pair_blocks(config.mu, config.fiber_pairs)
        return make_fiber(config.mu, datum)
    try:
        f = load_functor(config.functor_file)
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        raise ConfigError(f"malformed functor file: {e}")
    if abs(f.mu - config.mu) > 1e-12:
        raise ConfigError(f"functor file was built at mu={f.mu}, "
                          f"flags say mu={config.mu}")
    return f


# ----------------------------------------------------------------- checks


def _dimension_table(functor, max_spin, tol):
    cat = functor.category
    rows = []
    for n in range(max_spin + 1):
        c = cat.conjugate_irrep(n)
        try:
            b = dimension_bounds(functor, n, c, tol)
            rows.append({"grade": n, "mult": b.mult,
                         "qmult": b.qmult, "qmult_trace": b.qmult_trace,
                         "qdim": b.qdim})
        except ValueError as e:
            rows.append({"grade": n, "mult": functor.dim_irrep(n),
                         "qmult": None, "qmult_trace": None,
                         "qdim": c.intrinsic_dim, "error": str(e)})
    return rows


def _check_axioms(config, functor, ctx):
    rep = check_axioms(functor, max_len=config.max_word, tol=config.tol)
    return {"status": "pass" if rep.ok(config.tol) else "fail",
            "residual": rep.worst(), "detail": dict(rep.residuals)}


def _check_bounds(config, functor, ctx):
    rows = ctx["dimensions"]
    errors = [r["error"] for r in rows if "error" in r]
    if errors:
        return {"status": "fail", "residual": None,
                "detail": {"errors": errors}}
    gap = max((abs(r["qmult"] - r["qmult_trace"])
               for r in rows if r["mult"] > 0), default=0.0)
    return {"status": "pass", "residual": gap,
            "detail": {"route_gap": gap}}


def _algebra(config, functor, ctx):
    if "algebra" not in ctx:
        ctx["algebra"] = build_algebra(functor, config.max_spin,
                                       tol=config.tol, check=False)
    return ctx["algebra"]


def _rand_element(alg, rng):
    return alg.element({lab: complex(*rng.standard_normal(2))
                        for lab in alg.basis()})


def _check_algebra(config, functor, ctx):
    try:
        alg = _algebra(config, functor, ctx)
    except ValueError as e:
        return {"status": "fail", "residual": None,
                "detail": {"error": str(e)}}
    rng = np.random.default_rng(0)
    detail = {}
    worst = 0.0
    unit = 0.0
    for lab in alg.basis():
        x = alg.basis_element(lab)
        unit = max(unit, (alg.unit * x - x).h_norm(),
                   (x * alg.unit - x).h_norm())
    detail["unit"] = unit
    assoc = 0.0
    for _ in range(25):
        x, y, z = (_rand_element(alg, rng) for _ in range(3))
        assoc = max(assoc, ((x * y) * z - x * (y * z)).h_norm())
    detail["associativity"] = assoc
    star = 0.0
    anti = 0.0
    haar_gap = 0.0
    for _ in range(10):
        x, y = _rand_element(alg, rng), _rand_element(alg, rng)
        star = max(star, (x.star().star() - x).h_norm())
        anti = max(anti, ((x * y).star() - y.star() * x.star()).h_norm())
        haar_gap = max(haar_gap, abs(alg.inner_structure(x, y)
                                     - alg.inner_closed(x, y)))
    detail["star_involution"] = star
    detail["star_antimultiplicative"] = anti
    detail["haar_route_gap"] = haar_gap
    detail["gram_nondegenerate"] = bool(
        linear_independence_check(alg, tol=config.tol))
    worst = max(unit, assoc, star, anti, haar_gap)
    ok = worst <= config.tol.eq_tol * 10 and detail["gram_nondegenerate"]
    return {"status": "pass" if ok else "fail",
            "residual": worst, "detail": detail}


def _word_family(functor, max_word):
    if isinstance(functor, EmbeddingFunctor):
        return full_family(max_word)
    if isinstance(functor, ProjectionFamilyFunctor):
        return SubspaceFamily({r: functor.selection(r)
                               for r in range(max_word + 1)})
    return None


def _check_subgroup(config, functor, ctx):
    fam = _word_family(functor, config.max_word)
    if fam is None:
        return {"status": "skipped", "residual": None,
                "detail": {"note": "no canonical word subspace family "
                                   "for this functor"}}
    rep = check_family(fam, config.mu, max_len=config.max_word,
                       tol=config.tol)
    return {"status": "pass" if rep.ok(config.tol) else "fail",
            "residual": rep.worst(), "detail": dict(rep.residuals)}


def _check_commutativity(config, functor, ctx):
    try:
        alg = _algebra(config, functor, ctx)
    except ValueError as e:
        return {"status": "fail", "residual": None,
                "detail": {"error": str(e)}}
    probe = commutativity_probe(alg)
    return {"status": "pass" if probe <= config.tol.eq_tol * 10 else "fail",
            "residual": probe, "detail": {"largest_commutator": probe}}


_CHECKS = {
    "axioms": _check_axioms,
    "bounds": _check_bounds,
    "algebra": _check_algebra,
    "subgroup": _check_subgroup,
    "commutativity": _check_commutativity,
}


def run(config):
    """Execute the requested checks; returns (report, exit_code)."""
    functor = build_functor(config)
    ctx = {"dimensions": _dimension_table(functor, config.max_spin,
                                          config.tol)}
    entries = []
    failed = False
    for name in config.checks:
        t0 = time.perf_counter()
        entry = _CHECKS[name](config, functor, ctx)
        entry = {"name": name, **entry,
                 "wall_time": time.perf_counter() - t0}
        failed = failed or entry["status"] == "fail"
        entries.append(entry)

    stats = None
    if "algebra" in ctx:
        alg = ctx["algebra"]
        spin = min(2, config.max_spin)
        stats = {"grades": list(alg.grades),
                 "basis_size": len(alg.basis()),
                 "stats_spin": spin,
                 "nonzero_structure_constants":
                     len(structure_records(alg, spin))}

    report = {
        "schema_version": 1,
        "config": {
            "mu": config.mu,
            "functor": config.functor,
            "fiber_pairs": list(config.fiber_pairs),
            "functor_file": config.functor_file,
            "max_spin": config.max_spin,
            "max_word": config.max_word,
            "checks": list(config.checks),
            "eq_tol": config.tol.eq_tol,
            "rank_tol": config.tol.rank_tol,
        },
        "dimensions": ctx["dimensions"],
        "checks": entries,
        "structure_stats": stats,
    }
    return report, (1 if failed else 0)


def _render_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["grade", "mult", "qmult", "qdim"])
    for row in report["dimensions"]:
        w.writerow([row["grade"], row["mult"],
                    "" if row["qmult"] is None else repr(row["qmult"]),
                    repr(row["qdim"])])
    return buf.getvalue()


def write_report(report, config):
    text = _render_csv(report) if config.fmt == "csv" \
        else json.dumps(report, indent=1) + "\n"
    if config.output:
        _atomic_write(config.output, lambda fh: fh.write(text))
    else:
        sys.stdout.write(text)


def main(argv=None):
    p = argparse.ArgumentParser(
        prog="tlspectral",
        description="Verification driver for quasitensor functors and "
                    "their spectral *-algebras.")
    p.add_argument("--mu", type=float, required=True,
                   help="deformation parameter, 0 < mu <= 1")
    p.add_argument("--functor", required=True, choices=FUNCTOR_NAMES)
    p.add_argument("--fiber-pairs", default=None,
                   help="comma-separated pair parameters (fiber only)")
    p.add_argument("--functor-file", default=None,
                   help="saved functor data (user-file only)")
    p.add_argument("--max-spin", type=int, default=2,
                   help="largest grade kept in the algebra and tables")
    p.add_argument("--max-word", type=int, default=4,
                   help="largest word length for axiom and family checks")
    p.add_argument("--checks", default="",
                   help=f"comma subset of {','.join(CHECK_NAMES)}; "
                        f"empty runs all")
    p.add_argument("--eq-tol", type=float, default=None,
                   help=f"equality tolerance (env {ENV_EQ_TOL})")
    p.add_argument("--rank-tol", type=float, default=None,
                   help=f"rank tolerance (env {ENV_RANK_TOL})")
    p.add_argument("--output", default=None, help="report path; stdout "
                                                  "when omitted")
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help="inferred from the output suffix when omitted")
    ns = p.parse_args(argv)
    try:
        config = validate_config(ns)
        report, code = run(config)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    write_report(report, config)
    if config.output:
        for entry in report["checks"]:
            res = entry["residual"]
            shown = "-" if res is None else f"{res:.3e}"
            print(f"{entry['name']}: {entry['status']} ({shown})")
    return code


if __name__ == "__main__":
    sys.exit(main())
