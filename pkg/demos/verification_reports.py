"""Driving the batch verifier programmatically.

Same entry point as the `tlspectral` console script; here the report
dict is used directly.  Exit code 0 means every requested check
passed, 1 means a check failed, 2 a configuration error.
"""
import argparse

from tlspectral.cli import run, validate_config


def config(**kw):
    base = dict(mu=0.5, functor="weight-zero", fiber_pairs=None,
                functor_file=None, max_spin=3, max_word=4, checks="",
                eq_tol=None, rank_tol=None, output=None, format=None)
    base.update(kw)
    return validate_config(argparse.Namespace(**base), env={})


report, code = run(config(checks="axioms,bounds,algebra,subgroup"))
print(f"weight-zero at mu=0.5 -> exit {code}")
print("  grade  mult   qmult    qdim")
for row in report["dimensions"]:
    q = "-" if row["qmult"] is None else f"{row['qmult']:.4f}"
    print(f"  {row['grade']:>5}  {row['mult']:>4}  {q:>6}  "
          f"{row['qdim']:>7.4f}")
for c in report["checks"]:
    r = "-" if c["residual"] is None else f"{c['residual']:.2e}"
    print(f"  {c['name']:<14} {c['status']:<8} {r}")

# commutativity is a real assertion: it fails off the classical point
for mu in (1.0, 0.5):
    report, code = run(config(mu=mu, checks="commutativity"))
    probe = report["checks"][0]["residual"]
    print(f"\ncommutativity at mu={mu}: exit {code}, probe {probe:.2e}")

stats = report["structure_stats"]
print(f"\nstructure constants kept for the last run: "
      f"{stats['nonzero_structure_constants']} nonzero entries over "
      f"basis of {stats['basis_size']}")
