"""Graded *-algebra of an ergodic action, rebuilt from a functor.

Each grade is an irreducible with nonzero functor space; the graded
component is the conjugate functor space tensored with the carrier, so
a basis element is a triple (grade, functor index, carrier index).
Products expand over the fusion ladder with one coefficient matrix per
fused grade on each side (functor and carrier); the involution pushes
the standardized conjugate solutions through the functor; the Haar
state reads off the unit coefficient.  The closed-form inner product it
induces is kept alongside the structure-constant evaluation as an
independent cross-check.

No completion is attempted: the algebra is the dense spectral part with
exact structure constants, and all norms here are the Haar (GNS)
seminorm.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_TOL, dagger, residual
from .qfunctor import check_axioms, push_conjugate
from .repcat import IrrepLabel, ObjectWord, standardize_conjugate
from .tlcat import q_number

__all__ = [
    "BasisLabel",
    "AlgebraElement",
    "HaarState",
    "SpectralAlgebra",
    "build_algebra",
    "haar_inner_product",
    "MultiplicityMap",
    "multiplicity_map",
    "intertwining_residual",
    "linear_independence_check",
    "InducedIsomorphism",
    "induce_isomorphism",
    "commutativity_probe",
    "structure_records",
    "save_structure",
    "load_structure",
]


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Basis element T_i-bar (x) e_a of the grade-n component."""

    n: int
    i: int
    a: int


class AlgebraElement:
    """Finitely supported combination of basis labels, tied to its
    algebra for products, star and the Haar seminorm.

    Stored as one coefficient matrix per grade (functor index by
    carrier index), which keeps products, star and inner products in
    matrix arithmetic even when grades are large."""

    __slots__ = ("algebra", "parts")

    def __init__(self, algebra, coeffs=None):
        self.algebra = algebra
        self.parts = {}
        if not coeffs:
            return
        if isinstance(coeffs, dict) and coeffs \
                and isinstance(next(iter(coeffs)), BasisLabel):
            for lab, c in coeffs.items():
                c = complex(c)
                if c != 0:
                    self._block(lab.n)[lab.i, lab.a] += c
        else:
            for n, m in coeffs.items():
                m = np.asarray(m, dtype=np.complex128)
                if m.shape != (algebra.dim(n), n + 1):
                    raise ValueError(f"grade {n} block has shape {m.shape}, "
                                     f"expected {(algebra.dim(n), n + 1)}")
                if m.any():
                    self.parts[n] = m.copy()
        self._prune()

    def _block(self, n):
        p = self.parts.get(n)
        if p is None:
            p = self.parts[n] = np.zeros((self.algebra.dim(n), n + 1),
                                         dtype=np.complex128)
        return p

    def _prune(self):
        for n in [k for k, p in self.parts.items() if not p.any()]:
            del self.parts[n]
        return self

    @classmethod
    def _raw(cls, algebra, parts):
        el = cls(algebra)
        el.parts = parts
        return el._prune()

    # -- linear structure --------------------------------------------

    def _binop(self, other, sign):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            return NotImplemented
        out = {n: p.copy() for n, p in self.parts.items()}
        for n, p in other.parts.items():
            if n in out:
                out[n] = out[n] + sign * p
            else:
                out[n] = sign * p
        return AlgebraElement._raw(self.algebra, out)

    def __add__(self, other):
        return self._binop(other, 1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return AlgebraElement._raw(self.algebra,
                                   {n: -p for n, p in self.parts.items()})

    def scale(self, c):
        c = complex(c)
        return AlgebraElement._raw(self.algebra,
                                   {n: c * p for n, p in self.parts.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra.product(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    # -- algebra structure -------------------------------------------

    def star(self):
        return self.algebra.star(self)

    def haar(self):
        return self.algebra.haar(self)

    def h_norm(self):
        return self.algebra.h_norm(self)

    def coeff(self, n, i=None, a=None):
        if isinstance(n, BasisLabel):
            n, i, a = n.n, n.i, n.a
        p = self.parts.get(n)
        return complex(p[i, a]) if p is not None else 0j

    def items(self):
        """Nonzero (label, coefficient) pairs, sorted."""
        for n in sorted(self.parts):
            p = self.parts[n]
            for i, a in zip(*[idx.tolist() for idx in np.nonzero(p)]):
                yield BasisLabel(n, i, a), complex(p[i, a])

    @property
    def coeffs(self):
        return dict(self.items())

    @property
    def support(self):
        return [lab for lab, _ in self.items()]

    def grades(self):
        return sorted(self.parts)

    def grade_part(self, n):
        p = self.parts.get(n)
        return AlgebraElement._raw(self.algebra,
                                   {n: p.copy()} if p is not None else {})

    def __repr__(self):
        terms = [f"({lab.n},{lab.i},{lab.a}):{c:.3g}" for lab, c in self.items()]
        return "<" + (" + ".join(terms) if terms else "0") + ">"


class HaarState:
    """The invariant state: 1 on the unit, 0 on every other basis
    element.  Positivity and faithfulness show up as positive
    definiteness of the Gram matrix it induces."""

    def __init__(self, algebra):
        self.algebra = algebra

    def __call__(self, a):
        return self.algebra.haar(a)


class SpectralAlgebra:
    """Structure constants, involution and Haar state of the dense
    spectral *-algebra attached to a quasitensor functor.

    Tables for grade pairs up to max_spin are built eagerly; pairs met
    later (products can leave the truncation, and are kept exactly) are
    tabulated on demand and cached.  The finished tables are immutable.
    """

    def __init__(self, functor, max_spin, tol=DEFAULT_TOL, check=True,
                 axiom_len=4):
        if max_spin < 0:
            raise ValueError("max_spin must be nonnegative")
        self.functor = functor
        self.category = functor.category
        self.mu = functor.mu
        self.tol = tol
        self.max_spin = int(max_spin)
        if check:
            report = check_axioms(functor, max_len=axiom_len, tol=tol)
            if not report.ok(tol):
                raise ValueError(
                    f"functor fails the axioms, refusing to build: "
                    f"{report.failures(tol)}")
        self.grades = [n for n in range(self.max_spin + 1)
                       if functor.dim_irrep(n) > 0]
        self._grade = {}
        self._tables = {}
        for n in self.grades:
            self._grade_data(n)
        for n in self.grades:
            for m in self.grades:
                self.pair_table(n, m)
        self.haar_state = HaarState(self)

    # -- grade data ---------------------------------------------------

    def dim(self, n):
        return self.functor.dim_irrep(n)

    # A grade needs a pushed conjugate solution together with the
    # category solution it came from, in a single consistent gauge.
    # The star matrices conj(Jhat) (x) dagger(M)^-1 and the metric
    # Jhat* Jhat / |R|^2 are invariant under rescaling the solution, so
    # any gauge serves.  Direct pushes cost word-length 2n work and are
    # used while feasible; past that the grade is fused from two
    # smaller ones through the top fusion cell, which keeps every
    # matrix at carrier size.

    def _grade_data(self, n):
        if n not in self._grade:
            d = self.dim(n)
            if d == 0:
                z = np.zeros((0, 0), dtype=np.complex128)
                self._grade[n] = {"jhat": z, "fside": z, "hside": z,
                                  "metric": z, "cat_R": None, "norm2": 1.0}
                return self._grade[n]
            if self.functor.irrep_push_feasible(n):
                c = standardize_conjugate(self.category.conjugate_irrep(n))
                pushed = push_conjugate(self.functor, IrrepLabel(n), c,
                                        self.tol)
                jhat = pushed.J.mat
                cat_r = c.R.reshape(-1, 1)
                m_cat = c.j.mat
            else:
                jhat, m_cat, cat_r = self._fused_grade(n)
            norm2 = float(np.linalg.norm(cat_r)) ** 2
            qdim = q_number(n + 1, self.mu + 1.0 / self.mu)
            scalar = (-1) ** n * norm2 / qdim
            defect = residual(jhat @ np.conj(jhat) - scalar * np.eye(d))
            if defect > 1e-6 * max(1.0, abs(scalar)):
                raise ValueError(f"grade {n} conjugate data fails the "
                                 f"involution identity, residual {defect:.3e}")
            self._grade[n] = {
                "jhat": jhat,
                "fside": np.conj(jhat),
                "hside": np.linalg.inv(dagger(m_cat)),
                "metric": (dagger(jhat) @ jhat) / norm2,
                "cat_R": cat_r,
                "norm2": norm2,
            }
        return self._grade[n]

    def _fused_grade(self, alpha):
        """Grade data assembled from a split alpha = n + m: nest the
        two smaller solutions into the product object and compress both
        sides with the top fusion cell."""
        for n in sorted(range(1, alpha), key=lambda k: (abs(k - alpha / 2), k)):
            m = alpha - n
            if self.dim(n) > 0 and self.dim(m) > 0:
                break
        else:
            raise ValueError(f"grade {alpha} admits no fusion split with "
                             f"nonzero functor spaces")
        gn, gm = self._grade_data(n), self._grade_data(m)
        s_nm = next(s for g, s in self.category.fusion(n, m) if g == alpha)
        s_mn = next(s for g, s in self.category.fusion(m, n) if g == alpha)

        # the nested product solution is an outer product of the two
        # solution matrices, (m n)-conjugate slots against (n m) ones,
        # so both compressions contract it as matrices
        jn_cat = gn["cat_R"].reshape(n + 1, n + 1)
        jm_cat = gm["cat_R"].reshape(m + 1, m + 1)
        nest = np.einsum("ik,bc->bikc", jn_cat, jm_cat).reshape(
            (m + 1) * (n + 1), (n + 1) * (m + 1))
        m_cat = dagger(s_mn) @ nest @ np.conj(s_nm)
        cat_r = m_cat.reshape(-1, 1)

        dn, dm = self.dim(n), self.dim(m)
        incl_nm = self.functor.incl_irrep(n, m)
        incl_mn = self.functor.incl_irrep(m, n)
        if incl_nm.shape[0] != dn * dm or incl_mn.shape[0] != dn * dm:
            # proper inclusions discard the part of F(R) the nesting
            # identity relies on, so fusing would silently be wrong
            raise ValueError(
                f"grade {alpha} is beyond the direct push range and the "
                f"functor is not tensor-type on the ({n}, {m}) split")
        nest_hat = np.einsum("ik,bc->bikc", gn["jhat"], gm["jhat"]).reshape(
            dm * dn, dn * dm)
        s_hat = dagger(incl_nm) @ self.functor.fusion_image(n, m, alpha, s_nm)
        t_hat = dagger(incl_mn) @ self.functor.fusion_image(m, n, alpha, s_mn)
        jhat = dagger(t_hat) @ nest_hat @ np.conj(s_hat)
        return jhat, m_cat, cat_r

    def pair_table(self, n, m):
        """Structure-constant cells for the product of grade n by grade
        m: per fused grade, the functor-side and carrier-side
        coefficient matrices."""
        key = (n, m)
        if key not in self._tables:
            if self.dim(n) == 0 or self.dim(m) == 0:
                raise ValueError(f"grades {key} are not both spectral")
            s_irr = self.functor.incl_irrep(n, m)
            cells = []
            for alpha, s in self.category.fusion(n, m):
                if self.dim(alpha) == 0:
                    continue
                f_img = self.functor.fusion_image(n, m, alpha, s)
                cells.append((alpha, dagger(s_irr) @ f_img, dagger(s)))
            self._tables[key] = tuple(cells)
        return self._tables[key]

    # -- elements -----------------------------------------------------

    def zero(self):
        return AlgebraElement(self, {})

    @property
    def unit(self):
        return AlgebraElement(self, {BasisLabel(0, 0, 0): 1.0})

    def basis_element(self, n, i=0, a=0):
        lab = n if isinstance(n, BasisLabel) else BasisLabel(n, i, a)
        if not (0 <= lab.i < self.dim(lab.n) and 0 <= lab.a <= lab.n):
            raise ValueError(f"label {lab} out of range")
        return AlgebraElement(self, {lab: 1.0})

    def element(self, coeffs):
        return AlgebraElement(self, coeffs)

    def basis(self, max_spin=None):
        ms = self.max_spin if max_spin is None else int(max_spin)
        return [BasisLabel(n, i, a)
                for n in range(ms + 1) if self.dim(n) > 0
                for i in range(self.dim(n))
                for a in range(n + 1)]

    # -- product ------------------------------------------------------

    def product(self, a, b):
        out = {}
        for n, cx in a.parts.items():
            for m, cy in b.parts.items():
                w = np.einsum("ia,jb->ijab", cx, cy).reshape(
                    cx.shape[0] * cy.shape[0], cx.shape[1] * cy.shape[1])
                for alpha, mf, mh in self.pair_table(n, m):
                    blk = mf.T @ w @ mh.T
                    if alpha in out:
                        out[alpha] = out[alpha] + blk
                    else:
                        out[alpha] = blk
        return AlgebraElement._raw(self, out)

    def product_basis(self, x, y):
        """Structure constants of a basis-pair product as a coefficient
        map."""
        return (self.basis_element(x) * self.basis_element(y)).coeffs

    # -- involution ---------------------------------------------------

    def star(self, a):
        out = {}
        for n, c in a.parts.items():
            data = self._grade_data(n)
            out[n] = data["fside"] @ np.conj(c) @ data["hside"].T
        return AlgebraElement._raw(self, out)

    # -- Haar state and inner products --------------------------------

    def haar(self, a):
        p = a.parts.get(0)
        return complex(p[0, 0]) if p is not None else 0j

    def inner_structure(self, a, b):
        """h(a* b) via the structure constants."""
        return self.haar(self.product(self.star(a), b))

    def inner_closed(self, a, b):
        """h(a* b) via the closed form: grades and carrier indices must
        match, and the functor indices pair through the pushed-solution
        metric scaled by the unit fusion coefficient."""
        total = 0j
        for n, cx in a.parts.items():
            cy = b.parts.get(n)
            if cy is not None:
                total += np.einsum("ia,ik,ka->", np.conj(cx),
                                   self._grade_data(n)["metric"], cy)
        return complex(total)

    def h_norm(self, a):
        return float(np.sqrt(max(self.inner_closed(a, a).real, 0.0)))

    def gram(self, max_spin=None):
        """Gram matrix of the basis under the Haar inner product."""
        labs = self.basis(max_spin)
        g = np.zeros((len(labs), len(labs)), dtype=np.complex128)
        for r, lx in enumerate(labs):
            for c, ly in enumerate(labs):
                if lx.n == ly.n and lx.a == ly.a:
                    g[r, c] = self._grade_data(lx.n)["metric"][lx.i, ly.i]
        return g


def build_algebra(functor, max_spin, tol=DEFAULT_TOL, check=True):
    """Spectral *-algebra of the functor, with product tables for all
    grade pairs up to max_spin.  Refuses functors failing the axiom
    check unless check=False."""
    return SpectralAlgebra(functor, max_spin, tol=tol, check=check)


def haar_inner_product(a, b, algebra=None, tol=DEFAULT_TOL):
    """h(a* b), computed independently from the structure constants and
    from the closed form; the two routes must agree."""
    alg = algebra if algebra is not None else a.algebra
    v1 = alg.inner_structure(a, b)
    v2 = alg.inner_closed(a, b)
    scale = max(1.0, abs(v1))
    if abs(v1 - v2) > 1e-8 * scale:
        raise ValueError(f"Haar inner product routes disagree: {v1} vs {v2}")
    return v1


# ------------------------------------------------------ multiplicity maps


@dataclass
class MultiplicityMap:
    """Algebra-valued matrix whose k-th row lists the images of the
    carrier basis under the k-th functor basis vector."""

    object: object
    entries: list  # entries[k][a] = AlgebraElement

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def coisometry_residual(self):
        """Largest h-norm defect of c c* = identity."""
        rows, cols = self.shape
        if rows == 0:
            return 0.0
        alg = self.entries[0][0].algebra
        worst = 0.0
        for k in range(rows):
            for l in range(rows):
                acc = alg.zero()
                for a in range(cols):
                    acc = acc + self.entries[k][a] * self.entries[l][a].star()
                if k == l:
                    acc = acc - alg.unit
                worst = max(worst, acc.h_norm())
        return worst


def _word_functor_slots(algebra, r):
    """(grade, functor-side slot map into F(word r), carrier slot
    isometry) per decomposition slot."""
    f = algebra.functor
    cat = algebra.category
    out = []
    for k, v in cat.decompose(r).parts_raw:
        if f.dim_irrep(k) == 0:
            continue
        w = cat.irrep_isometry(k)
        fs = f.apply(v @ dagger(w), k, r) @ f.carrier_isometry(k)
        out.append((k, fs, v))
    return out


def multiplicity_map(algebra, u):
    """Multiplicity map of an irreducible (rows = functor basis,
    columns = carrier basis) or of a tensor word, assembled through the
    decomposition slots."""
    if isinstance(u, ObjectWord):
        r = u.length
        dim_f, dim_h = algebra.functor.dim(r), 2 ** r
        entries = [[algebra.zero() for _ in range(dim_h)] for _ in range(dim_f)]
        for n, fs, v in _word_functor_slots(algebra, r):
            for t in range(dim_f):
                for x in range(dim_h):
                    coeffs = {}
                    for k in range(algebra.dim(n)):
                        if fs[t, k] == 0:
                            continue
                        for a in range(n + 1):
                            c = fs[t, k] * np.conj(v[x, a])
                            if c != 0:
                                coeffs[BasisLabel(n, k, a)] = c
                    if coeffs:
                        entries[t][x] = entries[t][x] + algebra.element(coeffs)
        return MultiplicityMap(u, entries)
    n = u.n if isinstance(u, IrrepLabel) else int(u)
    if algebra.dim(n) == 0:
        return MultiplicityMap(IrrepLabel(n), [])
    entries = [[algebra.basis_element(n, k, a) for a in range(n + 1)]
               for k in range(algebra.dim(n))]
    return MultiplicityMap(IrrepLabel(n), entries)


def intertwining_residual(algebra, a_mat, u, v):
    """h-norm defect of the naturality law of the multiplicity maps:
    conjugate-functor image of the arrow composed with c_u against c_v
    composed with the arrow.  u, v are both words or both irreducible
    labels; a_mat is the carrier-level arrow."""
    cu = multiplicity_map(algebra, u)
    cv = multiplicity_map(algebra, v)
    f = algebra.functor
    if isinstance(u, ObjectWord):
        fa = f.apply(a_mat, u.length, v.length)
    else:
        nu = u.n if isinstance(u, IrrepLabel) else int(u)
        nv = v.n if isinstance(v, IrrepLabel) else int(v)
        fa = f.apply_irrep(a_mat, nu, nv)
    fa_c = np.conj(fa)
    rows_v, cols_v = cv.shape
    rows_u, cols_u = cu.shape
    worst = 0.0
    for s in range(rows_v):
        for x in range(cols_u):
            lhs = algebra.zero()
            for t in range(rows_u):
                if fa_c[s, t] != 0:
                    lhs = lhs + cu.entries[t][x].scale(fa_c[s, t])
            rhs = algebra.zero()
            for y in range(cols_v):
                if a_mat[y, x] != 0:
                    rhs = rhs + cv.entries[s][y].scale(a_mat[y, x])
            worst = max(worst, (lhs - rhs).h_norm())
    return worst


def linear_independence_check(algebra, max_spin=None, tol=DEFAULT_TOL):
    """True when the Gram matrix of the basis under the Haar inner
    product is nondegenerate."""
    g = algebra.gram(max_spin)
    if g.shape[0] == 0:
        return True
    eig = np.linalg.eigvalsh((g + dagger(g)) / 2)
    return bool(eig[0] > tol.rank_tol * max(1.0, eig[-1]))


# ----------------------------------------------------------- isomorphisms


@dataclass
class InducedIsomorphism:
    """Grade-wise unitary change of the functor data, acting on algebra
    elements by rotating the functor index."""

    source: SpectralAlgebra
    target: SpectralAlgebra
    U: dict
    naturality_residual: float = 0.0
    sample_residual: float = 0.0

    def apply(self, a):
        out = {n: np.conj(self.U[n]) @ c for n, c in a.parts.items()}
        return AlgebraElement._raw(self.target, out)

    def __call__(self, a):
        return self.apply(a)


def induce_isomorphism(u_map, source, target, tol=DEFAULT_TOL,
                       sample_spin=None):
    """*-isomorphism between two spectral algebras induced by a unitary
    natural family u_map[n]: F(n) -> G(n).  Validates unitarity, the
    fusion-cell naturality condition and transport of the involution
    data, then cross-checks products, star and the Haar state on basis
    samples."""
    u_map = {int(n): np.asarray(m, dtype=np.complex128)
             for n, m in u_map.items()}
    if source.grades != target.grades:
        raise ValueError(f"grade sets differ: {source.grades} vs {target.grades}")
    for n in source.grades:
        if n not in u_map:
            raise ValueError(f"missing unitary for grade {n}")
        u = u_map[n]
        if u.shape != (target.dim(n), source.dim(n)):
            raise ValueError(f"grade {n} unitary has shape {u.shape}, "
                             f"expected {(target.dim(n), source.dim(n))}")
        if max(residual(dagger(u) @ u - np.eye(u.shape[1])),
               residual(u @ dagger(u) - np.eye(u.shape[0]))) > 1e-8:
            raise ValueError(f"grade {n} map is not unitary")

    nat = 0.0
    for n in source.grades:
        for m in source.grades:
            cells_f = source.pair_table(n, m)
            cells_g = target.pair_table(n, m)
            for (alpha, mf_f, _), (alpha_g, mf_g, _) in zip(cells_f, cells_g):
                if alpha != alpha_g:
                    raise ValueError("fusion ladders differ between algebras")
                if alpha not in u_map:
                    raise ValueError(f"missing unitary for fused grade {alpha}")
                lhs = mf_g @ u_map[alpha]
                rhs = np.kron(u_map[n], u_map[m]) @ mf_f
                nat = max(nat, residual(lhs - rhs))
        jf = source._grade_data(n)["jhat"]
        jg = target._grade_data(n)["jhat"]
        u = u_map[n]
        nat = max(nat, residual(jg - u @ jf @ u.T))
    if nat > 1e-8:
        raise ValueError(f"family is not quasitensor-natural, residual {nat:.3e}")

    iso = InducedIsomorphism(source, target, u_map, nat)
    ms = min(2, source.max_spin) if sample_spin is None else sample_spin
    labs = source.basis(ms)
    worst = 0.0
    for lx in labs:
        x = source.basis_element(lx)
        worst = max(worst, (iso(x.star()) - iso(x).star()).h_norm(),
                    abs(source.haar(x) - target.haar(iso(x))))
        for ly in labs:
            y = source.basis_element(ly)
            worst = max(worst, (iso(x * y) - iso(x) * iso(y)).h_norm())
    iso.sample_residual = worst
    if worst > tol.eq_tol:
        raise ValueError(f"induced map fails *-isomorphism checks, "
                         f"residual {worst:.3e}")
    return iso


def commutativity_probe(algebra, max_spin=None):
    """Largest h-norm of a commutator of basis elements."""
    labs = algebra.basis(max_spin)
    worst = 0.0
    for lx in labs:
        x = algebra.basis_element(lx)
        for ly in labs:
            if ly < lx:
                continue
            y = algebra.basis_element(ly)
            worst = max(worst, (x * y - y * x).h_norm())
    return worst


# ---------------------------------------------------------------- export


_CSV_HEADER = ["n", "i", "a", "m", "j", "b", "p", "k", "c", "re", "im"]


def structure_records(algebra, max_spin=None):
    """Flat, sorted structure-constant table: one row per nonzero
    coefficient of a basis-pair product."""
    labs = algebra.basis(max_spin)
    records = []
    for lx in labs:
        for ly in labs:
            prod = algebra.product_basis(lx, ly)
            for lab in sorted(prod):
                v = prod[lab]
                records.append((lx.n, lx.i, lx.a, ly.n, ly.i, ly.a,
                                lab.n, lab.i, lab.a, v.real, v.imag))
    return records


def _atomic_write(path, writer):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_structure(path, algebra, max_spin=None, fmt=None):
    """Write the structure-constant table; JSON holds the full document
    with metadata, CSV the flat rows.  Floats round-trip bit-exactly in
    both formats."""
    records = structure_records(algebra, max_spin)
    fmt = fmt or ("csv" if str(path).endswith(".csv") else "json")
    if fmt == "json":
        doc = {
            "schema_version": 1,
            "mu": algebra.mu,
            "max_spin": algebra.max_spin if max_spin is None else int(max_spin),
            "columns": _CSV_HEADER,
            "records": [list(r) for r in records],
        }
        _atomic_write(path, lambda fh: json.dump(doc, fh, indent=1))
    elif fmt == "csv":
        def writer(fh):
            w = csv.writer(fh)
            w.writerow(_CSV_HEADER)
            for r in records:
                w.writerow([*r[:9], repr(r[9]), repr(r[10])])
        _atomic_write(path, writer)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return records


def load_structure(path, fmt=None):
    """Read a structure-constant table back as the list of rows."""
    fmt = fmt or ("csv" if str(path).endswith(".csv") else "json")
    if fmt == "json":
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("schema_version") != 1:
            raise ValueError(
                f"unsupported schema_version {doc.get('schema_version')!r}")
        return [tuple(int(x) for x in r[:9]) + (float(r[9]), float(r[10]))
                for r in doc["records"]]
    if fmt == "csv":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if rows and rows[0] == _CSV_HEADER:
            rows = rows[1:]
        return [tuple(int(x) for x in r[:9]) + (float(r[9]), float(r[10]))
                for r in rows]
    raise ValueError(f"unknown format {fmt!r}")
