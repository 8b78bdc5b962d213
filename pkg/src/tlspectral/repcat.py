"""Concrete representation category of quantum SU(2) at deformation mu.

Objects are tensor words in the fundamental two-dimensional
representation, realized on (C^2)^(x r) through the standard duality
datum.  The irreducible of label n (dimension n+1) is realized as the
joint kernel of all neighbouring contractions inside the n-th tensor
power, with a fixed orthonormal carrier basis ordered by descending
weight and a positive-phase convention.  All arrows touching
irreducibles are compressions by those carrier isometries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    column_space_isometry,
    dagger,
    gram_schmidt,
    null_space_isometry,
    residual,
)
from .tlcat import (
    DualityDatum,
    LoopParameter,
    TLDiagram,
    TLMorphism,
    evaluate,
    q_number,
    tl_basis,
)

__all__ = [
    "DeformationParameter",
    "ObjectWord",
    "IrrepLabel",
    "DecompositionCertificate",
    "ConjugateSolution",
    "AntilinearMap",
    "RepCategory",
    "rep_category",
    "hom_space",
    "decompose",
    "conjugate",
    "conjugate_irrep",
    "standardize_conjugate",
    "bullet",
]


@dataclass(frozen=True)
class DeformationParameter:
    """mu in (0, 1] with q = mu^2 stored alongside."""

    mu: float
    q: float = None

    def __post_init__(self):
        if not (0.0 < self.mu <= 1.0):
            raise ValueError(f"mu must be in (0, 1], got {self.mu}")
        object.__setattr__(self, "q", self.mu ** 2)


@dataclass(frozen=True)
class ObjectWord:
    """Tensor word u^(x length); length 0 is the unit."""

    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be nonnegative")


@dataclass(frozen=True)
class IrrepLabel:
    """Irreducible of dimension n+1 (spin n/2)."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")


@dataclass(frozen=True)
class AntilinearMap:
    """Antilinear operator x |-> mat @ conj(x)."""

    mat: np.ndarray

    def apply(self, x):
        return self.mat @ np.conj(x)

    def star(self):
        """Adjoint in the antilinear sense: <j* x, y> = <j y, x>."""
        return AntilinearMap(self.mat.T)

    def inv(self):
        return AntilinearMap(np.linalg.inv(np.conj(self.mat)))

    def compose(self, other):
        """Self after other; the composite is linear, returned as a matrix."""
        return self.mat @ np.conj(other.mat)


@dataclass(frozen=True)
class DecompositionCertificate:
    """Complete orthogonal family of irrep slot isometries for a word."""

    word: ObjectWord
    parts: tuple  # tuple of (IrrepLabel, isometry matrix)

    def labels(self):
        return [lab.n for lab, _ in self.parts]

    def multiplicity(self, n):
        return sum(1 for lab, _ in self.parts if lab.n == n)

    @property
    def parts_raw(self):
        """Plain (int, matrix) view of the slots."""
        return [(lab.n, v) for lab, v in self.parts]


def _infer_dim(obj):
    if isinstance(obj, ObjectWord):
        return 2 ** obj.length
    if isinstance(obj, IrrepLabel):
        return obj.n + 1
    raise TypeError(f"unsupported object {obj!r}")


@dataclass(frozen=True)
class ConjugateSolution:
    """Solution (R, Rbar) of the conjugate equations for one object,
    with the antilinear j recoverable as the row-major reshape of R:
    R = sum_i (j e_i) (x) e_i."""

    object: object
    R: np.ndarray  # column, length dim^2
    Rbar: np.ndarray
    j: AntilinearMap

    def __post_init__(self):
        d = _infer_dim(self.object)
        R = np.asarray(self.R, dtype=np.complex128).reshape(d * d, 1)
        Rb = np.asarray(self.Rbar, dtype=np.complex128).reshape(d * d, 1)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Rbar", Rb)
        jm = R.reshape(d, d)
        if residual(jm - self.j.mat) > 1e-9 * max(1.0, residual(jm)):
            raise ValueError("j matrix must be the reshape of R")
        jb = Rb.reshape(d, d)
        r1 = residual(jm @ np.conj(jb) - np.eye(d))
        r2 = residual(jb @ np.conj(jm) - np.eye(d))
        if max(r1, r2) > 1e-8 * max(1.0, np.linalg.norm(jm) ** 2):
            raise ValueError(
                f"conjugate equations violated, residuals {r1:.3e}, {r2:.3e}")

    @property
    def dim(self):
        return _infer_dim(self.object)

    @property
    def norm_R(self):
        return float(np.linalg.norm(self.R))

    @property
    def norm_Rbar(self):
        return float(np.linalg.norm(self.Rbar))

    @property
    def intrinsic_dim(self):
        return self.norm_R * self.norm_Rbar


class RepCategory:
    """All structure of the category at one value of mu, with caches.

    Caches are append-only dicts keyed by immutable arguments; entries
    are computed once and never mutated afterwards, so concurrent reads
    are safe.
    """

    def __init__(self, mu, tol=DEFAULT_TOL):
        self.param = DeformationParameter(mu)
        self.mu = float(mu)
        self.loop = LoopParameter.from_mu(mu)
        self.datum = DualityDatum.standard(mu)
        self.tol = tol
        self._w = {}
        self._weight = {}
        self._decomp = {}
        self._fusion = {}
        self._hom = {}
        self._conj_word = {}
        self._conj_irrep = {}
        self._jw = {}

    # -- carriers ----------------------------------------------------

    def weight_operator(self, r):
        """Sum of diag(1, -1) over the r tensor slots."""
        if r not in self._weight:
            if r == 0:
                w = np.zeros((1, 1))
            else:
                prev = self.weight_operator(r - 1)
                w = np.kron(prev, np.eye(2)) + np.kron(np.eye(2 ** (r - 1)), np.diag([1.0, -1.0]))
            self._weight[r] = w
        return self._weight[r]

    def irrep_isometry(self, n):
        """Isometry w_n: C^(n+1) -> (C^2)^(x n) onto the irreducible of
        label n, columns ordered by descending weight n, n-2, ..., -n,
        each phased so its first significant entry is real positive."""
        if n in self._w:
            return self._w[n]
        if n == 0:
            w = np.ones((1, 1), dtype=np.complex128)
        elif n == 1:
            w = np.eye(2, dtype=np.complex128)
        else:
            wp = self.irrep_isometry(n - 1)
            cap = dagger(self.datum.R_vec.reshape(4, 1))
            # kernel of the contraction of the last two slots, inside H_{n-1} (x) C^2
            b = np.kron(np.eye(2 ** (n - 2)), cap) @ np.kron(wp, np.eye(2))
            k = null_space_isometry(b, self.tol)
            w = self._weight_canonicalize(np.kron(wp, np.eye(2)) @ k, n)
        self._w[n] = w
        return w

    def _weight_canonicalize(self, w, r):
        """Reorder an isometry with 1-dimensional weight spaces so the
        compressed weight operator is descending, with positive phases."""
        wc = dagger(w) @ self.weight_operator(r) @ w
        vals, vecs = np.linalg.eigh((wc + dagger(wc)) / 2)
        w = w @ vecs[:, ::-1]
        for c in range(w.shape[1]):
            col = w[:, c]
            a = col[np.argmax(np.abs(col))]
            w[:, c] = col * (np.conj(a) / abs(a))
        return w

    def irrep_dim(self, n):
        return n + 1

    def qdim(self, n):
        """Intrinsic dimension [n+1]_mu."""
        return q_number(n + 1, self.loop.delta)

    def jw_projection(self, n):
        """Orthogonal projection of (C^2)^(x n) onto the irreducible of
        label n, by the Wenzl recursion run on the honest projection
        representation e_i = (cup_i cap_i)/(1 + mu^2) of the diagram
        algebra.  Independent route from irrep_isometry; the two agree."""
        if n in self._jw:
            return self._jw[n]
        delta = self.loop.delta
        if n == 0:
            p = np.ones((1, 1), dtype=np.complex128)
        elif n == 1:
            p = np.eye(2, dtype=np.complex128)
        else:
            pm = np.kron(self.jw_projection(n - 1), np.eye(2))
            e = evaluate(TLDiagram.generator(n, n - 2), self.datum)
            e = (delta / (1.0 + self.mu ** 2)) * e
            coeff = q_number(n - 1, delta) / q_number(n, delta)
            p = pm - coeff * (pm @ e @ pm)
        self._jw[n] = p
        return p

    # -- hom spaces --------------------------------------------------

    def hom_space_with_coords(self, r, s):
        """Orthonormal (Frobenius) basis of the intertwiners
        (C^2)^(x r) -> (C^2)^(x s), together with the coefficient rows
        expressing each basis element over the evaluated planar
        diagrams, and the diagram list itself."""
        key = (r, s)
        if key in self._hom:
            return self._hom[key]
        diags = tl_basis(r, s)
        mats = [evaluate(d, self.datum) for d in diags]
        basis, coeffs = gram_schmidt([m.ravel() for m in mats], self.tol)
        shaped = [b.reshape(2 ** s, 2 ** r) for b in basis]
        self._hom[key] = (shaped, coeffs, diags)
        return self._hom[key]

    def hom_space(self, r, s):
        return self.hom_space_with_coords(r, s)[0]

    # -- decomposition -----------------------------------------------

    def branch_up(self, k):
        """Inclusion of the label-(k+1) carrier into H_k (x) C^2."""
        wk = self.irrep_isometry(k)
        return dagger(np.kron(wk, np.eye(2))) @ self.irrep_isometry(k + 1)

    def branch_down(self, k):
        """Inclusion of the label-(k-1) carrier into H_k (x) C^2,
        normalized from the arc insertion at the last slot."""
        if k < 1:
            raise ValueError("branch_down needs k >= 1")
        wk = self.irrep_isometry(k)
        wm = self.irrep_isometry(k - 1)
        rcol = self.datum.R_vec.reshape(4, 1)
        m = dagger(np.kron(wk, np.eye(2))) @ np.kron(np.eye(2 ** (k - 1)), rcol) @ wm
        g = dagger(m) @ m
        c = float(np.trace(g).real) / max(1, g.shape[0])
        if c < self.tol.rank_tol:
            raise ValueError("degenerate branching, arc insertion vanished")
        if residual(g - c * np.eye(g.shape[0])) > 1e-8 * max(1.0, c):
            raise ValueError("branching map failed to be a multiple of an isometry")
        return m / np.sqrt(c)

    def decompose(self, r):
        """Slots (label, isometry into (C^2)^(x r)), label ascending,
        branching order within a label.  Slot isometries are composites
        of intertwiners, so same-label slots differ by scalars only."""
        if r in self._decomp:
            return self._decomp[r]
        if r == 0:
            slots = [(0, np.ones((1, 1), dtype=np.complex128))]
        elif r == 1:
            slots = [(1, np.eye(2, dtype=np.complex128))]
        else:
            slots = []
            for k, v in self.decompose(r - 1).parts_raw:
                vx = np.kron(v, np.eye(2))
                slots.append((k + 1, vx @ self.branch_up(k)))
                if k >= 1:
                    slots.append((k - 1, vx @ self.branch_down(k)))
            slots.sort(key=lambda t: t[0])
        cert = DecompositionCertificate(
            ObjectWord(r), tuple((IrrepLabel(k), v) for k, v in slots))
        self._decomp[r] = cert
        return cert

    # -- fusion ------------------------------------------------------

    def _nested_arc_diagram(self, n, m, alpha):
        """Planar diagram alpha -> n + m: outer through strands and
        (n + m - alpha)/2 arcs nested across the boundary between the
        two factors."""
        c = (n + m - alpha) // 2
        left = n - c
        pairs = [(i, alpha + i) for i in range(left)]
        pairs += [(left + j, alpha + left + 2 * c + j) for j in range(alpha - left)]
        pairs += [(alpha + left + i, alpha + left + 2 * c - 1 - i) for i in range(c)]
        return TLDiagram(alpha, n + m, tuple(pairs))

    def fusion(self, n, m):
        """Slots (alpha, s_alpha) with s_alpha an isometry
        C^(alpha+1) -> C^((n+1)(m+1)) spanning the unique copy of the
        label-alpha irreducible inside the product, alpha ascending."""
        key = (n, m)
        if key in self._fusion:
            return self._fusion[key]
        wn, wm = self.irrep_isometry(n), self.irrep_isometry(m)
        compress = dagger(np.kron(wn, wm))
        out = []
        for alpha in range(abs(n - m), n + m + 1, 2):
            walpha = self.irrep_isometry(alpha)
            t = compress @ evaluate(self._nested_arc_diagram(n, m, alpha), self.datum) @ walpha
            s = self._normalize_isometry(t)
            if s is None:
                # fall back to scanning the full diagram basis
                for d in tl_basis(alpha, n + m):
                    t = compress @ evaluate(d, self.datum) @ walpha
                    s = self._normalize_isometry(t)
                    if s is not None:
                        break
            if s is None:
                raise ValueError(f"no fusion isometry found for {(n, m, alpha)}")
            out.append((alpha, s))
        self._fusion[key] = out
        return out

    def _normalize_isometry(self, t):
        g = dagger(t) @ t
        c = float(np.trace(g).real) / max(1, g.shape[0])
        if c < self.tol.rank_tol:
            return None
        if residual(g - c * np.eye(g.shape[0])) > 1e-7 * max(1.0, c):
            raise ValueError("fusion candidate is not a multiple of an isometry")
        return t / np.sqrt(c)

    # -- conjugates --------------------------------------------------

    def conjugate_word(self, r):
        """Nested solution for the word u^(x r): the single-letter cup
        iterated inside itself, with Rbar built from -R/mu the same way."""
        if r in self._conj_word:
            return self._conj_word[r]
        rv = self.datum.R_vec.reshape(4, 1)
        rbv = -rv / self.mu
        R = np.ones((1, 1), dtype=np.complex128)
        Rb = np.ones((1, 1), dtype=np.complex128)
        for k in range(r):
            eye = np.eye(2)
            R = np.kron(np.kron(eye, R), eye) @ rv
            Rb = np.kron(np.kron(eye, Rb), eye) @ rbv
        sol = ConjugateSolution(ObjectWord(r), R, Rb,
                                AntilinearMap(R.reshape(2 ** r, 2 ** r)))
        self._conj_word[r] = sol
        return sol

    def balanced_word_solution(self, r):
        """Nested word solution rescaled so |R| = |Rbar|.  Then the
        antilinear square is (-1)^r exactly, and the conjugate-side
        image of intertwiners is involutive on same-parity hom pairs."""
        sol = self.conjugate_word(r)
        lam = np.sqrt(sol.norm_Rbar / sol.norm_R)
        return ConjugateSolution(sol.object, lam * sol.R, sol.Rbar / lam,
                                 AntilinearMap(lam * sol.j.mat))

    def conjugate_irrep(self, n):
        """Compression of the nested word solution to the label-n
        carrier, rescaled so the conjugate equations hold exactly."""
        if n in self._conj_irrep:
            return self._conj_irrep[n]
        word = self.conjugate_word(n)
        w = self.irrep_isometry(n)
        ww = dagger(np.kron(w, w))
        R = ww @ word.R
        Rb = ww @ word.Rbar
        d = n + 1
        jm = R.reshape(d, d)
        jb = Rb.reshape(d, d)
        # on the irreducible both defect maps are scalars; one rescale fixes both
        m1 = jm @ np.conj(jb)
        c = np.trace(m1) / d
        if abs(c) < self.tol.rank_tol:
            raise ValueError("conjugate compression degenerated")
        Rb = Rb / np.conj(c)
        sol = ConjugateSolution(IrrepLabel(n), R, Rb, AntilinearMap(jm))
        self._conj_irrep[n] = sol
        return sol


_registry = {}


def rep_category(mu):
    """Shared per-mu instance; the caches make repeated queries cheap."""
    if mu not in _registry:
        _registry[mu] = RepCategory(mu)
    return _registry[mu]


def _length(u):
    return u.length if isinstance(u, ObjectWord) else int(u)


def hom_space(u, v, mu):
    """Orthonormal basis of the intertwiner space between two words."""
    return rep_category(mu).hom_space(_length(u), _length(v))


def decompose(u, mu):
    return rep_category(mu).decompose(_length(u))


def conjugate(u, mu):
    return rep_category(mu).conjugate_word(_length(u))


def conjugate_irrep(n, mu):
    n = n.n if isinstance(n, IrrepLabel) else int(n)
    return rep_category(mu).conjugate_irrep(n)


def standardize_conjugate(c, irrep=None):
    """Rescale (R, Rbar) so that |R| = |Rbar|; then the intrinsic
    dimension of the irreducible is |R|^2.  Rejects reducible objects."""
    if isinstance(c.object, ObjectWord) and c.object.length > 1:
        raise ValueError("standardize_conjugate needs an irreducible object")
    lam = np.sqrt(c.norm_Rbar / c.norm_R)
    return ConjugateSolution(c.object, lam * c.R, c.Rbar / lam,
                             AntilinearMap(lam * c.j.mat))


def bullet(t, sol_in, sol_out, tol=DEFAULT_TOL):
    """Conjugate-side image of an intertwiner t: rho -> rho', defined by

        (t_bullet (x) 1) R_rho = (1 (x) t*) R_rho'

    and solved by least squares (t_bullet = J' conj(t) J^{-1} in terms
    of the reshaped cup matrices)."""
    t = np.asarray(t, dtype=np.complex128)
    jin = sol_in.j.mat
    jout = sol_out.j.mat
    if t.shape != (jout.shape[0], jin.shape[0]):
        raise ValueError(f"t has shape {t.shape}, expected {(jout.shape[0], jin.shape[0])}")
    rhs = jout @ np.conj(t)
    x = np.linalg.lstsq(jin.T, rhs.T, rcond=tol.rank_tol)[0].T
    res = residual(x @ jin - rhs)
    if res > 1e-8 * max(1.0, residual(rhs)):
        raise ValueError(f"defining equation inconsistent, residual {res:.3e}")
    return x
