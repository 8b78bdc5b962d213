"""Quasitensor *-functors from the representation category into
finite-dimensional Hilbert spaces.

A functor is stored as data on tensor words: dimensions, an action on
concrete intertwiners, and for every pair of words an isometry
S_{u,v}: F(u) (x) F(v) -> F(u (x) v).  Irreducible-level data is derived
by compressing through the images of the carrier projections.  Built-in
functors: the identity embedding, the zero-weight-subspace functor, a
fiber functor re-evaluating diagrams through another duality datum, and
functors assembled from per-irreducible dimensions plus fusion inclusion
blocks (the user file format).  The axiom checker is the trust boundary
for user-supplied data.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    column_space_isometry,
    dagger,
    residual,
)
from .repcat import (
    AntilinearMap,
    ConjugateSolution,
    IrrepLabel,
    ObjectWord,
    RepCategory,
    rep_category,
)
from .tlcat import DualityDatum, evaluate

__all__ = [
    "QuasitensorFunctor",
    "EmbeddingFunctor",
    "ProjectionFamilyFunctor",
    "WeightZeroFunctor",
    "FiberFunctor",
    "AssembledFunctor",
    "make_embedding",
    "make_weight_zero",
    "make_fiber",
    "AxiomReport",
    "check_axioms",
    "PushedConjugate",
    "push_conjugate",
    "DimensionBounds",
    "dimension_bounds",
    "equality_case_probe",
    "functor_to_data",
    "save_functor",
    "load_functor",
]


def _word_of(k):
    r = int(k).bit_length() - 1
    if k <= 0 or 2 ** r != k:
        raise ValueError(f"dimension {k} is not a power of two")
    return r


class QuasitensorFunctor:
    """Base class: word-level interface plus derived irreducible data.

    Subclasses implement dim(r), apply(a, r_in, r_out) and incl(r1, r2).
    All caches are append-only and safe for concurrent reads.
    """

    def __init__(self, mu, tol=DEFAULT_TOL):
        self.mu = float(mu)
        self.category = rep_category(self.mu)
        self.tol = tol
        self._carrier = {}
        self._pair_carrier = {}
        self._incl_irrep = {}

    # -- word level (subclass responsibility) ------------------------

    def dim(self, r):
        raise NotImplementedError

    def apply(self, a, r_in=None, r_out=None):
        """Image of a concrete word intertwiner a: (C^2)^r_in -> (C^2)^r_out."""
        raise NotImplementedError

    def incl(self, r1, r2):
        """S_{u,v}: F(u) (x) F(v) -> F(u (x) v), an isometry."""
        raise NotImplementedError

    def _infer(self, a, r_in, r_out):
        a = np.asarray(a, dtype=np.complex128)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if r_in is None:
            r_in = _word_of(a.shape[1])
        if r_out is None:
            r_out = _word_of(a.shape[0])
        return a, r_in, r_out

    # -- irreducible level (derived) ---------------------------------

    def carrier_isometry(self, n):
        """Isometry onto the image of the label-n carrier projection."""
        if n not in self._carrier:
            p = self.category.jw_projection(n)
            self._carrier[n] = column_space_isometry(self.apply(p, n, n), self.tol)
        return self._carrier[n]

    def dim_irrep(self, n):
        return self.carrier_isometry(n).shape[1]

    def pair_carrier_isometry(self, n, m):
        """Isometry onto the image of F(P_n (x) P_m) inside F(word n+m)."""
        key = (n, m)
        if key not in self._pair_carrier:
            p = np.kron(self.category.jw_projection(n), self.category.jw_projection(m))
            self._pair_carrier[key] = column_space_isometry(
                self.apply(p, n + m, n + m), self.tol)
        return self._pair_carrier[key]

    def apply_irrep(self, a, n, m):
        """Image of an arrow between irreducible carriers,
        a: C^(n+1) -> C^(m+1), in the compressed coordinates."""
        wn = self.category.irrep_isometry(n)
        wm = self.category.irrep_isometry(m)
        word = wm @ np.asarray(a, dtype=np.complex128) @ dagger(wn)
        return dagger(self.carrier_isometry(m)) @ self.apply(word, n, m) @ self.carrier_isometry(n)

    def incl_irrep(self, n, m):
        """S restricted to the irreducible pair:
        F_irr(n) (x) F_irr(m) -> image of F(P_n (x) P_m); an isometry."""
        key = (n, m)
        if key not in self._incl_irrep:
            s = dagger(self.pair_carrier_isometry(n, m)) @ self.incl(n, m) @ np.kron(
                self.carrier_isometry(n), self.carrier_isometry(m))
            self._incl_irrep[key] = s
        return self._incl_irrep[key]

    def fusion_image(self, n, m, gamma, s):
        """Image of a fusion isometry s: C^(gamma+1) -> C^((n+1)(m+1))
        as a map from the label-gamma compressed space into the
        compressed pair space."""
        wn = self.category.irrep_isometry(n)
        wm = self.category.irrep_isometry(m)
        wg = self.category.irrep_isometry(gamma)
        word = np.kron(wn, wm) @ s @ dagger(wg)
        return dagger(self.pair_carrier_isometry(n, m)) @ self.apply(
            word, gamma, n + m) @ self.carrier_isometry(gamma)

    def irrep_push_feasible(self, n):
        """Whether the conjugate push at label n fits the generic
        pair-carrier route; it handles words of length 2n, so the cost
        is quartic in 2^n.  Subclasses with cheaper routes widen it."""
        if 4 ** n > 2048:
            return False
        return self.dim(2 * n) <= 2048

    def push_irrep_vectors(self, n, c):
        """Compression of F((w (x) w) R) and its mate onto the tensor
        square of the label-n space: the raw vectors behind a pushed
        conjugate solution."""
        w = self.category.irrep_isometry(n)
        ww = np.kron(w, w)
        pair = self.pair_carrier_isometry(n, n)
        s = self.incl_irrep(n, n)
        rhat = dagger(s) @ (dagger(pair) @ self.apply(ww @ c.R, 0, 2 * n))
        rbarhat = dagger(s) @ (dagger(pair) @ self.apply(ww @ c.Rbar, 0, 2 * n))
        return rhat, rbarhat


class EmbeddingFunctor(QuasitensorFunctor):
    """The identity embedding: F(word r) = (C^2)^(x r), arrows and
    inclusions untouched."""

    def dim(self, r):
        return 2 ** r

    def apply(self, a, r_in=None, r_out=None):
        a, _, _ = self._infer(a, r_in, r_out)
        return a

    def incl(self, r1, r2):
        return np.eye(2 ** (r1 + r2), dtype=np.complex128)

    def irrep_push_feasible(self, n):
        return True

    def push_irrep_vectors(self, n, c):
        # identity on arrows, so the compression collapses to the basis
        # change between the irrep isometry and the carrier isometry
        u = dagger(self.carrier_isometry(n)) @ self.category.irrep_isometry(n)
        out = []
        for r in (c.R, c.Rbar):
            m = np.asarray(r, dtype=np.complex128).reshape(n + 1, n + 1)
            out.append((u @ m @ u.T).reshape(-1, 1))
        return out[0], out[1]


class ProjectionFamilyFunctor(QuasitensorFunctor):
    """Functor cut out by a family of projections E_r on the word
    carriers: F(r) = E_r H_r, arrows restricted, inclusions induced.
    The family must satisfy the compatibility conditions (unit, arrow
    commutation, tensor domination); see the subspace-family checker."""

    def __init__(self, mu, projection, isometry=None, tol=DEFAULT_TOL):
        super().__init__(mu, tol)
        self._projection = projection
        self._isometry = isometry
        self._v = {}

    def selection(self, r):
        """Isometry from F(r) onto the subspace inside (C^2)^(x r)."""
        if r not in self._v:
            if self._isometry is not None:
                self._v[r] = self._isometry(r)
            else:
                self._v[r] = column_space_isometry(self._projection(r), self.tol)
        return self._v[r]

    def dim(self, r):
        return self.selection(r).shape[1]

    def apply(self, a, r_in=None, r_out=None):
        a, r_in, r_out = self._infer(a, r_in, r_out)
        return dagger(self.selection(r_out)) @ a @ self.selection(r_in)

    def incl(self, r1, r2):
        return dagger(self.selection(r1 + r2)) @ np.kron(self.selection(r1), self.selection(r2))


class WeightZeroFunctor(ProjectionFamilyFunctor):
    """Subspace functor of the vectors with equally many 0-bits and
    1-bits in each tensor word (the zero-weight spaces).  The selection
    isometries pick the balanced basis strings in increasing binary
    order, so all matrices here are 0/1 selections."""

    def __init__(self, mu, tol=DEFAULT_TOL):
        super().__init__(mu, projection=self._weight_projection,
                         isometry=self._balanced_selection, tol=tol)

    @staticmethod
    def _balanced_indices(r):
        return [b for b in range(2 ** r) if bin(b).count("1") * 2 == r]

    def _balanced_selection(self, r):
        idx = self._balanced_indices(r)
        v = np.zeros((2 ** r, len(idx)), dtype=np.complex128)
        for c, b in enumerate(idx):
            v[b, c] = 1.0
        return v

    def _weight_projection(self, r):
        v = self._balanced_selection(r)
        return v @ dagger(v)

    def irrep_push_feasible(self, n):
        # masking route below only ever builds 2^n-square matrices
        return 4 ** n <= 2 ** 20

    def push_irrep_vectors(self, n, c):
        # F selects balanced strings, so compressing F((w (x) w) R)
        # amounts to zeroing the entries whose concatenated string is
        # unbalanced and compressing each slot by selection and carrier
        w = self.category.irrep_isometry(n)
        sel = self.selection(n)
        v = self.carrier_isometry(n)
        weight = np.array([bin(s).count("1") for s in range(2 ** n)])
        mask = (weight[:, None] + weight[None, :]) == n
        out = []
        for r in (c.R, c.Rbar):
            x = w @ r.reshape(n + 1, n + 1) @ w.T
            y = dagger(sel) @ (x * mask) @ np.conj(sel)
            out.append((dagger(v) @ y @ np.conj(v)).reshape(-1, 1))
        return out[0], out[1]


class FiberFunctor(QuasitensorFunctor):
    """Tensor functor re-evaluating arrows through another duality
    datum: an arrow is written in coordinates over the evaluated planar
    diagrams (unique, the diagrams being independent), and the same
    combination is evaluated through the new datum.  The closed-loop
    value 1 + mu^2 and the straightening factor -mu agree for every
    valid datum, which is exactly what makes this well defined and
    multiplicative."""

    def __init__(self, datum, tol=DEFAULT_TOL):
        super().__init__(datum.mu, tol)
        self.datum = datum

    def dim(self, r):
        return self.datum.dim ** r

    def _coords(self, a, r_in, r_out):
        mats, coeffs, diags = self.category.hom_space_with_coords(r_in, r_out)
        c = np.array([np.vdot(m, a) for m in mats])
        recon = sum(ci * m for ci, m in zip(c, mats)) if mats else np.zeros_like(a)
        scale = max(1.0, residual(a))
        err = residual(a - recon)
        if err > 1e-8 * scale:
            raise ValueError(
                f"arrow is not in the intertwiner span, residual {err:.3e}")
        return c, coeffs, diags

    def apply(self, a, r_in=None, r_out=None):
        a, r_in, r_out = self._infer(a, r_in, r_out)
        c, coeffs, diags = self._coords(a, r_in, r_out)
        out = np.zeros((self.dim(r_out), self.dim(r_in)), dtype=np.complex128)
        if len(diags) == 0:
            return out
        # diagram coefficients of a, then re-evaluate through the datum
        t = np.zeros(len(diags), dtype=np.complex128)
        for ci, row in zip(c, coeffs):
            t[: len(row)] += ci * np.asarray(row)
        for td, d in zip(t, diags):
            if td != 0:
                out += td * evaluate(d, self.datum)
        return out

    def incl(self, r1, r2):
        return np.eye(self.dim(r1 + r2), dtype=np.complex128)

    def push_irrep_vectors(self, n, c):
        # multiplicative on words with identity inclusions, so the
        # pair compression factors through the two slot carriers;
        # contracting by reshape avoids the kron of the carriers
        w = self.category.irrep_isometry(n)
        v = self.carrier_isometry(n)
        d = self.dim(n)
        ww = np.kron(w, w)
        out = []
        for r in (c.R, c.Rbar):
            vec = self.apply(ww @ np.asarray(r).reshape(-1, 1), 0, 2 * n)
            m = vec.reshape(d, d)
            out.append((dagger(v) @ m @ np.conj(v)).reshape(-1, 1))
        return out[0], out[1]

    def irrep_push_feasible(self, n):
        # the slot-by-slot push only needs the carrier at word n
        return self.dim(n) <= 2048


class AssembledFunctor(QuasitensorFunctor):
    """Functor built from per-irreducible dimensions d_n and, for each
    pair of labels, inclusion blocks iota_gamma: C^d_gamma ->
    C^(d_alpha d_beta) with orthogonal ranges summing to the identity.

    The carrier of a word is the direct sum over decomposition slots of
    C^d_label; arrows act through the normalized trace pairing
    <T, S> = tr(T* S)/(label+1) on the slot isometries, which makes the
    functor a *-functor exactly.  Associativity of the induced
    inclusions is not automatic: run the axiom checker on loaded data.
    """

    def __init__(self, mu, dims, blocks, max_label=None, tol=DEFAULT_TOL):
        super().__init__(mu, tol)
        self.dims = {int(n): int(d) for n, d in dims.items()}
        if self.dims.get(0, 1) != 1:
            raise ValueError("the unit must have dimension 1")
        self.dims.setdefault(0, 1)
        if any(d < 0 for d in self.dims.values()):
            raise ValueError("dimensions must be nonnegative")
        self.max_label = max(self.dims) if max_label is None else int(max_label)
        self.blocks = {}
        for (a, b), per_gamma in blocks.items():
            self.blocks[(int(a), int(b))] = {
                int(g): np.asarray(m, dtype=np.complex128) for g, m in per_gamma.items()}
        self._validate_blocks()
        self._slots = {}

    def d_of(self, n):
        return self.dims.get(n, 0)

    def _ladder(self, a, b):
        return [g for g in range(abs(a - b), a + b + 1, 2) if g <= self.max_label]

    def _block(self, a, b, g):
        """Inclusion block for gamma inside (alpha, beta); unit pairs
        are canonical identities."""
        if a == 0:
            return np.eye(self.d_of(b)) if g == b else None
        if b == 0:
            return np.eye(self.d_of(a)) if g == a else None
        per = self.blocks.get((a, b), {})
        blk = per.get(g)
        if blk is None and self.d_of(g) * self.d_of(a) * self.d_of(b) > 0:
            return None
        return blk

    def _validate_blocks(self):
        for (a, b), per in self.blocks.items():
            da, db = self.d_of(a), self.d_of(b)
            if da == 0 or db == 0:
                continue
            total = np.zeros((da * db, da * db), dtype=np.complex128)
            for g, blk in per.items():
                dg = self.d_of(g)
                if g not in self._ladder(a, b):
                    raise ValueError(f"label {g} outside the ladder of {(a, b)}")
                if blk.shape != (da * db, dg):
                    raise ValueError(
                        f"block {(a, b, g)} has shape {blk.shape}, expected {(da * db, dg)}")
                if residual(dagger(blk) @ blk - np.eye(dg)) > 1e-8:
                    raise ValueError(f"block {(a, b, g)} is not an isometry")
                total += blk @ dagger(blk)
            missing = [g for g in self._ladder(a, b)
                       if self.d_of(g) > 0 and g not in per]
            if missing:
                raise ValueError(f"pair {(a, b)} is missing blocks for labels {missing}")
            if residual(total - np.eye(da * db)) > 1e-8:
                raise ValueError(f"blocks of pair {(a, b)} do not sum to the identity")

    def _word_slots(self, r):
        """(label, slot isometry, coordinate offset) per slot, plus the
        total dimension."""
        if r not in self._slots:
            parts = self.category.decompose(r).parts_raw
            bad = [k for k, _ in parts if k > self.max_label]
            if bad:
                raise ValueError(
                    f"word length {r} needs labels {sorted(set(bad))} beyond max_label")
            out, off = [], 0
            for k, v in parts:
                out.append((k, v, off))
                off += self.d_of(k)
            self._slots[r] = (out, off)
        return self._slots[r]

    def dim(self, r):
        return self._word_slots(r)[1]

    def apply(self, a, r_in=None, r_out=None):
        a, r_in, r_out = self._infer(a, r_in, r_out)
        slots_in, din = self._word_slots(r_in)
        slots_out, dout = self._word_slots(r_out)
        out = np.zeros((dout, din), dtype=np.complex128)
        for k_in, t, off_in in slots_in:
            d = self.d_of(k_in)
            if d == 0:
                continue
            at = a @ t
            for k_out, s, off_out in slots_out:
                if k_out != k_in:
                    continue
                c = np.trace(dagger(s) @ at) / (k_in + 1)
                if c != 0:
                    out[off_out:off_out + d, off_in:off_in + d] += c * np.eye(d)
        return out

    def incl(self, r1, r2):
        slots1, d1 = self._word_slots(r1)
        slots2, d2 = self._word_slots(r2)
        slots12, d12 = self._word_slots(r1 + r2)
        s_mat = np.zeros((d12, d1 * d2), dtype=np.complex128)
        for a, t, off1 in slots1:
            da = self.d_of(a)
            if da == 0:
                continue
            for b, s, off2 in slots2:
                db = self.d_of(b)
                if db == 0:
                    continue
                ts = np.kron(t, s)
                cols = (np.add.outer((off1 + np.arange(da)) * d2,
                                     off2 + np.arange(db))).ravel()
                for g, s_g in self.category.fusion(a, b):
                    dg = self.d_of(g)
                    if dg == 0 or g > self.max_label:
                        continue
                    blk = self._block(a, b, g)
                    if blk is None:
                        raise ValueError(f"missing block for {(a, b, g)}")
                    tsg = ts @ s_g
                    for g2, u, off12 in slots12:
                        if g2 != g:
                            continue
                        c = np.trace(dagger(u) @ tsg) / (g + 1)
                        if c != 0:
                            s_mat[np.ix_(range(off12, off12 + dg), cols)] += c * dagger(blk)
        return s_mat


def make_embedding(mu):
    """F(word r) = (C^2)^(x r) with identity inclusions."""
    return EmbeddingFunctor(mu)


def make_weight_zero(mu):
    """Zero-weight subspace functor (balanced basis strings)."""
    return WeightZeroFunctor(mu)


def make_fiber(mu, datum):
    """Tensor functor through another duality datum of the same mu."""
    if abs(datum.mu - mu) > 0:
        raise ValueError("datum deformation does not match mu")
    return FiberFunctor(datum)


# ---------------------------------------------------------------- axioms


@dataclass
class AxiomReport:
    """Max residual per functor axiom over the checked word range."""

    residuals: dict = field(default_factory=dict)

    def worst(self):
        return max(self.residuals.values()) if self.residuals else 0.0

    def ok(self, tol=DEFAULT_TOL):
        return self.worst() <= tol.eq_tol

    def failures(self, tol=DEFAULT_TOL):
        return {k: v for k, v in self.residuals.items() if v > tol.eq_tol}


def check_axioms(functor, max_len=4, tol=DEFAULT_TOL):
    """Verify the quasitensor *-functor axioms on all word splittings
    of total length <= max_len, and naturality / *-compatibility over
    intertwiner space bases.  Returns the per-axiom max residuals."""
    cat = functor.category
    res = {
        "unit": 0.0, "inclusion_isometry": 0.0, "associativity": 0.0,
        "projection_order": 0.0, "naturality": 0.0,
        "star": 0.0, "multiplicativity": 0.0,
    }

    res["unit"] = max(res["unit"], float(abs(functor.dim(0) - 1)))
    for r in range(0, max_len + 1):
        eye = np.eye(functor.dim(r))
        res["unit"] = max(res["unit"], residual(functor.incl(r, 0) - eye),
                          residual(functor.incl(0, r) - eye))

    for a in range(1, max_len):
        for b in range(1, max_len - a + 1):
            s = functor.incl(a, b)
            res["inclusion_isometry"] = max(
                res["inclusion_isometry"],
                residual(dagger(s) @ s - np.eye(functor.dim(a) * functor.dim(b))))

    for a in range(1, max_len - 1):
        for b in range(1, max_len - a):
            for c in range(1, max_len - a - b + 1):
                left = functor.incl(a + b, c) @ np.kron(functor.incl(a, b),
                                                        np.eye(functor.dim(c)))
                right = functor.incl(a, b + c) @ np.kron(np.eye(functor.dim(a)),
                                                         functor.incl(b, c))
                res["associativity"] = max(res["associativity"], residual(left - right))
                e_triple = left @ dagger(left)
                e_lc = functor.incl(a + b, c) @ dagger(functor.incl(a + b, c))
                e_rc = functor.incl(a, b + c) @ dagger(functor.incl(a, b + c))
                res["projection_order"] = max(
                    res["projection_order"],
                    residual(e_lc @ e_rc - e_triple),
                    residual(e_lc @ e_rc - e_rc @ e_lc))

    hom_pairs = [(1, 1), (2, 2), (0, 2), (2, 0), (1, 3), (3, 1)]
    arrows = {}
    for (p, q) in hom_pairs:
        if max(p, q) > max_len:
            continue
        arrows[(p, q)] = cat.hom_space(p, q)[:2]

    for (p1, q1), basis1 in arrows.items():
        for t in basis1:
            res["star"] = max(res["star"], residual(
                functor.apply(dagger(t), q1, p1) - dagger(functor.apply(t, p1, q1))))
        for (p2, q2), basis2 in arrows.items():
            if p2 == q1:
                for t in basis1:
                    for s in basis2:
                        lhs = functor.apply(s @ t, p1, q2)
                        rhs = functor.apply(s, p2, q2) @ functor.apply(t, p1, q1)
                        res["multiplicativity"] = max(res["multiplicativity"],
                                                      residual(lhs - rhs))
            if p1 + p2 <= max_len and q1 + q2 <= max_len:
                for t in basis1:
                    for s in basis2:
                        lhs = functor.apply(np.kron(t, s), p1 + p2, q1 + q2) @ functor.incl(p1, p2)
                        rhs = functor.incl(q1, q2) @ np.kron(
                            functor.apply(t, p1, q1), functor.apply(s, p2, q2))
                        res["naturality"] = max(res["naturality"], residual(lhs - rhs))

    return AxiomReport(res)


# ------------------------------------------------------- pushed conjugates


@dataclass
class PushedConjugate:
    """Conjugate solution for F(u), obtained by pushing the category
    solution through the functor and compressing by the inclusion."""

    object: object
    Rhat: np.ndarray
    Rbarhat: np.ndarray
    J: AntilinearMap
    eq_residual: float = 0.0

    @property
    def dim(self):
        return self.J.mat.shape[1]

    @property
    def j(self):
        """Alias so pushed solutions plug into the same bullet solver."""
        return self.J

    @property
    def is_empty(self):
        return self.dim == 0

    @property
    def norm_R(self):
        return float(np.linalg.norm(self.Rhat))

    @property
    def norm_Rbar(self):
        return float(np.linalg.norm(self.Rbarhat))


def _conjugate_eq_residual(jm, jb):
    d = jm.shape[0]
    if d == 0:
        return 0.0
    return max(residual(jm @ np.conj(jb) - np.eye(d)),
               residual(jb @ np.conj(jm) - np.eye(d)))


def push_conjugate(functor, u, c, tol=DEFAULT_TOL):
    """Push a conjugate solution through the functor:
    Rhat = S* F(R), Rbarhat = S* F(Rbar), J from the reshape of Rhat.
    For an irreducible the compression runs through the pair carrier.
    Empty result when F(u) = 0."""
    if isinstance(u, ObjectWord):
        r = u.length
        fr = functor.apply(c.R, 0, 2 * r)
        frb = functor.apply(c.Rbar, 0, 2 * r)
        s = functor.incl(r, r)
        rhat = dagger(s) @ fr
        rbarhat = dagger(s) @ frb
        d = functor.dim(r)
    elif isinstance(u, IrrepLabel):
        n = u.n
        d = functor.dim_irrep(n)
        if d == 0:
            z = np.zeros((0, 1), dtype=np.complex128)
            return PushedConjugate(u, z, z, AntilinearMap(np.zeros((0, 0))))
        rhat, rbarhat = functor.push_irrep_vectors(n, c)
    else:
        raise TypeError(f"unsupported object {u!r}")
    jm = rhat.reshape(d, d)
    jb = rbarhat.reshape(d, d)
    eq = _conjugate_eq_residual(jm, jb)
    scale = max(1.0, float(np.linalg.norm(jm)) ** 2)
    if eq > 1e-6 * scale:
        raise ValueError(f"pushed solution violates the conjugate equations, "
                         f"residual {eq:.3e}")
    return PushedConjugate(u, rhat.reshape(-1, 1), rbarhat.reshape(-1, 1),
                           AntilinearMap(jm), eq)


@dataclass
class DimensionBounds:
    """mult = dim F(u); qmult = |Rhat||Rbarhat| (norm route) with the
    trace-formula value alongside; qdim = intrinsic dimension of the
    category solution.  Always mult <= qmult <= qdim."""

    mult: int
    qmult: float
    qmult_trace: float
    qdim: float

    def __iter__(self):
        return iter((self.mult, self.qmult, self.qdim))


def dimension_bounds(functor, irrep, c, tol=DEFAULT_TOL):
    """Multiplicity and quantum multiplicity of an irreducible under
    the functor, bounded by the quantum dimension."""
    n = irrep.n if isinstance(irrep, IrrepLabel) else int(irrep)
    qdim = c.intrinsic_dim
    mult = functor.dim_irrep(n)
    if mult == 0:
        return DimensionBounds(0, 0.0, 0.0, qdim)
    pc = push_conjugate(functor, IrrepLabel(n), c, tol)
    qmult = pc.norm_R * pc.norm_Rbar
    m = pc.J.mat
    g = m @ dagger(m)
    qmult_trace = float(np.sqrt(np.trace(g).real * np.trace(np.linalg.inv(g)).real))
    if abs(qmult - qmult_trace) > 1e-6 * max(1.0, qmult):
        raise ValueError(f"quantum multiplicity routes disagree: "
                         f"{qmult} vs {qmult_trace}")
    slack = 1e-8 * max(1.0, qdim)
    if not (mult <= qmult + slack and qmult <= qdim + slack):
        raise ValueError(f"dimension chain violated: {mult} <= {qmult} <= {qdim}")
    return DimensionBounds(mult, qmult, qmult_trace, qdim)


def equality_case_probe(functor, irrep, c, tol=DEFAULT_TOL):
    """True when F(R) and F(Rbar) lie in the image of the inclusion,
    the equality case qmult = qdim."""
    n = irrep.n if isinstance(irrep, IrrepLabel) else int(irrep)
    w = functor.category.irrep_isometry(n)
    ww = np.kron(w, w)
    pair = functor.pair_carrier_isometry(n, n)
    s = functor.incl_irrep(n, n)
    e = s @ dagger(s)
    ok = True
    for vec in (c.R, c.Rbar):
        fv = dagger(pair) @ functor.apply(ww @ vec, 0, 2 * n)
        defect = float(np.linalg.norm(fv - e @ fv))
        ok = ok and defect <= tol.eq_tol * max(1.0, float(np.linalg.norm(fv)))
    return ok


# ---------------------------------------------------------- serialization


def _mat_to_lists(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _mat_from_lists(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows],
                    dtype=np.complex128)


def functor_to_data(functor, max_label):
    """Export a tensor-type functor (the pair inclusions are unitary, so
    multiplicities multiply) as per-irreducible dimensions plus
    inclusion blocks.  Proper quasitensor functors have no block
    presentation in this format and are rejected."""
    dims = {n: functor.dim_irrep(n) for n in range(max_label + 1)}
    blocks = {}
    for a in range(1, max_label + 1):
        for b in range(1, max_label + 1):
            if a + b > max_label or dims[a] == 0 or dims[b] == 0:
                continue
            per = {}
            s_irr = functor.incl_irrep(a, b)
            if s_irr.shape[0] != dims[a] * dims[b]:
                raise ValueError(
                    f"pair {(a, b)} has a proper inclusion "
                    f"({s_irr.shape[0]} < {dims[a] * dims[b]}); only "
                    f"tensor-type functors export to block form")
            for g, s_g in functor.category.fusion(a, b):
                if g > max_label or dims.get(g, 0) == 0:
                    continue
                per[g] = dagger(s_irr) @ functor.fusion_image(a, b, g, s_g)
            blocks[(a, b)] = per
    return dims, blocks


def save_functor(path, functor, max_label):
    dims, blocks = functor_to_data(functor, max_label)
    payload = {
        "schema_version": 1,
        "mu": functor.mu,
        "max_label": max_label,
        "dims": {str(n): d for n, d in dims.items()},
        "blocks": {f"{a},{b}": {str(g): _mat_to_lists(m) for g, m in per.items()}
                   for (a, b), per in blocks.items()},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
    return payload


def load_functor(source, tol=DEFAULT_TOL):
    """Load an assembled functor from a JSON file path or a dict.
    Dimensions and inclusion blocks are validated on load; the functor
    axioms are the caller's responsibility (run check_axioms)."""
    if isinstance(source, dict):
        payload = source
    else:
        with open(source) as fh:
            payload = json.load(fh)
    if payload.get("schema_version") != 1:
        raise ValueError(f"unsupported schema_version {payload.get('schema_version')!r}")
    mu = float(payload["mu"])
    dims = {int(n): int(d) for n, d in payload["dims"].items()}
    blocks = {}
    for key, per in payload.get("blocks", {}).items():
        a, b = (int(x) for x in key.split(","))
        blocks[(a, b)] = {int(g): _mat_from_lists(m) for g, m in per.items()}
    return AssembledFunctor(mu, dims, blocks,
                            max_label=payload.get("max_label"), tol=tol)
