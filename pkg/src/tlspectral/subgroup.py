"""Subspace families over tensor words, their bracket spaces, and the
character-to-embedding constructor.

A family assigns to each word length a subspace of the word carrier
(C^2)^(x)r.  The checker certifies the closure conditions under which
such a family consists of the invariant vectors of a closed quantum
subgroup: triviality at the empty word, equivariance under the diagram
arrows, stability under right contraction by selected vectors and under
middle insertion of them, and exchange with the conjugation maps.  The
bracket spaces assemble the arrow spaces those conditions generate, and
a *-character of a spectral algebra is turned into the isometric
natural family embedding its functor into the word carriers.
"""
from dataclasses import dataclass, field

import numpy as np

from .numerics import DEFAULT_TOL, column_space_isometry, dagger, residual
from .repcat import ObjectWord, rep_category
from .spectral import BasisLabel, multiplicity_map

__all__ = [
    "SubspaceFamily",
    "full_family",
    "weight_zero_family",
    "FamilyReport",
    "check_family",
    "BracketSpace",
    "bracket_space",
    "CharacterTransformation",
    "character_from_values",
    "character_to_transformation",
]


@dataclass(frozen=True)
class SubspaceFamily:
    """Per word length, an isometry whose range is the selected
    subspace of the word carrier.  A zero-width matrix marks a trivial
    subspace."""

    isometries: dict

    def __post_init__(self):
        iso = {}
        for r, s in self.isometries.items():
            r = int(r)
            s = np.asarray(s, dtype=np.complex128)
            if s.ndim != 2 or s.shape[0] != 2 ** r:
                raise ValueError(f"word {r} isometry has shape {s.shape}, "
                                 f"expected {2 ** r} rows")
            if residual(dagger(s) @ s - np.eye(s.shape[1])) > 1e-9:
                raise ValueError(f"word {r} columns are not orthonormal")
            iso[r] = s
        if 0 not in iso:
            raise ValueError("family must cover the empty word")
        object.__setattr__(self, "isometries", iso)

    @property
    def max_len(self):
        return max(self.isometries)

    def isometry(self, r):
        if r not in self.isometries:
            raise ValueError(f"family has no data for word length {r}")
        return self.isometries[r]

    def dim(self, r):
        return self.isometry(r).shape[1]

    def projection(self, r):
        s = self.isometry(r)
        return s @ dagger(s)


def full_family(max_len):
    """The family selecting everything; trivial subgroup."""
    return SubspaceFamily({r: np.eye(2 ** r) for r in range(max_len + 1)})


def weight_zero_family(max_len):
    """Balanced-string subspaces: the vectors fixed by the diagonal
    circle acting on every tensor slot."""
    iso = {}
    for r in range(max_len + 1):
        cols = [s for s in range(2 ** r) if 2 * bin(s).count("1") == r]
        m = np.zeros((2 ** r, len(cols)))
        for c, s in enumerate(cols):
            m[s, c] = 1.0
        iso[r] = m
    return SubspaceFamily(iso)


@dataclass
class FamilyReport:
    """Max residual per family condition over the checked word range."""

    residuals: dict = field(default_factory=dict)

    def worst(self):
        return max(self.residuals.values()) if self.residuals else 0.0

    def ok(self, tol=DEFAULT_TOL):
        return self.worst() <= tol.eq_tol

    def failures(self, tol=DEFAULT_TOL):
        return {k: v for k, v in self.residuals.items() if v > tol.eq_tol}


def _perp_defect(proj, cols):
    """Largest column defect of cols from the range of proj."""
    if cols.shape[1] == 0:
        return 0.0
    return residual(cols - proj @ cols)


def check_family(family, mu, max_len=None, tol=DEFAULT_TOL):
    """Residuals of the subgroup conditions on word lengths up to
    max_len.  Insertion conditions run over all splits of the range and
    all basis vectors of the selected subspaces."""
    cat = rep_category(mu)
    top = family.max_len if max_len is None else int(max_len)
    if top > family.max_len:
        raise ValueError(f"family only covers words up to {family.max_len}")
    proj = {r: family.projection(r) for r in range(top + 1)}
    sel = {r: family.isometry(r) for r in range(top + 1)}
    res = {k: 0.0 for k in
           ("unit", "equivariance", "projection_tensor",
            "projection_tensor_mirror", "right_contraction",
            "tensor_product", "conjugation", "middle_insertion",
            "invariant_vectors")}

    res["unit"] = float(abs(family.dim(0) - 1))

    for p in range(top + 1):
        for q in range(top + 1):
            for t in cat.hom_space(p, q):
                scale = max(1.0, float(np.abs(t).max()))
                res["equivariance"] = max(
                    res["equivariance"],
                    residual(t @ proj[p] - proj[q] @ t) / scale)

    for p in range(top + 1):
        for q in range(top + 1 - p):
            ep, eq, epq = proj[p], proj[q], proj[p + q]
            pair = np.kron(ep, eq)
            res["projection_tensor"] = max(
                res["projection_tensor"],
                residual(pair - np.kron(np.eye(2 ** p), eq) @ epq))
            res["projection_tensor_mirror"] = max(
                res["projection_tensor_mirror"],
                residual(pair - np.kron(ep, np.eye(2 ** q)) @ epq))
            res["tensor_product"] = max(
                res["tensor_product"],
                _perp_defect(epq, np.kron(sel[p], sel[q])))
            for k in range(family.dim(q)):
                rk_star = np.kron(np.eye(2 ** p), dagger(sel[q][:, k:k + 1]))
                res["right_contraction"] = max(
                    res["right_contraction"],
                    _perp_defect(ep, rk_star @ sel[p + q]))

    for r in range(1, top + 1):
        j = cat.conjugate_word(r).j
        moved = j.mat @ np.conj(sel[r])
        res["conjugation"] = max(
            res["conjugation"],
            _perp_defect(proj[r], column_space_isometry(moved)))
        arrows = [t for t in cat.hom_space(0, r)]
        for t in arrows:
            res["invariant_vectors"] = max(
                res["invariant_vectors"],
                _perp_defect(proj[r], t / np.linalg.norm(t)))

    for p in range(top + 1):
        for q in range(1, top + 1 - p):
            for s in range(top + 1 - p - q):
                target = proj[p + q + s]
                for c in range(family.dim(q)):
                    phi = sel[q][:, c:c + 1]
                    mid = np.kron(np.eye(2 ** p),
                                  np.kron(phi, np.eye(2 ** s)))
                    res["middle_insertion"] = max(
                        res["middle_insertion"],
                        _perp_defect(target, mid @ sel[p + s]))

    return FamilyReport(res)


# ---------------------------------------------------------- bracket spaces


@dataclass(frozen=True)
class BracketSpace:
    """Span of the arrows contracted out of a selected subspace of the
    joint conjugate word: the (u, v) arrow space of the category the
    family generates."""

    u: ObjectWord
    v: ObjectWord
    basis: tuple

    @property
    def dimension(self):
        return len(self.basis)

    def _stack(self):
        return np.stack([b.reshape(-1) for b in self.basis], axis=1) \
            if self.basis else np.zeros((2 ** (self.u.length + self.v.length), 0))

    def span_residual(self, t):
        """Relative distance of an arrow from the span."""
        t = np.asarray(t, dtype=np.complex128)
        vec = t.reshape(-1, 1)
        scale = max(1.0, float(np.abs(t).max()))
        if not self.basis:
            return residual(vec) / scale
        b = self._stack()
        return residual(vec - b @ (dagger(b) @ vec)) / scale

    def contains(self, t, tol=DEFAULT_TOL):
        return self.span_residual(t) <= tol.eq_tol


def _word_len(u):
    return u.length if isinstance(u, ObjectWord) else int(u)


def bracket_space(family, u, v, mu, solution=None):
    """Arrow space built from the family: contract the conjugate half
    of the left word against the selected subspace of the joint word.
    Any conjugate solution for the left word gives the same span; one
    may be passed to exercise that freedom."""
    p, q = _word_len(u), _word_len(v)
    cat = rep_category(mu)
    sol = cat.conjugate_word(p) if solution is None else solution
    rbar = np.asarray(sol.Rbar, dtype=np.complex128).reshape(-1, 1)
    left = np.kron(dagger(rbar), np.eye(2 ** q))
    phis = family.isometry(p + q)
    vecs = []
    for c in range(phis.shape[1]):
        t = left @ np.kron(np.eye(2 ** p), phis[:, c:c + 1])
        vecs.append(t.reshape(-1))
    if vecs:
        iso = column_space_isometry(np.stack(vecs, axis=1))
    else:
        iso = np.zeros((2 ** (p + q), 0))
    basis = tuple(iso[:, c].reshape(2 ** q, 2 ** p)
                  for c in range(iso.shape[1]))
    return BracketSpace(ObjectWord(p), ObjectWord(q), basis)


# ----------------------------------------------- characters to embeddings


@dataclass
class CharacterTransformation:
    """Isometries carrying the functor spaces of a spectral algebra
    into the word carriers, one per word and one per grade, built from
    a *-character and verified natural."""

    algebra: object
    word_maps: dict
    irrep_maps: dict
    character_residual: float = 0.0
    isometry_residual: float = 0.0
    naturality_residual: float = 0.0

    def induced_family(self):
        """Ranges of the word maps as a subspace family."""
        return SubspaceFamily(dict(self.word_maps))


def character_from_values(values):
    """Linear extension of per-label values to algebra elements.
    Labels may be BasisLabel or (n, i, a) tuples."""
    table = {}
    for k, v in values.items():
        lab = k if isinstance(k, BasisLabel) else BasisLabel(*k)
        table[lab] = complex(v)

    def chi(x):
        total = 0j
        for lab, c in x.items():
            if lab not in table:
                raise ValueError(f"character has no value at {lab}")
            total += c * table[lab]
        return total

    return chi


def character_to_transformation(chi, algebra, max_word=3, tol=DEFAULT_TOL):
    """Build the natural isometries eta_u[x, t] = chi(c_u[t][x]*) from
    a *-character.  The functional is validated as multiplicative and
    star-preserving on basis samples first; the resulting maps are
    checked to be isometries compatible with the word inclusions."""
    labs = algebra.basis(min(2, algebra.max_spin))
    worst = abs(chi(algebra.unit) - 1.0)
    for lx in labs:
        x = algebra.basis_element(lx)
        worst = max(worst, abs(chi(x.star()) - np.conj(chi(x))))
        for ly in labs:
            y = algebra.basis_element(ly)
            worst = max(worst, abs(chi(x * y) - chi(x) * chi(y)))
    if worst > tol.eq_tol:
        raise ValueError(f"functional is not a *-character, "
                         f"residual {worst:.3e}")

    word_maps = {0: np.ones((1, 1), dtype=np.complex128)}
    for r in range(1, max_word + 1):
        mm = multiplicity_map(algebra, ObjectWord(r))
        rows, cols = algebra.functor.dim(r), 2 ** r
        eta = np.zeros((cols, rows), dtype=np.complex128)
        for t in range(rows):
            for x in range(cols):
                eta[x, t] = chi(mm.entries[t][x].star())
        word_maps[r] = eta
    irrep_maps = {}
    for n in algebra.grades:
        eta = np.zeros((n + 1, algebra.dim(n)), dtype=np.complex128)
        for k in range(algebra.dim(n)):
            for a in range(n + 1):
                eta[a, k] = chi(algebra.basis_element(n, k, a).star())
        irrep_maps[n] = eta

    iso_res = 0.0
    for eta in (*word_maps.values(), *irrep_maps.values()):
        iso_res = max(iso_res,
                      residual(dagger(eta) @ eta - np.eye(eta.shape[1])))

    nat = 0.0
    f = algebra.functor
    for r1 in range(1, max_word):
        for r2 in range(1, max_word + 1 - r1):
            if word_maps[r1].shape[1] == 0 or word_maps[r2].shape[1] == 0:
                continue
            lhs = word_maps[r1 + r2] @ np.conj(f.incl(r1, r2))
            rhs = np.kron(word_maps[r1], word_maps[r2])
            nat = max(nat, residual(lhs - rhs))

    out = CharacterTransformation(algebra, word_maps, irrep_maps,
                                  worst, iso_res, nat)
    if max(iso_res, nat) > tol.eq_tol:
        raise ValueError(f"character does not induce a natural isometric "
                         f"family, residuals {iso_res:.3e} / {nat:.3e}")
    return out
