"""Temperley-Lieb diagram calculus and its evaluation into matrices.

Diagrams are planar pairings of boundary points of a rectangle,
numbered bottom left-to-right then top left-to-right.  Composition
stacks diagrams and converts each closed loop into a factor of the
loop parameter delta = mu + 1/mu.

Evaluation through a duality datum sends a reduced diagram to the
tensor contraction with cup |-> R_vec, cap |-> R_vec*, through strand
|-> identity.  It is monoidal, linear and *-preserving on diagrams.
Note that stacking and matrix product follow different normalizations:
the matrix-side loop value is R*R = 1 + mu^2 while the diagram side
uses delta, and straightening a zigzag costs a factor -mu, so
evaluation of a stacked composite is not the product of the evaluated
factors.  Nothing downstream relies on that identity.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from .numerics import dagger

__all__ = [
    "LoopParameter",
    "TLDiagram",
    "TLMorphism",
    "DualityDatum",
    "q_number",
    "tl_basis",
    "compose",
    "tensor",
    "jones_wenzl",
    "evaluate",
]


def q_number(k, delta):
    """Chebyshev q-integer [k]: [0]=0, [1]=1, [k+1] = delta*[k] - [k-1]."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    a, b = 0.0, 1.0  # [0], [1]
    for _ in range(k):
        a, b = b, delta * b - a
    return a


@dataclass(frozen=True)
class LoopParameter:
    """Value of a closed loop in the diagram category."""

    delta: float

    def __post_init__(self):
        if not (self.delta >= 2.0):
            raise ValueError(f"delta must be >= 2, got {self.delta}")

    @classmethod
    def from_mu(cls, mu):
        if not (0.0 < mu <= 1.0):
            raise ValueError(f"mu must be in (0, 1], got {mu}")
        return cls(mu + 1.0 / mu)


def _boundary_order(n_in, n_out):
    """Boundary points in cyclic order: bottom left-to-right, then top
    right-to-left.  Noncrossing in this order = planar in the rectangle."""
    return list(range(n_in)) + list(range(n_in + n_out - 1, n_in - 1, -1))


@dataclass(frozen=True)
class TLDiagram:
    """Planar pairing of n_in bottom and n_out top points, with an
    optional count of free closed loops."""

    n_in: int
    n_out: int
    pairing: tuple  # tuple of (p, q) with p < q, sorted
    loops: int = 0

    def __post_init__(self):
        n = self.n_in + self.n_out
        if n % 2 != 0:
            raise ValueError("n_in + n_out must be even")
        if self.loops < 0:
            raise ValueError("loops must be nonnegative")
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairing))
        object.__setattr__(self, "pairing", pairs)
        seen = [p for pair in pairs for p in pair]
        if sorted(seen) != list(range(n)):
            raise ValueError(f"pairing must cover 0..{n-1} exactly once")
        pos = {p: i for i, p in enumerate(_boundary_order(self.n_in, self.n_out))}
        for a, b in pairs:
            for c, d in pairs:
                if (a, b) >= (c, d):
                    continue
                lo, hi = sorted((pos[a], pos[b]))
                inside = (lo < pos[c] < hi) + (lo < pos[d] < hi)
                if inside == 1:
                    raise ValueError(f"crossing pairs {(a, b)} and {(c, d)}")

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple((i, n + i) for i in range(n)))

    @classmethod
    def cup(cls):
        """The arc 0 -> 2."""
        return cls(0, 2, ((0, 1),))

    @classmethod
    def cap(cls):
        """The arc 2 -> 0."""
        return cls(2, 0, ((0, 1),))

    @classmethod
    def generator(cls, n, i):
        """E_i on n strands: cap at bottom (i, i+1), cup at top (i, i+1)."""
        if not (0 <= i < n - 1):
            raise ValueError("generator index out of range")
        pairs = [(i, i + 1), (n + i, n + i + 1)]
        pairs += [(j, n + j) for j in range(n) if j not in (i, i + 1)]
        return cls(n, n, tuple(pairs))

    def dagger(self):
        """Vertical flip."""
        def flip(p):
            return self.n_out + p if p < self.n_in else p - self.n_in

        return TLDiagram(self.n_out, self.n_in,
                         tuple(tuple(sorted((flip(a), flip(b)))) for a, b in self.pairing),
                         self.loops)

    def shift(self, d_in, d_out, new_n_in, new_n_out):
        """Renumber into a larger diagram (used by tensor)."""
        def mv(p):
            if p < self.n_in:
                return p + d_in
            return p - self.n_in + new_n_in + d_out

        return tuple(tuple(sorted((mv(a), mv(b)))) for a, b in self.pairing)


def _noncrossing_matchings(seq):
    """All noncrossing perfect matchings of the ordered list seq,
    generated recursively (partner of seq[0] ascending)."""
    if not seq:
        return [[]]
    out = []
    first = seq[0]
    for k in range(1, len(seq), 2):
        inside = seq[1:k]
        outside = seq[k + 1:]
        for mi in _noncrossing_matchings(inside):
            for mo in _noncrossing_matchings(outside):
                out.append([(first, seq[k])] + mi + mo)
    return out


def tl_basis(n_in, n_out):
    """All planar (n_in -> n_out) diagrams in a deterministic order.
    Empty when n_in + n_out is odd.  The count is the Catalan number
    C_{(n_in+n_out)/2}."""
    if (n_in + n_out) % 2 != 0:
        return []
    if n_in + n_out == 0:
        return [TLDiagram(0, 0, ())]
    seq = _boundary_order(n_in, n_out)
    return [TLDiagram(n_in, n_out, tuple(m)) for m in _noncrossing_matchings(seq)]


@dataclass
class TLMorphism:
    """Finitely supported complex combination of diagrams of one type."""

    n_in: int
    n_out: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for d in self.coeffs:
            if (d.n_in, d.n_out) != (self.n_in, self.n_out):
                raise ValueError("all diagrams must share (n_in, n_out)")

    @classmethod
    def from_diagram(cls, d, c=1.0):
        return cls(d.n_in, d.n_out, {d: complex(c)})

    @classmethod
    def identity(cls, n):
        return cls.from_diagram(TLDiagram.identity(n))

    def __add__(self, other):
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            raise ValueError("type mismatch in addition")
        co = dict(self.coeffs)
        for d, c in other.coeffs.items():
            co[d] = co.get(d, 0.0) + c
            if co[d] == 0:
                del co[d]
        return TLMorphism(self.n_in, self.n_out, co)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        c = complex(c)
        if c == 0:
            return TLMorphism(self.n_in, self.n_out, {})
        return TLMorphism(self.n_in, self.n_out,
                          {d: c * v for d, v in self.coeffs.items()})

    def dagger(self):
        return TLMorphism(self.n_out, self.n_in,
                          {d.dagger(): np.conj(c) for d, c in self.coeffs.items()})

    def max_coeff(self):
        if not self.coeffs:
            return 0.0
        return max(abs(c) for c in self.coeffs.values())


def _stack(f_diag, g_diag):
    """Stack g then f (f o g).  Returns (pairing, closed loop count)."""
    a, b, c = g_diag.n_in, g_diag.n_out, f_diag.n_out
    # node ids: bottom 0..a-1, middle a..a+b-1, top a+b..a+b+c-1
    adj = {}

    def link(x, y):
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)

    for p, q in g_diag.pairing:
        link(p if p < a else p, q)  # g points already 0..a+b-1
    for p, q in f_diag.pairing:
        link(a + p, a + q)  # f bottom i -> middle a+i, f top j -> a+b+(j-b)
    ext = set(range(a)) | set(range(a + b, a + b + c))
    seen = set()
    pairs, loops = [], 0
    for start in list(adj):
        if start in seen:
            continue
        # walk the strand/loop through the graph
        comp = []
        stack = [start]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            comp.append(x)
            stack.extend(adj[x])
        ends = sorted(x for x in comp if x in ext)
        if not ends:
            loops += 1
        else:
            assert len(ends) == 2, "strand must have exactly two boundary ends"
            pairs.append(tuple(ends))

    def relabel(x):
        return x if x < a else x - b

    pairing = tuple(tuple(sorted((relabel(p), relabel(q)))) for p, q in pairs)
    return pairing, loops


def compose(f, g, loop):
    """f o g (g first), with each closed loop replaced by a factor of
    loop.delta.  Free loop counts on the input diagrams are absorbed
    into coefficients the same way."""
    if g.n_out != f.n_in:
        raise ValueError(f"cannot compose {f.n_in}->{f.n_out} after {g.n_in}->{g.n_out}")
    delta = loop.delta
    out = TLMorphism(g.n_in, f.n_out, {})
    for df, cf in f.coeffs.items():
        for dg, cg in g.coeffs.items():
            pairing, nl = _stack(df, dg)
            nl += df.loops + dg.loops
            d = TLDiagram(g.n_in, f.n_out, pairing)
            out = out + TLMorphism.from_diagram(d, cf * cg * delta ** nl)
    return out


def tensor(f, g):
    """Side-by-side product, f on the left."""
    n_in = f.n_in + g.n_in
    n_out = f.n_out + g.n_out
    out = TLMorphism(n_in, n_out, {})
    for df, cf in f.coeffs.items():
        for dg, cg in g.coeffs.items():
            pairing = df.shift(0, 0, n_in, n_out) + dg.shift(f.n_in, f.n_out, n_in, n_out)
            d = TLDiagram(n_in, n_out, pairing, df.loops + dg.loops)
            out = out + TLMorphism.from_diagram(d, cf * cg)
    return out


_jw_cache = {}


def jones_wenzl(n, loop):
    """Jones-Wenzl idempotent on n strands via the Wenzl recursion

        p_n = p_{n-1} (x) 1  -  ([n-1]/[n]) (p_{n-1} (x) 1) E_{n-1} (p_{n-1} (x) 1)

    Diagrammatically idempotent and killed by every E_i for delta >= 2.
    Results are cached per (n, delta); cached values are never mutated,
    so concurrent reads are safe.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    key = (n, loop.delta)
    if key in _jw_cache:
        return _jw_cache[key]
    if n == 0:
        p = TLMorphism.from_diagram(TLDiagram(0, 0, ()))
    elif n == 1:
        p = TLMorphism.identity(1)
    else:
        pm = tensor(jones_wenzl(n - 1, loop), TLMorphism.identity(1))
        e = TLMorphism.from_diagram(TLDiagram.generator(n, n - 2))
        coeff = q_number(n - 1, loop.delta) / q_number(n, loop.delta)
        p = pm - compose(pm, compose(e, pm, loop), loop).scale(coeff)
    _jw_cache[key] = p
    return p


@dataclass(frozen=True)
class DualityDatum:
    """Carrier dimension n, deformation mu and the antilinear j (as a
    matrix composed with coordinate conjugation).  The cup vector is
    R = sum_i (j e_i) (x) e_i, i.e. the row-major reshape of j_mat.

    Validated on construction:  Trace(j*j) = 1 + mu^2  and
    j_mat conj(j_mat) = -mu 1  (the antilinear square j^2 = -mu)."""

    dim: int
    mu: float
    j_mat: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.mu <= 1.0):
            raise ValueError(f"mu must be in (0, 1], got {self.mu}")
        j = np.asarray(self.j_mat, dtype=np.complex128)
        if j.shape != (self.dim, self.dim):
            raise ValueError(f"j_mat must be {self.dim}x{self.dim}")
        object.__setattr__(self, "j_mat", j)
        norm_res = abs(np.trace(dagger(j) @ j).real - (1.0 + self.mu ** 2))
        if norm_res > 1e-9:
            raise ValueError(f"Trace(j*j) != 1 + mu^2, residual {norm_res:.3e}")
        sq_res = np.max(np.abs(j @ np.conj(j) + self.mu * np.eye(self.dim)))
        if sq_res > 1e-9:
            raise ValueError(f"j^2 != -mu, residual {sq_res:.3e}")

    @property
    def R_vec(self):
        return self.j_mat.reshape(self.dim * self.dim)

    @property
    def loop(self):
        return LoopParameter.from_mu(self.mu)

    @classmethod
    def standard(cls, mu):
        """j e_1 = -mu e_2, j e_2 = e_1; the cup evaluates to
        e_1 (x) e_2 - mu e_2 (x) e_1."""
        return cls(2, mu, np.array([[0.0, 1.0], [-mu, 0.0]]))

    @classmethod
    def pair_blocks(cls, mu, lambdas):
        """Even-dimensional datum from positive pair parameters:
        j e_{2k-1} = l_k e_{2k}, j e_{2k} = -(mu/l_k) e_{2k-1},
        subject to sum_k (l_k^2 + mu^2/l_k^2) = 1 + mu^2."""
        lambdas = [float(l) for l in lambdas]
        if not lambdas or any(l <= 0 for l in lambdas):
            raise ValueError("pair parameters must be positive")
        res = abs(sum(l * l + mu * mu / (l * l) for l in lambdas) - (1.0 + mu * mu))
        if res > 1e-9:
            raise ValueError(
                f"pair-block constraint violated, residual {res:.3e}")
        dim = 2 * len(lambdas)
        j = np.zeros((dim, dim))
        for k, l in enumerate(lambdas):
            j[2 * k + 1, 2 * k] = l
            j[2 * k, 2 * k + 1] = -mu / l
        return cls(dim, mu, j)


def _evaluate_diagram(d, datum):
    """Tensor contraction of one diagram: top arc -> R, bottom arc ->
    conj(R), through strand -> identity.  Free loops contribute
    delta = mu + 1/mu each."""
    n = datum.dim
    factor = (datum.mu + 1.0 / datum.mu) ** d.loops
    npts = d.n_in + d.n_out
    if npts == 0:
        return np.array([[factor]], dtype=np.complex128)
    if npts > len(string.ascii_letters):
        raise ValueError("diagram too large to evaluate")
    letter = dict(zip(range(npts), string.ascii_letters))
    operands, subs = [], []
    r = datum.j_mat
    eye = np.eye(n, dtype=np.complex128)
    for p, q in d.pairing:
        if p >= d.n_in:  # top arc, cup
            operands.append(r)
            subs.append(letter[p] + letter[q])
        elif q < d.n_in:  # bottom arc, cap
            operands.append(np.conj(r))
            subs.append(letter[p] + letter[q])
        else:  # through strand
            operands.append(eye)
            subs.append(letter[q] + letter[p])
    out = "".join(letter[p] for p in range(d.n_in, npts))
    out += "".join(letter[p] for p in range(d.n_in))
    m = np.einsum(",".join(subs) + "->" + out, *operands, optimize=True)
    return factor * m.reshape(n ** d.n_out, n ** d.n_in)


def evaluate(f, datum):
    """Evaluate a diagram or morphism through a duality datum.

    cup |-> R_vec as an n^2 x 1 matrix, cap |-> its adjoint, identity
    strand |-> 1_n; side-by-side |-> kron.  Linear in the morphism and
    *-preserving (dagger of the diagram gives the adjoint matrix).
    """
    if isinstance(f, TLDiagram):
        return _evaluate_diagram(f, datum)
    n = datum.dim
    out = np.zeros((n ** f.n_out, n ** f.n_in), dtype=np.complex128)
    for d, c in f.coeffs.items():
        out = out + c * _evaluate_diagram(d, datum)
    return out
