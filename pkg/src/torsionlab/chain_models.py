"""Finite simplicial and graded cochain models.

Combinatorial layer of the package: simplicial complexes closed under
faces, signed-incidence coboundaries (optionally twisted by a unitary
local system), Alexander-Whitney cup products, flux-twisted Z2-graded
differentials, and evaluation against a fundamental class.

Conventions
-----------
Simplices are strictly increasing vertex tuples.  The coboundary of a
p-cochain f is (delta f)(v_0..v_{p+1}) = sum_i (-1)^i f(drop v_i), so the
matrix of delta_p is the transpose of the signed boundary matrix.  With a
local system, cochain values sit in the fiber over the smallest vertex of
the simplex; only the drop-v_0 face term needs transport, by U(v_0,v_1)
conjugate-transposed.  Grams default to the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateSimplex,
    FluxError,
    FluxHasDegreeOne,
    FluxNotClosed,
    FluxNotNilpotent,
    GramNotPositive,
    InconsistentDimension,
    NonFlatLocalSystem,
    NotOriented,
    NotTopDegree,
    ValidationError,
)

__all__ = [
    "SimplicialComplex",
    "LocalSystem",
    "GradedCochainComplex",
    "Cochain",
    "TwistedComplex",
    "build_simplicial",
    "coboundary_matrices",
    "signed_incidence",
    "cup",
    "cup_operator",
    "twisted_differential",
    "pair_with_fundamental_class",
    "parity_degrees",
    "assemble_shift_blocks",
    "parity_gram",
]

_SQUARE_ZERO_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, order="C")
    out.setflags(write=False)
    return out


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a)) if a.size else 0.0


# ---------------------------------------------------------------------------
# simplicial complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Face-closed simplicial complex on integer vertices.

    ``simplices[p]`` lists the p-simplices in lexicographic order as
    strictly increasing vertex tuples.  ``orientation`` optionally assigns
    a sign in {+1, -1} to each top-dimensional simplex, in list order.
    """

    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    orientation: tuple[int, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.simplices)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** p * n for p, n in enumerate(self.f_vector))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.simplices[0])

    @cached_property
    def _index(self) -> tuple[dict[tuple[int, ...], int], ...]:
        return tuple(
            {simplex: i for i, simplex in enumerate(level)}
            for level in self.simplices
        )

    def index(self, p: int, simplex: tuple[int, ...]) -> int:
        return self._index[p][simplex]

    def n(self, p: int) -> int:
        """Number of p-simplices; zero outside the supported range."""
        if 0 <= p <= self.dim:
            return len(self.simplices[p])
        return 0


def _normalize_simplex(raw: Iterable[int]) -> tuple[int, ...]:
    verts = tuple(int(v) for v in raw)
    if not verts:
        raise ValueError("empty simplex")
    if any(v < 0 for v in verts):
        raise ValueError(f"negative vertex id in {verts}")
    if len(set(verts)) != len(verts):
        raise ValueError(f"repeated vertex in simplex {verts}")
    return tuple(sorted(verts))


def build_simplicial(
    top_simplices: Iterable[Iterable[int]],
    orientation: Mapping[tuple[int, ...], int] | Sequence[int] | None = None,
    *,
    allow_mixed_dimension: bool = False,
) -> SimplicialComplex:
    """Close the given top simplices under faces.

    Parameters
    ----------
    top_simplices:
        Vertex tuples; order inside a tuple is ignored.
    orientation:
        Optional signs for the top simplices: either a mapping keyed by
        vertex tuple or a sequence in input order.  Requires uniform top
        dimension, and the signs must induce opposite orientations on
        every shared codimension-1 face.
    allow_mixed_dimension:
        Accept tops of different dimensions.  Off by default.
    """
    tops = [_normalize_simplex(t) for t in top_simplices]
    if not tops:
        raise ValueError("need at least one top simplex")
    seen: set[tuple[int, ...]] = set()
    for t in tops:
        if t in seen:
            raise DuplicateSimplex(f"top simplex {t} supplied twice")
        seen.add(t)
    top_dims = {len(t) - 1 for t in tops}
    if len(top_dims) > 1 and not allow_mixed_dimension:
        raise InconsistentDimension(
            f"top simplices of dimensions {sorted(top_dims)}; "
            "pass allow_mixed_dimension=True to accept"
        )

    dim = max(top_dims)
    levels: list[set[tuple[int, ...]]] = [set() for _ in range(dim + 1)]
    for t in tops:
        d = len(t) - 1
        for p in range(d + 1):
            levels[p].update(itertools.combinations(t, p + 1))
    simplices = tuple(tuple(sorted(level)) for level in levels)

    signs: tuple[int, ...] | None = None
    if orientation is not None:
        if len(top_dims) > 1:
            raise NotOriented("orientation requires uniform top dimension")
        if isinstance(orientation, Mapping):
            table = {_normalize_simplex(k): int(v) for k, v in orientation.items()}
            if set(table) != set(tops):
                raise NotOriented("orientation must cover exactly the top simplices")
            signs = tuple(table[t] for t in simplices[dim])
        else:
            listed = tuple(int(s) for s in orientation)
            if len(listed) != len(tops):
                raise NotOriented("orientation must give one sign per top simplex")
            order = {t: i for i, t in enumerate(tops)}
            # reorder the given signs to the lexicographic top-simplex order
            signs = tuple(listed[order[t]] for t in simplices[dim])
        if any(s not in (-1, 1) for s in signs):
            raise NotOriented("orientation signs must lie in {+1, -1}")
        _check_coherent(simplices[dim], signs)

    return SimplicialComplex(simplices=simplices, orientation=signs)


def _check_coherent(tops: Sequence[tuple[int, ...]], signs: Sequence[int]) -> None:
    # each interior codim-1 face must receive cancelling induced signs
    induced: dict[tuple[int, ...], list[int]] = {}
    for t, s in zip(tops, signs):
        for i in range(len(t)):
            face = t[:i] + t[i + 1:]
            induced.setdefault(face, []).append(s * (-1) ** i)
    for face, contribs in induced.items():
        if len(contribs) > 2:
            raise NotOriented(f"face {face} shared by {len(contribs)} top simplices")
        if len(contribs) == 2 and sum(contribs) != 0:
            raise NotOriented(f"incoherent orientation across face {face}")


def _is_connected(K: SimplicialComplex) -> bool:
    verts = K.simplices[0]
    if len(verts) <= 1:
        return True
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    if K.dim >= 1:
        for a, b in K.simplices[1]:
            ra, rb = find((a,)), find((b,))
            if ra != rb:
                parent[ra] = rb
    roots = {find(v) for v in verts}
    return len(roots) == 1


# ---------------------------------------------------------------------------
# local systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalSystem:
    """Unitary local system given by edge holonomies.

    ``holonomy`` maps a sorted edge (a, b) with a < b to the transport
    matrix from the fiber at a to the fiber at b.  Missing edges default
    to the identity.
    """

    rank: int
    holonomy: Mapping[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValidationError("local system rank must be >= 1")
        frozen = {}
        for (a, b), mat in self.holonomy.items():
            if not a < b:
                raise ValidationError(f"holonomy key {(a, b)} is not a sorted edge")
            m = _freeze(mat)
            if m.shape != (self.rank, self.rank):
                raise ValidationError(
                    f"holonomy for edge {(a, b)} has shape {m.shape}, "
                    f"expected {(self.rank, self.rank)}"
                )
            frozen[(a, b)] = m
        object.__setattr__(self, "holonomy", frozen)

    def transport(self, a: int, b: int) -> np.ndarray:
        """Transport matrix along the edge from vertex a to vertex b."""
        if a < b:
            U = self.holonomy.get((a, b))
            return np.eye(self.rank, dtype=np.complex128) if U is None else U
        U = self.holonomy.get((b, a))
        return np.eye(self.rank, dtype=np.complex128) if U is None else U.conj().T


def validate_local_system(K: SimplicialComplex, L: LocalSystem, tol: float = 1e-12) -> None:
    """Check unitarity on every edge and flatness on every triangle."""
    eye = np.eye(L.rank)
    for edge, U in L.holonomy.items():
        if _norm(U.conj().T @ U - eye) > tol * L.rank:
            raise NonFlatLocalSystem(f"holonomy on edge {edge} is not unitary")
    if K.dim >= 2:
        for a, b, c in K.simplices[2]:
            lhs = L.transport(b, c) @ L.transport(a, b)
            rhs = L.transport(a, c)
            if _norm(lhs - rhs) > tol * max(1.0, _norm(rhs)):
                raise NonFlatLocalSystem(
                    f"holonomy fails flatness on triangle {(a, b, c)}"
                )


# ---------------------------------------------------------------------------
# graded cochain complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GradedCochainComplex:
    """Finite cochain complex with optional Grams.

    ``coboundary[p]`` maps degree p to degree p+1 and has shape
    (dims[p+1], dims[p]).  ``gram`` is either None (identity inner
    products throughout) or one Hermitian positive definite matrix per
    degree.  ``simplicial`` remembers the complex a simplicial build came
    from, which unlocks cup products; ``local_rank`` is the fiber rank of
    the local system used during the build (1 when untwisted).
    """

    dims: tuple[int, ...]
    coboundary: tuple[np.ndarray, ...]
    gram: tuple[np.ndarray, ...] | None = None
    simplicial: SimplicialComplex | None = field(default=None, repr=False)
    local_rank: int = 1

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 0 for n in dims):
            raise ValidationError(f"bad dimension vector {dims}")
        object.__setattr__(self, "dims", dims)
        cob = tuple(_freeze(d) for d in self.coboundary)
        if len(cob) != len(dims) - 1:
            raise ValidationError(
                f"{len(cob)} coboundaries for {len(dims)} degrees; expected {len(dims) - 1}"
            )
        for p, d in enumerate(cob):
            if d.shape != (dims[p + 1], dims[p]):
                raise ValidationError(
                    f"coboundary {p} has shape {d.shape}, expected {(dims[p + 1], dims[p])}"
                )
        object.__setattr__(self, "coboundary", cob)
        for p in range(len(cob) - 1):
            a, b = cob[p + 1], cob[p]
            resid = _norm(a @ b)
            if resid > _SQUARE_ZERO_TOL * (1.0 + _norm(a) * _norm(b)):
                raise ValidationError(
                    f"coboundary does not square to zero at degree {p}: residual {resid:.3e}"
                )
        if self.gram is not None:
            grams = tuple(_freeze(g) for g in self.gram)
            if len(grams) != len(dims):
                raise ValidationError("need one Gram per degree")
            for p, g in enumerate(grams):
                _check_gram(g, dims[p], where=f"degree {p}")
            object.__setattr__(self, "gram", grams)

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def gram_at(self, p: int) -> np.ndarray:
        if self.gram is None:
            return np.eye(self.dims[p], dtype=np.complex128)
        return self.gram[p]

    def delta(self, p: int) -> np.ndarray:
        """Coboundary out of degree p; a zero-row matrix at the top."""
        if p < 0 or p > self.top:
            raise ValidationError(f"degree {p} outside 0..{self.top}")
        if p == self.top:
            return np.zeros((0, self.dims[p]), dtype=np.complex128)
        return self.coboundary[p]

    def with_gram(self, gram: Sequence[np.ndarray]) -> "GradedCochainComplex":
        return GradedCochainComplex(
            dims=self.dims,
            coboundary=self.coboundary,
            gram=tuple(gram),
            simplicial=self.simplicial,
            local_rank=self.local_rank,
        )


def _check_gram(g: np.ndarray, n: int, where: str) -> None:
    if g.shape != (n, n):
        raise GramNotPositive(f"Gram at {where} has shape {g.shape}, expected {(n, n)}")
    if _norm(g - g.conj().T) > 1e-12 * (1.0 + _norm(g)):
        raise GramNotPositive(f"Gram at {where} is not Hermitian")
    if n:
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise GramNotPositive(f"Gram at {where} is not positive definite") from None


def signed_incidence(K: SimplicialComplex, p: int) -> np.ndarray:
    """Integer matrix of delta_p for trivial coefficients.

    Shape (n_{p+1}, n_p); entry is (-1)^i when the column simplex is the
    i-th face of the row simplex.
    """
    rows, cols = K.n(p + 1), K.n(p)
    out = np.zeros((rows, cols), dtype=np.int64)
    if rows == 0 or cols == 0:
        return out
    for r, simplex in enumerate(K.simplices[p + 1]):
        for i in range(len(simplex)):
            face = simplex[:i] + simplex[i + 1:]
            out[r, K.index(p, face)] += (-1) ** i
    return out


def coboundary_matrices(
    K: SimplicialComplex,
    local_system: LocalSystem | None = None,
) -> GradedCochainComplex:
    """Assemble the cochain complex of K, optionally twisted by a flat
    unitary local system.

    The untwisted matrices are built over the integers and the square-zero
    identity is checked exactly before converting to complex numbers.
    """
    if local_system is None:
        deltas_int = [signed_incidence(K, p) for p in range(K.dim)]
        for p in range(len(deltas_int) - 1):
            prod = deltas_int[p + 1] @ deltas_int[p]
            if prod.size and np.any(prod):
                raise ValidationError(f"integer coboundary fails delta^2=0 at degree {p}")
        return GradedCochainComplex(
            dims=K.f_vector,
            coboundary=tuple(d.astype(np.complex128) for d in deltas_int),
            simplicial=K,
        )

    validate_local_system(K, local_system)
    m = local_system.rank
    dims = tuple(n * m for n in K.f_vector)
    deltas = []
    for p in range(K.dim):
        rows, cols = K.n(p + 1), K.n(p)
        block = np.zeros((rows * m, cols * m), dtype=np.complex128)
        eye = np.eye(m, dtype=np.complex128)
        for r, simplex in enumerate(K.simplices[p + 1]):
            for i in range(len(simplex)):
                face = simplex[:i] + simplex[i + 1:]
                c = K.index(p, face)
                if i == 0:
                    # value lives over face[0] = simplex[1]; pull back to simplex[0]
                    T = local_system.transport(simplex[1], simplex[0])
                else:
                    T = eye
                block[r * m:(r + 1) * m, c * m:(c + 1) * m] += (-1) ** i * T
        deltas.append(block)
    return GradedCochainComplex(
        dims=dims,
        coboundary=tuple(deltas),
        simplicial=K,
        local_rank=m,
    )


# ---------------------------------------------------------------------------
# cochains and cup products
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cochain:
    """Homogeneous cochain: a degree and a coefficient vector."""

    degree: int
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValidationError(f"negative cochain degree {self.degree}")
        c = _freeze(np.atleast_1d(self.coefficients))
        if c.ndim != 1:
            raise ValidationError("cochain coefficients must be a vector")
        object.__setattr__(self, "coefficients", c)

    @property
    def norm(self) -> float:
        return _norm(self.coefficients)


def _check_cochain_on(K: SimplicialComplex, a: Cochain) -> None:
    if a.coefficients.shape[0] != K.n(a.degree):
        raise ValidationError(
            f"degree-{a.degree} cochain has {a.coefficients.shape[0]} coefficients, "
            f"complex has {K.n(a.degree)} simplices"
        )


def cup(a: Cochain, b: Cochain, K: SimplicialComplex) -> Cochain:
    """Alexander-Whitney cup product of trivial-coefficient cochains.

    (a cup b)(v_0..v_{p+q}) = a(v_0..v_p) * b(v_p..v_{p+q}).  Associative
    and Leibniz-compatible with the coboundary, but not graded
    commutative.  When p+q exceeds the dimension of K the zero cochain is
    returned; that is the documented overflow behavior, not an error.
    """
    _check_cochain_on(K, a)
    _check_cochain_on(K, b)
    p, q = a.degree, b.degree
    d = p + q
    if d > K.dim:
        return Cochain(degree=d, coefficients=np.zeros(0, dtype=np.complex128))
    av, bv = a.coefficients, b.coefficients
    out = np.zeros(K.n(d), dtype=np.complex128)
    for r, simplex in enumerate(K.simplices[d]):
        front = simplex[:p + 1]
        back = simplex[p:]
        out[r] = av[K.index(p, front)] * bv[K.index(q, back)]
    return Cochain(degree=d, coefficients=out)


def cup_operator(K: SimplicialComplex, h: Cochain, q: int) -> np.ndarray:
    """Matrix of b -> h cup b from degree q into degree q + deg h."""
    _check_cochain_on(K, h)
    p = h.degree
    d = p + q
    if d > K.dim:
        return np.zeros((0, K.n(q)), dtype=np.complex128)
    hv = h.coefficients
    out = np.zeros((K.n(d), K.n(q)), dtype=np.complex128)
    for r, simplex in enumerate(K.simplices[d]):
        front = simplex[:p + 1]
        back = simplex[p:]
        out[r, K.index(q, back)] += hv[K.index(p, front)]
    return out


def pair_with_fundamental_class(K: SimplicialComplex, h: Cochain):
    """Evaluate a top-degree cochain against the oriented sum of top cells.

    Requires a coherently oriented, connected complex.  Coboundaries pair
    to zero, and the pairing is linear in h.  Returns a float when the
    value is real.
    """
    if K.orientation is None:
        raise NotOriented("complex carries no orientation")
    if not _is_connected(K):
        raise NotOriented("fundamental class needs a connected complex")
    if h.degree != K.dim:
        raise NotTopDegree(f"cochain degree {h.degree}, complex dimension {K.dim}")
    _check_cochain_on(K, h)
    signs = np.asarray(K.orientation, dtype=np.complex128)
    value = complex(signs @ h.coefficients)
    if value.imag == 0.0:
        return value.real
    return value


# ---------------------------------------------------------------------------
# Z2-graded assembly and twisted differentials
# ---------------------------------------------------------------------------

def parity_degrees(n_degrees: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Degrees of each parity, as (evens, odds)."""
    evens = tuple(q for q in range(n_degrees) if q % 2 == 0)
    odds = tuple(q for q in range(n_degrees) if q % 2 == 1)
    return evens, odds


def _offsets(dims: Sequence[int], degrees: Sequence[int]) -> dict[int, int]:
    out, acc = {}, 0
    for q in degrees:
        out[q] = acc
        acc += dims[q]
    return out


def assemble_shift_blocks(
    dims: Sequence[int],
    ops: Mapping[int, np.ndarray],
    shift: int,
    source_parity: int,
) -> np.ndarray:
    """Assemble a degree-homogeneous operator on one parity block.

    ``ops[q]`` maps degree q to degree q+shift and must have shape
    (dims[q+shift], dims[q]).  The result maps the direct sum of the
    source-parity degrees to the direct sum of the degrees of parity
    (source_parity + shift) mod 2, both ordered by increasing degree.
    """
    evens, odds = parity_degrees(len(dims))
    src = evens if source_parity % 2 == 0 else odds
    tgt = evens if (source_parity + shift) % 2 == 0 else odds
    src_off = _offsets(dims, src)
    tgt_off = _offsets(dims, tgt)
    rows = sum(dims[q] for q in tgt)
    cols = sum(dims[q] for q in src)
    out = np.zeros((rows, cols), dtype=np.complex128)
    for q, block in ops.items():
        tq = q + shift
        if q not in src_off or tq not in tgt_off:
            continue
        b = np.asarray(block, dtype=np.complex128)
        if b.shape != (dims[tq], dims[q]):
            raise ValidationError(
                f"block {q}->{tq} has shape {b.shape}, expected {(dims[tq], dims[q])}"
            )
        r0, c0 = tgt_off[tq], src_off[q]
        out[r0:r0 + dims[tq], c0:c0 + dims[q]] += b
    return out


def parity_gram(C: GradedCochainComplex, parity: int) -> np.ndarray:
    """Direct-sum Gram of the degrees with the given parity."""
    evens, odds = parity_degrees(len(C.dims))
    degs = evens if parity % 2 == 0 else odds
    blocks = [C.gram_at(q) for q in degs]
    if not blocks:
        return np.zeros((0, 0), dtype=np.complex128)
    total = sum(C.dims[q] for q in degs)
    out = np.zeros((total, total), dtype=np.complex128)
    at = 0
    for b in blocks:
        n = b.shape[0]
        out[at:at + n, at:at + n] = b
        at += n
    return out


@dataclass(frozen=True, eq=False)
class TwistedComplex:
    """Z2-graded complex with total differentials and parity Grams."""

    even_dim: int
    odd_dim: int
    d_even: np.ndarray
    d_odd: np.ndarray
    gram_even: np.ndarray
    gram_odd: np.ndarray

    def __post_init__(self) -> None:
        de = _freeze(self.d_even)
        do = _freeze(self.d_odd)
        if de.shape != (self.odd_dim, self.even_dim):
            raise ValidationError(f"d_even shape {de.shape} != {(self.odd_dim, self.even_dim)}")
        if do.shape != (self.even_dim, self.odd_dim):
            raise ValidationError(f"d_odd shape {do.shape} != {(self.even_dim, self.odd_dim)}")
        object.__setattr__(self, "d_even", de)
        object.__setattr__(self, "d_odd", do)
        ge = _freeze(self.gram_even)
        go = _freeze(self.gram_odd)
        _check_gram(ge, self.even_dim, where="even parity")
        _check_gram(go, self.odd_dim, where="odd parity")
        object.__setattr__(self, "gram_even", ge)
        object.__setattr__(self, "gram_odd", go)
        scale = 1.0 + _norm(de) * _norm(do)
        if _norm(do @ de) > _SQUARE_ZERO_TOL * scale or _norm(de @ do) > _SQUARE_ZERO_TOL * scale:
            raise FluxNotNilpotent("total differential does not square to zero")


def _flux_components(flux) -> list[Cochain]:
    if flux is None:
        return []
    if isinstance(flux, Cochain):
        items = [flux]
    else:
        items = list(flux)
    by_degree: dict[int, np.ndarray] = {}
    for h in items:
        if not isinstance(h, Cochain):
            raise FluxError(f"flux component of type {type(h).__name__}")
        if h.degree == 1:
            raise FluxHasDegreeOne("flux with a degree-1 component is rejected")
        if h.degree % 2 == 0 or h.degree < 3:
            raise FluxError(f"flux degree {h.degree}: components must have odd degree >= 3")
        if h.degree in by_degree:
            by_degree[h.degree] = by_degree[h.degree] + h.coefficients
        else:
            by_degree[h.degree] = np.array(h.coefficients)
    return [Cochain(degree=d, coefficients=v) for d, v in sorted(by_degree.items())]


def _unit_cup_operator(dims: Sequence[int], h: Cochain, q: int) -> np.ndarray | None:
    # minimal-model multiplication: unit law in degree 0, zero above
    top = len(dims) - 1
    d = h.degree
    rows = dims[q + d] if q + d <= top else 0
    cols = dims[q]
    if q != 0 or rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    if cols != 1:
        return None  # no canonical action on a fat degree 0
    return np.asarray(h.coefficients, dtype=np.complex128).reshape(rows, 1)


def twisted_differential(
    source: SimplicialComplex | GradedCochainComplex,
    flux=None,
    *,
    tol: float = _SQUARE_ZERO_TOL,
) -> TwistedComplex:
    """Deform the coboundary by odd-degree flux and fold to Z2 grading.

    ``source`` is a simplicial complex (cup products via Alexander-
    Whitney) or a graded cochain complex.  A bare complex without
    simplicial backing uses minimal-model multiplication: the flux acts
    on a one-dimensional degree 0 by the unit law and kills positive
    degrees, which is the wedge-of-spheres convention.  ``flux`` is one
    Cochain or a list of them, every component of odd degree >= 3.

    Checks, in order: degree constraints, closedness of each component
    (FluxNotClosed), vanishing of the cup square (FluxNotNilpotent), and
    finally that the assembled total differential squares to zero.
    """
    if isinstance(source, SimplicialComplex):
        C = coboundary_matrices(source)
        K: SimplicialComplex | None = source
    elif isinstance(source, GradedCochainComplex):
        C = source
        K = source.simplicial
    else:
        raise ValidationError(f"cannot twist a {type(source).__name__}")

    components = _flux_components(flux)
    nontrivial = [h for h in components if h.norm > 0.0]
    if nontrivial and C.local_rank != 1:
        raise FluxError("flux over a nontrivial local system is not supported")

    dims = C.dims
    top = C.top
    for h in components:
        if h.degree > top:
            raise FluxError(f"flux degree {h.degree} exceeds top degree {top}")
        expected = K.n(h.degree) if K is not None else dims[h.degree]
        if h.coefficients.shape[0] != expected:
            raise FluxError(
                f"degree-{h.degree} flux has {h.coefficients.shape[0]} coefficients, expected {expected}"
            )

    # closedness of each homogeneous component
    for h in nontrivial:
        resid = _norm(C.delta(h.degree) @ h.coefficients)
        if resid > tol * max(1.0, h.norm):
            raise FluxNotClosed(f"degree-{h.degree} flux is not closed (residual {resid:.3e})")

    # cup-square: for minimal models this vanishes identically, since the
    # flux starts in degree >= 3 and products of positive classes are zero
    if K is not None:
        for ha in nontrivial:
            for hb in nontrivial:
                sq = cup(ha, hb, K)
                if _norm(sq.coefficients) > tol * max(1.0, ha.norm * hb.norm):
                    raise FluxNotNilpotent(
                        f"flux cup square in degree {sq.degree} has norm "
                        f"{_norm(sq.coefficients):.3e}"
                    )

    def flux_ops(h: Cochain) -> dict[int, np.ndarray]:
        ops: dict[int, np.ndarray] = {}
        for q in range(top + 1):
            if q + h.degree > top:
                continue
            if K is not None:
                ops[q] = cup_operator(K, h, q)
            else:
                block = _unit_cup_operator(dims, h, q)
                if block is None:
                    raise FluxError(
                        "flux action undetermined: bare complex with dim C^0 != 1"
                    )
                ops[q] = block
        return ops

    delta_ops = {q: C.delta(q) for q in range(top)}
    d_even = assemble_shift_blocks(dims, delta_ops, 1, 0)
    d_odd = assemble_shift_blocks(dims, delta_ops, 1, 1)
    for h in nontrivial:
        ops = flux_ops(h)
        d_even = d_even + assemble_shift_blocks(dims, ops, h.degree, 0)
        d_odd = d_odd + assemble_shift_blocks(dims, ops, h.degree, 1)

    evens, odds = parity_degrees(len(dims))
    return TwistedComplex(
        even_dim=sum(dims[q] for q in evens),
        odd_dim=sum(dims[q] for q in odds),
        d_even=d_even,
        d_odd=d_odd,
        gram_even=parity_gram(C, 0),
        gram_odd=parity_gram(C, 1),
    )
