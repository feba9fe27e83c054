"""Combinatorial layer: complexes, local systems, cup products, parity
assembly, and flux-twisted differentials."""

import numpy as np
import pytest

from torsionlab import (
    Cochain,
    GradedCochainComplex,
    LocalSystem,
    build_simplicial,
    coboundary_matrices,
    cup,
    cup_operator,
    pair_with_fundamental_class,
    signed_incidence,
    twisted_differential,
    validate_local_system,
)
from torsionlab.builders import cycle, minimal_sphere, simplex_boundary
from torsionlab.chain_models import (
    assemble_shift_blocks,
    parity_degrees,
    parity_gram,
)
from torsionlab.errors import (
    DuplicateSimplex,
    FluxError,
    FluxHasDegreeOne,
    FluxNotClosed,
    GramNotPositive,
    InconsistentDimension,
    NonFlatLocalSystem,
    NotOriented,
    NotTopDegree,
    ValidationError,
)


# ---------------------------------------------------------------------------
# simplicial building
# ---------------------------------------------------------------------------

def test_face_closure_and_f_vector():
    K = build_simplicial([(0, 1, 2)])
    assert K.f_vector == (3, 3, 1)
    assert K.simplices[1] == ((0, 1), (0, 2), (1, 2))
    assert K.euler_characteristic == 1


def test_vertex_order_ignored_and_normalized():
    K = build_simplicial([(2, 0, 1)])
    assert K.simplices[2] == ((0, 1, 2),)


def test_duplicate_top_simplex_rejected():
    with pytest.raises(DuplicateSimplex):
        build_simplicial([(0, 1), (1, 0)])


def test_mixed_dimension_needs_flag():
    with pytest.raises(InconsistentDimension):
        build_simplicial([(0, 1, 2), (3, 4)])
    K = build_simplicial([(0, 1, 2), (3, 4)], allow_mixed_dimension=True)
    assert K.dim == 2
    assert (3, 4) in K.simplices[1]


def test_orientation_mapping_and_sequence_agree():
    # dropping vertex 1 from (0,1,2) and vertex 2 from (0,2,3) hits the
    # shared edge (0,2) with signs -e1 and +e2, so e1 == e2 is coherent
    tops = [(0, 1, 2), (0, 2, 3)]
    by_map = build_simplicial(tops, {(0, 1, 2): 1, (0, 2, 3): 1})
    by_seq = build_simplicial(tops, [1, 1])
    assert by_map.orientation == by_seq.orientation == (1, 1)


def test_incoherent_orientation_rejected():
    with pytest.raises(NotOriented):
        build_simplicial([(0, 1, 2), (0, 2, 3)], [1, -1])


def test_face_with_three_cofaces_cannot_be_oriented():
    tops = [(0, 1, 2), (0, 1, 3), (0, 1, 4)]
    with pytest.raises(NotOriented):
        build_simplicial(tops, [1, 1, 1])


def test_simplex_boundary_is_coherently_oriented():
    for n in (2, 3, 4):
        K = simplex_boundary(n)
        assert K.orientation is not None
        assert K.euler_characteristic == (2 if n % 2 == 1 else 0)


# ---------------------------------------------------------------------------
# incidence and coboundaries
# ---------------------------------------------------------------------------

def test_signed_incidence_squares_to_zero_in_integers():
    for K in (simplex_boundary(3), simplex_boundary(4), build_simplicial([(0, 1, 2, 3)])):
        mats = [signed_incidence(K, p) for p in range(K.dim)]
        for a, b in zip(mats[1:], mats):
            assert a.dtype == np.int64
            assert not np.any(a @ b)


def test_edge_incidence_signs():
    K = build_simplicial([(0, 1)])
    d0 = signed_incidence(K, 0)
    # (delta f)(v0, v1) = f(v1) - f(v0)
    assert d0.tolist() == [[-1, 1]]


def test_coboundary_matrices_shapes_and_backref():
    K = simplex_boundary(3)
    C = coboundary_matrices(K)
    assert C.dims == (4, 6, 4)
    assert C.simplicial is K
    assert C.local_rank == 1
    assert C.delta(2).shape == (0, 4)


def test_square_zero_validation_rejects_bad_complex():
    with pytest.raises(ValidationError):
        GradedCochainComplex(
            dims=(1, 1, 1),
            coboundary=(np.array([[1.0]]), np.array([[1.0]])),
        )


def test_gram_must_be_hermitian_positive():
    with pytest.raises(GramNotPositive):
        GradedCochainComplex(
            dims=(2,),
            coboundary=(),
            gram=(np.array([[1.0, 2.0], [2.0, 1.0]]),),  # eigenvalue -1
        )
    with pytest.raises(GramNotPositive):
        GradedCochainComplex(
            dims=(2,),
            coboundary=(),
            gram=(np.array([[1.0, 1.0], [0.0, 1.0]]),),  # not Hermitian
        )


# ---------------------------------------------------------------------------
# local systems
# ---------------------------------------------------------------------------

def _triangle_system(u):
    # holonomy u on edge (0,1), identities elsewhere; flat iff the triangle
    # composition closes, which identity edges reduce to u == id unless we
    # compensate on (0,2)
    m = np.asarray(u, dtype=np.complex128)
    rank = m.shape[0]
    eye = np.eye(rank, dtype=np.complex128)
    return LocalSystem(
        rank=rank,
        holonomy={(0, 1): m, (1, 2): eye, (0, 2): m},
    )


def test_flat_unitary_system_accepted():
    K = build_simplicial([(0, 1, 2)])
    theta = 0.7
    u = np.array([[np.exp(1j * theta)]])
    validate_local_system(K, _triangle_system(u))


def test_nonflat_system_rejected():
    K = build_simplicial([(0, 1, 2)])
    ls = LocalSystem(
        rank=1,
        holonomy={
            (0, 1): np.array([[np.exp(0.3j)]]),
            (1, 2): np.array([[1.0 + 0j]]),
            (0, 2): np.array([[1.0 + 0j]]),
        },
    )
    with pytest.raises(NonFlatLocalSystem):
        validate_local_system(K, ls)


def test_nonunitary_holonomy_rejected():
    K = build_simplicial([(0, 1)])
    ls = LocalSystem(rank=1, holonomy={(0, 1): np.array([[2.0 + 0j]])})
    with pytest.raises(NonFlatLocalSystem):
        validate_local_system(K, ls)


def test_twisted_coboundary_squares_to_zero():
    K = simplex_boundary(3)
    rng = np.random.default_rng(11)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, _ = np.linalg.qr(a)
    # one nontrivial generator pushed around a triangle, compensated so
    # every triangle composes to the identity
    holonomy = {}
    for (x, y) in K.simplices[1]:
        holonomy[(x, y)] = np.eye(2, dtype=np.complex128)
    holonomy[(0, 1)] = q
    holonomy[(0, 2)] = q
    holonomy[(0, 3)] = q
    ls = LocalSystem(rank=2, holonomy=holonomy)
    validate_local_system(K, ls)
    C = coboundary_matrices(K, ls)
    assert C.dims == (8, 12, 8)
    assert C.local_rank == 2
    for p in range(C.top - 1):
        assert np.linalg.norm(C.delta(p + 1) @ C.delta(p)) < 1e-12


# ---------------------------------------------------------------------------
# cup products
# ---------------------------------------------------------------------------

def test_cup_unit_law():
    K = simplex_boundary(3)
    ones = Cochain(degree=0, coefficients=np.ones(K.n(0), dtype=np.complex128))
    rng = np.random.default_rng(5)
    b = Cochain(degree=1, coefficients=rng.standard_normal(K.n(1)).astype(np.complex128))
    left = cup(ones, b, K)
    assert np.allclose(left.coefficients, b.coefficients)


def test_cup_associative():
    K = simplex_boundary(4)
    rng = np.random.default_rng(3)

    def rand(p):
        return Cochain(degree=p, coefficients=rng.standard_normal(K.n(p)).astype(np.complex128))

    a, b, c = rand(1), rand(1), rand(1)
    lhs = cup(cup(a, b, K), c, K)
    rhs = cup(a, cup(b, c, K), K)
    assert np.allclose(lhs.coefficients, rhs.coefficients)


def test_cup_leibniz_rule():
    # delta(a cup b) = delta(a) cup b + (-1)^p a cup delta(b)
    K = simplex_boundary(4)
    C = coboundary_matrices(K)
    rng = np.random.default_rng(9)
    for p, q in [(0, 1), (1, 1), (0, 2)]:
        a = Cochain(degree=p, coefficients=rng.standard_normal(K.n(p)).astype(np.complex128))
        b = Cochain(degree=q, coefficients=rng.standard_normal(K.n(q)).astype(np.complex128))
        ab = cup(a, b, K)
        lhs = C.delta(p + q) @ ab.coefficients
        da = Cochain(degree=p + 1, coefficients=C.delta(p) @ a.coefficients)
        db = Cochain(degree=q + 1, coefficients=C.delta(q) @ b.coefficients)
        rhs = cup(da, b, K).coefficients + (-1) ** p * cup(a, db, K).coefficients
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_cup_overflow_returns_zero_cochain():
    K = build_simplicial([(0, 1, 2)])
    a = Cochain(degree=2, coefficients=np.ones(1, dtype=np.complex128))
    out = cup(a, a, K)
    assert out.degree == 4
    assert out.coefficients.size == 0


def test_cup_operator_matches_cup():
    K = simplex_boundary(4)
    rng = np.random.default_rng(7)
    h = Cochain(degree=2, coefficients=rng.standard_normal(K.n(2)).astype(np.complex128))
    b = Cochain(degree=1, coefficients=rng.standard_normal(K.n(1)).astype(np.complex128))
    direct = cup(h, b, K).coefficients
    via_op = cup_operator(K, h, 1) @ b.coefficients
    assert np.allclose(direct, via_op)


# ---------------------------------------------------------------------------
# fundamental class pairing
# ---------------------------------------------------------------------------

def test_pairing_on_oriented_sphere():
    K = simplex_boundary(4)
    ones = Cochain(degree=3, coefficients=np.ones(K.n(3), dtype=np.complex128))
    assert pair_with_fundamental_class(K, ones) == 1.0


def test_pairing_kills_coboundaries():
    K = simplex_boundary(4)
    C = coboundary_matrices(K)
    rng = np.random.default_rng(13)
    a = rng.standard_normal(K.n(2))
    db = Cochain(degree=3, coefficients=C.delta(2) @ a.astype(np.complex128))
    assert abs(pair_with_fundamental_class(K, db)) < 1e-12


def test_pairing_requires_orientation_and_top_degree():
    K = build_simplicial([(0, 1, 2)])  # no orientation given
    top = Cochain(degree=2, coefficients=np.ones(1, dtype=np.complex128))
    with pytest.raises(NotOriented):
        pair_with_fundamental_class(K, top)
    K2 = simplex_boundary(3)
    low = Cochain(degree=1, coefficients=np.ones(K2.n(1), dtype=np.complex128))
    with pytest.raises(NotTopDegree):
        pair_with_fundamental_class(K2, low)


# ---------------------------------------------------------------------------
# parity assembly
# ---------------------------------------------------------------------------

def test_parity_degrees_split():
    assert parity_degrees(5) == ((0, 2, 4), (1, 3))


def test_assemble_shift_blocks_places_offsets():
    dims = (1, 2, 1, 1)
    ops = {0: np.full((1, 1), 5.0 + 0j)}  # degree 0 -> degree 2 (wait: shift 2)
    out = assemble_shift_blocks(dims, ops, 2, 0)
    # even degrees: 0 (dim 1) then 2 (dim 1); block lands at rows of degree 2
    assert out.shape == (2, 2)
    assert out[1, 0] == 5.0
    assert np.count_nonzero(out) == 1


def test_parity_gram_direct_sum():
    C = coboundary_matrices(simplex_boundary(3))
    ge = parity_gram(C, 0)
    go = parity_gram(C, 1)
    assert ge.shape == (8, 8)
    assert go.shape == (6, 6)
    assert np.allclose(ge, np.eye(8))


# ---------------------------------------------------------------------------
# twisted differentials
# ---------------------------------------------------------------------------

def test_zero_flux_reduces_to_folded_coboundary():
    C = coboundary_matrices(simplex_boundary(3))
    T = twisted_differential(C, None)
    assert T.even_dim == 8 and T.odd_dim == 6
    assert np.allclose(T.d_even[:, :4], C.delta(0))


def test_degree_one_flux_rejected_even_when_zero():
    C = coboundary_matrices(simplex_boundary(3))
    h = Cochain(degree=1, coefficients=np.zeros(C.dims[1], dtype=np.complex128))
    with pytest.raises(FluxHasDegreeOne):
        twisted_differential(C, h)


def test_even_degree_flux_rejected():
    C = coboundary_matrices(simplex_boundary(4))
    h = Cochain(degree=2, coefficients=np.ones(C.dims[2], dtype=np.complex128))
    with pytest.raises(FluxError):
        twisted_differential(C, h)


def test_unclosed_flux_rejected():
    # on the solid tetrahedron a generic 1-cochain... degree must be >= 3,
    # so use a 4-complex where degree-3 cochains are not all closed
    K = build_simplicial([(0, 1, 2, 3, 4), (1, 2, 3, 4, 5)])
    C = coboundary_matrices(K)
    rng = np.random.default_rng(1)
    h = Cochain(degree=3, coefficients=rng.standard_normal(K.n(3)).astype(np.complex128))
    resid = np.linalg.norm(C.delta(3) @ h.coefficients)
    assert resid > 1e-6  # generic cochain really is not closed
    with pytest.raises(FluxNotClosed):
        twisted_differential(C, h)


def test_flux_above_top_degree_rejected():
    C = minimal_sphere(2)
    h = Cochain(degree=3, coefficients=np.ones(1, dtype=np.complex128))
    with pytest.raises(FluxError):
        twisted_differential(C, h)


def test_minimal_model_flux_unit_action():
    # one generator in degree 3 acting on the unit of a minimal S^3 model
    C = minimal_sphere(3)
    t = 1.75
    h = Cochain(degree=3, coefficients=np.array([t], dtype=np.complex128))
    T = twisted_differential(C, h)
    assert T.even_dim == 1 and T.odd_dim == 1
    assert T.d_even[0, 0] == t
    assert not np.any(T.d_odd)


def test_minimal_model_fat_degree_zero_rejected():
    C = GradedCochainComplex(
        dims=(2, 0, 0, 1),
        coboundary=(
            np.zeros((0, 2)), np.zeros((0, 0)), np.zeros((1, 0)),
        ),
    )
    h = Cochain(degree=3, coefficients=np.ones(1, dtype=np.complex128))
    with pytest.raises(FluxError):
        twisted_differential(C, h)


def test_flux_components_of_same_degree_merge():
    C = minimal_sphere(3)
    h1 = Cochain(degree=3, coefficients=np.array([1.0 + 0j]))
    h2 = Cochain(degree=3, coefficients=np.array([0.5 + 0j]))
    T = twisted_differential(C, [h1, h2])
    assert T.d_even[0, 0] == 1.5


def test_twisted_square_zero_on_simplicial_flux():
    K = simplex_boundary(4)
    h = Cochain(degree=3, coefficients=np.ones(K.n(3), dtype=np.complex128))
    T = twisted_differential(coboundary_matrices(K), h)
    assert np.linalg.norm(T.d_odd @ T.d_even) < 1e-12
    assert np.linalg.norm(T.d_even @ T.d_odd) < 1e-12
