"""Invariant complexes of circle-bundle models and their T-duality.

A bundle model is operator-valued base data: a graded cochain complex M
together with degree +2 multiplication operators F (curvature) and H2,
a degree +3 operator H3, and a fiber radius r > 0.  Invariant cochains
on the total space are pairs (w1, w2) of base cochains, even parity
sitting in C^even(M) + C^odd(M), odd parity in C^odd(M) + C^even(M).
The total differential acts in blocks as

        [ d_H3      r^-1 F ]
        [ r H2      -d_H3  ]      with d_H3 = delta + H3.

The T-dual model swaps F with H2 and inverts the radius.  The duality
map T_k(w1, w2) = ((-1)^k w2, (-1)^(k+1) w1) is a parity-shifting Gram
isometry intertwining the two differentials; its sign rule is the unique
one (up to a global sign) making the intertwining exact, and applying
the same rule on the dual side inverts it.  Torsion scalars of a model
and its dual multiply to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .chain_models import (
    GradedCochainComplex,
    TwistedComplex,
    assemble_shift_blocks,
    parity_degrees,
    parity_gram,
)
from .errors import (
    DualityViolation,
    InvalidFlux,
    ParityMismatch,
    PathInvalid,
    ShapeMismatch,
    ValidationError,
)
from .spectral import hermitian_spectrum
from .torsion_engine import TorsionElement, gram_adjoint, twisted_torsion

__all__ = [
    "BundleData",
    "InvariantComplex",
    "DualityReport",
    "DriftReport",
    "minimal_model",
    "build_invariant_complex",
    "invariant_twisted_torsion",
    "t_dualize",
    "t_duality_matrix",
    "t_duality_map",
    "verify_t_duality",
    "deformation_experiment",
    "gram_scale_path",
    "hopf",
    "random_bundle",
]

_BLOCK_TOL = 1e-12


def _normalize_ops(
    dims: Sequence[int],
    ops,
    shift: int,
    name: str,
) -> tuple[np.ndarray, ...]:
    """Pad an operator family to one block per source degree.

    ``ops[q]`` maps degree q to q+shift; missing entries become zeros and
    blocks whose target degree overflows the grading must be empty.
    """
    top = len(dims) - 1
    if ops is None:
        table: dict[int, np.ndarray] = {}
    elif isinstance(ops, Mapping):
        table = {int(q): np.asarray(m) for q, m in ops.items()}
    else:
        table = {q: np.asarray(m) for q, m in enumerate(ops)}
    out = []
    for q in range(top + 1):
        rows = dims[q + shift] if q + shift <= top else 0
        want = (rows, dims[q])
        block = table.pop(q, None)
        if block is None:
            out.append(np.zeros(want, dtype=np.complex128))
            continue
        block = np.asarray(block, dtype=np.complex128)
        if block.size == 0:
            block = block.reshape(want) if block.size == want[0] * want[1] else block
        if block.shape != want:
            raise ShapeMismatch(
                f"{name}[{q}] has shape {block.shape}, expected {want}"
            )
        b = np.array(block)
        b.setflags(write=False)
        out.append(b)
    for q in list(table):
        leftover = np.asarray(table[q])
        if leftover.size and np.any(leftover):
            raise ShapeMismatch(f"{name}[{q}] targets a degree outside the grading")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class BundleData:
    """Operator-valued circle-bundle model over a finite base complex.

    ``radius_inverse`` caches the exact inverse radius so that double
    dualization is bit-exact; it is bookkeeping, not independent data.
    """

    base: GradedCochainComplex
    f_op: tuple[np.ndarray, ...]
    h2_op: tuple[np.ndarray, ...]
    h3_op: tuple[np.ndarray, ...]
    radius: float
    radius_inverse: float | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.base, GradedCochainComplex):
            raise ValidationError("bundle base must be a GradedCochainComplex")
        dims = self.base.dims
        object.__setattr__(self, "f_op", _normalize_ops(dims, self.f_op, 2, "F"))
        object.__setattr__(self, "h2_op", _normalize_ops(dims, self.h2_op, 2, "H2"))
        object.__setattr__(self, "h3_op", _normalize_ops(dims, self.h3_op, 3, "H3"))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValidationError(f"fiber radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def inverse_radius(self) -> float:
        return self.radius_inverse if self.radius_inverse is not None else 1.0 / self.radius


@dataclass(frozen=True, eq=False)
class InvariantComplex:
    """Z2-graded complex of invariant cochains, with its slot split."""

    pair: TwistedComplex
    base_even_dim: int
    base_odd_dim: int
    radius: float
    bundle: BundleData = field(repr=False)

    @property
    def even_dim(self) -> int:
        return self.pair.even_dim

    @property
    def odd_dim(self) -> int:
        return self.pair.odd_dim

    @property
    def d_even(self) -> np.ndarray:
        return self.pair.d_even

    @property
    def d_odd(self) -> np.ndarray:
        return self.pair.d_odd

    @property
    def gram_even(self) -> np.ndarray:
        return self.pair.gram_even

    @property
    def gram_odd(self) -> np.ndarray:
        return self.pair.gram_odd


def minimal_model(
    dims: Sequence[int],
    gram: Sequence[np.ndarray] | None = None,
) -> GradedCochainComplex:
    """Zero-differential complex with the given dimension vector."""
    dims = tuple(int(n) for n in dims)
    cob = tuple(
        np.zeros((dims[p + 1], dims[p]), dtype=np.complex128)
        for p in range(len(dims) - 1)
    )
    return GradedCochainComplex(dims=dims, coboundary=cob, gram=None if gram is None else tuple(gram))


def _pair_block(tl, tr, bl, br) -> np.ndarray:
    r1, c1 = tl.shape
    r2, c2 = br.shape
    out = np.zeros((r1 + r2, c1 + c2), dtype=np.complex128)
    out[:r1, :c1] = tl
    out[:r1, c1:] = tr
    out[r1:, :c1] = bl
    out[r1:, c1:] = br
    return out


def _blkdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def _base_blocks(b: BundleData) -> dict[str, np.ndarray]:
    C = b.base
    dims = C.dims
    delta_ops = {q: C.delta(q) for q in range(C.top)}
    h3 = {q: b.h3_op[q] for q in range(len(dims))}
    f = {q: b.f_op[q] for q in range(len(dims))}
    h2 = {q: b.h2_op[q] for q in range(len(dims))}
    return {
        "b_eo": assemble_shift_blocks(dims, delta_ops, 1, 0)
        + assemble_shift_blocks(dims, h3, 3, 0),
        "b_oe": assemble_shift_blocks(dims, delta_ops, 1, 1)
        + assemble_shift_blocks(dims, h3, 3, 1),
        "f_ee": assemble_shift_blocks(dims, f, 2, 0),
        "f_oo": assemble_shift_blocks(dims, f, 2, 1),
        "h2_ee": assemble_shift_blocks(dims, h2, 2, 0),
        "h2_oo": assemble_shift_blocks(dims, h2, 2, 1),
    }


def _closure_residuals(blocks: dict[str, np.ndarray]) -> dict[str, float]:
    b_eo, b_oe = blocks["b_eo"], blocks["b_oe"]
    f_ee, f_oo = blocks["f_ee"], blocks["f_oo"]
    h2_ee, h2_oo = blocks["h2_ee"], blocks["h2_oo"]

    def nrm(x):
        return float(np.linalg.norm(x)) if x.size else 0.0

    return {
        "dH3^2 + F.H2 (even source)": nrm(b_oe @ b_eo + f_ee @ h2_ee),
        "dH3^2 + H2.F (even source)": nrm(b_oe @ b_eo + h2_ee @ f_ee),
        "dH3^2 + F.H2 (odd source)": nrm(b_eo @ b_oe + f_oo @ h2_oo),
        "dH3^2 + H2.F (odd source)": nrm(b_eo @ b_oe + h2_oo @ f_oo),
        "[dH3, F] (even source)": nrm(b_eo @ f_ee - f_oo @ b_eo),
        "[dH3, F] (odd source)": nrm(b_oe @ f_oo - f_ee @ b_oe),
        "[H2, dH3] (even source)": nrm(h2_oo @ b_eo - b_eo @ h2_ee),
        "[H2, dH3] (odd source)": nrm(h2_ee @ b_oe - b_oe @ h2_oo),
    }


def build_invariant_complex(b: BundleData) -> InvariantComplex:
    """Assemble the invariant-cochain complex of a bundle model.

    Raises InvalidFlux naming the failing block identity when the
    assembled differential does not square to zero.
    """
    C = b.base
    blocks = _base_blocks(b)
    r = b.radius
    rinv = b.inverse_radius

    d_even = _pair_block(
        blocks["b_eo"], rinv * blocks["f_oo"],
        r * blocks["h2_ee"], -blocks["b_oe"],
    )
    d_odd = _pair_block(
        blocks["b_oe"], rinv * blocks["f_ee"],
        r * blocks["h2_oo"], -blocks["b_eo"],
    )

    scale = 1.0 + float(np.linalg.norm(d_even)) * float(np.linalg.norm(d_odd))
    res_oe = float(np.linalg.norm(d_odd @ d_even)) if d_even.size and d_odd.size else 0.0
    res_eo = float(np.linalg.norm(d_even @ d_odd)) if d_even.size and d_odd.size else 0.0
    if res_oe > _BLOCK_TOL * scale or res_eo > _BLOCK_TOL * scale:
        failing = {
            name: resid
            for name, resid in _closure_residuals(blocks).items()
            if resid > _BLOCK_TOL * scale
        }
        detail = ", ".join(f"{k}: {v:.3e}" for k, v in failing.items()) or "radius coupling"
        raise InvalidFlux(f"bundle data violates square-zero; failing identities: {detail}")

    evens, odds = parity_degrees(len(C.dims))
    e = sum(C.dims[q] for q in evens)
    o = sum(C.dims[q] for q in odds)
    ge = parity_gram(C, 0)
    go = parity_gram(C, 1)
    pair = TwistedComplex(
        even_dim=e + o,
        odd_dim=o + e,
        d_even=d_even,
        d_odd=d_odd,
        gram_even=_blkdiag(ge, go),
        gram_odd=_blkdiag(go, ge),
    )
    return InvariantComplex(
        pair=pair,
        base_even_dim=e,
        base_odd_dim=o,
        radius=r,
        bundle=b,
    )


def invariant_twisted_torsion(
    b: BundleData,
    *,
    kernel_tol: float | None = None,
) -> TorsionElement:
    """Twisted torsion of the invariant complex of a bundle model."""
    return twisted_torsion(build_invariant_complex(b).pair, kernel_tol=kernel_tol)


def t_dualize(b: BundleData) -> BundleData:
    """Swap curvature with H2 and invert the radius; an exact involution."""
    dual = BundleData(
        base=b.base,
        f_op=b.h2_op,
        h2_op=b.f_op,
        h3_op=b.h3_op,
        radius=b.inverse_radius,
        radius_inverse=b.radius,
    )
    build_invariant_complex(dual)  # cannot fail for valid input; asserted
    return dual


def _slot_dims(ic: InvariantComplex, parity: int) -> tuple[int, int]:
    if parity % 2 == 0:
        return ic.base_even_dim, ic.base_odd_dim
    return ic.base_odd_dim, ic.base_even_dim


def t_duality_matrix(ic: InvariantComplex, parity: int) -> np.ndarray:
    """Matrix of T on the parity-k invariant space.

    T_k(w1, w2) = ((-1)^k w2, (-1)^(k+1) w1), landing in the parity-(k+1)
    space of the dual model.  Applying the same rule on the dual side
    gives the inverse, so S.T = identity holds exactly.
    """
    if parity not in (0, 1):
        raise ParityMismatch(f"parity must be 0 or 1, got {parity}")
    a, b = _slot_dims(ic, parity)
    s1 = float((-1) ** parity)
    out = np.zeros((a + b, a + b), dtype=np.complex128)
    out[:b, a:] = s1 * np.eye(b)
    out[b:, :a] = -s1 * np.eye(a)
    return out


def t_duality_map(ic: InvariantComplex, x: np.ndarray, parity: int) -> np.ndarray:
    """Apply T to a parity-k invariant cochain vector."""
    T = t_duality_matrix(ic, parity)
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape[0] != T.shape[1]:
        raise ParityMismatch(
            f"vector of length {v.shape[0]} does not live in the parity-{parity} "
            f"space of dimension {T.shape[1]}"
        )
    return T @ v


@dataclass(frozen=True, eq=False)
class DualityReport:
    """Evidence record for one torsion-inversion check."""

    torsion: TorsionElement
    dual_torsion: TorsionElement
    product_log: float
    cohomology_dims: tuple[int, int, int, int]
    intertwining_residual: float
    isometry_residual: float
    inverse_residual: float
    spectral_transport_residual: float
    harmonic_transport_residual: float

    def to_json(self) -> dict:
        return {
            "torsion": self.torsion.to_json(),
            "dual_torsion": self.dual_torsion.to_json(),
            "product_log": self.product_log,
            "tau_times_tau_dual": float(np.exp(self.product_log)),
            "cohomology_dims": {
                "even": self.cohomology_dims[0],
                "odd": self.cohomology_dims[1],
                "dual_even": self.cohomology_dims[2],
                "dual_odd": self.cohomology_dims[3],
            },
            "intertwining_residual": self.intertwining_residual,
            "isometry_residual": self.isometry_residual,
            "inverse_residual": self.inverse_residual,
            "spectral_transport_residual": self.spectral_transport_residual,
            "harmonic_transport_residual": self.harmonic_transport_residual,
        }


def _opnorm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _transport_residual(ev_a: np.ndarray, ev_b: np.ndarray) -> float:
    if ev_a.size != ev_b.size:
        return float("inf")
    if ev_a.size == 0:
        return 0.0
    denom = np.maximum(np.abs(ev_a), 1e-300)
    return float(np.max(np.abs(ev_a - ev_b) / denom))


def _harmonic_residual(
    t_mat: np.ndarray,
    primal_vectors: np.ndarray,
    dual_vectors: np.ndarray,
    dual_gram: np.ndarray,
) -> float:
    if primal_vectors.shape[1] != dual_vectors.shape[1]:
        return float("inf")
    if primal_vectors.shape[1] == 0:
        return 0.0
    image = t_mat @ primal_vectors
    coords = dual_vectors.conj().T @ dual_gram @ image
    containment = float(np.linalg.norm(image - dual_vectors @ coords))
    unitary = float(np.linalg.norm(coords.conj().T @ coords - np.eye(coords.shape[1])))
    return max(containment, unitary)


def verify_t_duality(
    b: BundleData,
    *,
    kernel_tol: float | None = None,
    tol: float = 1e-8,
) -> DualityReport:
    """Check the torsion-inversion theorem on one bundle model.

    Computes both torsions, the duality-map contracts (isometry,
    intertwining, exact inverse), nonzero-spectrum transport between
    parities, and the harmonic comparison through the T-image.  Raises
    DualityViolation when |log tau + log tau_dual| exceeds ``tol``; that
    signals an implementation bug, not a mathematical failure.
    """
    ic = build_invariant_complex(b)
    dual = t_dualize(b)
    icd = build_invariant_complex(dual)

    tau = twisted_torsion(ic.pair, kernel_tol=kernel_tol)
    tau_dual = twisted_torsion(icd.pair, kernel_tol=kernel_tol)
    product_log = tau.log_scalar + tau_dual.log_scalar

    t0 = t_duality_matrix(ic, 0)
    t1 = t_duality_matrix(ic, 1)
    t0_dual = t_duality_matrix(icd, 0)
    t1_dual = t_duality_matrix(icd, 1)

    intertwining = max(
        _opnorm(t1 @ ic.d_even - icd.d_odd @ t0),
        _opnorm(t0 @ ic.d_odd - icd.d_even @ t1),
    )
    isometry = max(
        _opnorm(t0.conj().T @ icd.gram_odd @ t0 - ic.gram_even),
        _opnorm(t1.conj().T @ icd.gram_even @ t1 - ic.gram_odd),
    )
    inverse = max(
        _opnorm(t1_dual @ t0 - np.eye(ic.even_dim)),
        _opnorm(t0_dual @ t1 - np.eye(ic.odd_dim)),
    )

    # nonzero spectra of d^+d move to the opposite parity on the dual side
    def positive(op, g_src, g_tgt):
        a = gram_adjoint(op, g_src, g_tgt) @ op
        return hermitian_spectrum(a, g_src, kernel_tol=kernel_tol).positive_eigenvalues

    ev_even = positive(ic.d_even, ic.gram_even, ic.gram_odd)
    ev_odd = positive(ic.d_odd, ic.gram_odd, ic.gram_even)
    ev_dual_even = positive(icd.d_even, icd.gram_even, icd.gram_odd)
    ev_dual_odd = positive(icd.d_odd, icd.gram_odd, icd.gram_even)
    transport = max(
        _transport_residual(ev_even, ev_dual_odd),
        _transport_residual(ev_odd, ev_dual_even),
    )

    harmonic = max(
        _harmonic_residual(
            t0, tau.harmonic_bases[0].vectors,
            tau_dual.harmonic_bases[1].vectors, icd.gram_odd,
        ),
        _harmonic_residual(
            t1, tau.harmonic_bases[1].vectors,
            tau_dual.harmonic_bases[0].vectors, icd.gram_even,
        ),
    )

    report = DualityReport(
        torsion=tau,
        dual_torsion=tau_dual,
        product_log=product_log,
        cohomology_dims=(
            tau.kernel_dims[0], tau.kernel_dims[1],
            tau_dual.kernel_dims[0], tau_dual.kernel_dims[1],
        ),
        intertwining_residual=intertwining,
        isometry_residual=isometry,
        inverse_residual=inverse,
        spectral_transport_residual=transport,
        harmonic_transport_residual=harmonic,
    )
    if abs(product_log) > tol:
        raise DualityViolation(
            f"log tau + log tau_dual = {product_log!r} exceeds {tol}; "
            "this indicates an implementation bug"
        )
    return report


# ---------------------------------------------------------------------------
# deformation experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DriftReport:
    """Observed torsion drift along a deformation path.  Measurement
    only: nothing here asserts invariance."""

    parameters: tuple[float, ...]
    log_scalars: tuple[float, ...]
    max_abs_log_drift: float
    max_rel_scalar_drift: float
    note: str = "drift is reported, not asserted"

    def to_json(self) -> dict:
        return {
            "parameters": list(self.parameters),
            "log_scalars": list(self.log_scalars),
            "scalars": [float(np.exp(v)) for v in self.log_scalars],
            "max_abs_log_drift": self.max_abs_log_drift,
            "max_rel_scalar_drift": self.max_rel_scalar_drift,
            "note": self.note,
        }


def deformation_experiment(
    path: Callable[[float], BundleData],
    steps: int,
    *,
    kernel_tol: float | None = None,
) -> DriftReport:
    """Sample a bundle path at steps+1 parameters in [0, 1] and record the
    torsion drift relative to the start."""
    if steps < 1:
        raise PathInvalid(f"need at least one step, got {steps}")
    params, logs = [], []
    for i in range(steps + 1):
        t = i / steps
        try:
            bundle = path(t)
            value = invariant_twisted_torsion(bundle, kernel_tol=kernel_tol)
        except Exception as exc:  # noqa: BLE001 - reported with the parameter
            raise PathInvalid(f"path failed at parameter {t}: {exc}") from exc
        params.append(t)
        logs.append(value.log_scalar)
    base = logs[0]
    drift = max(abs(v - base) for v in logs)
    scalars = [math.exp(v) for v in logs]
    rel = max(abs(s - scalars[0]) / max(abs(scalars[0]), 1e-300) for s in scalars)
    return DriftReport(
        parameters=tuple(params),
        log_scalars=tuple(logs),
        max_abs_log_drift=drift,
        max_rel_scalar_drift=rel,
    )


def gram_scale_path(
    b: BundleData,
    *,
    degree: int = 0,
    factor: float = 2.0,
) -> Callable[[float], BundleData]:
    """Path scaling the degree-``degree`` base Gram from 1 to ``factor``."""
    dims = b.base.dims
    if not 0 <= degree < len(dims):
        raise PathInvalid(f"degree {degree} outside the base grading")

    def at(t: float) -> BundleData:
        s = 1.0 + (factor - 1.0) * t
        grams = [b.base.gram_at(q) for q in range(len(dims))]
        grams[degree] = s * grams[degree]
        return BundleData(
            base=b.base.with_gram(grams),
            f_op=b.f_op,
            h2_op=b.h2_op,
            h3_op=b.h3_op,
            radius=b.radius,
            radius_inverse=b.radius_inverse,
        )

    return at


# ---------------------------------------------------------------------------
# bundle builders
# ---------------------------------------------------------------------------

def hopf(f: float, h2: float, r: float) -> BundleData:
    """Hopf-type model over the minimal two-sphere base (dims 1, 0, 1).

    Curvature f * generator, H2 flux h2 * generator, no H3.  The twisted
    torsion works out to r^2 |h2 / f| when both are nonzero.
    """
    base = minimal_model((1, 0, 1))
    return BundleData(
        base=base,
        f_op={0: np.array([[f]], dtype=np.complex128)},
        h2_op={0: np.array([[h2]], dtype=np.complex128)},
        h3_op=None,
        radius=r,
    )


def random_bundle(seed: int, top_degree: int = 3) -> BundleData:
    """Seeded random bundle over a wedge-of-spheres minimal base.

    Degree 0 is one-dimensional; higher degrees get 0 to 2 classes, and
    all products of positive-degree classes vanish, so the square-zero
    identities hold exactly whatever the random flux vectors are.  Grams
    are random well-conditioned SPD matrices; the radius is uniform in
    [0.5, 2].  Fully determined by the seed.
    """
    if top_degree < 1:
        raise ValidationError(f"base top degree must be >= 1, got {top_degree}")
    rng = np.random.default_rng(seed)
    dims = [1] + [int(rng.integers(0, 3)) for _ in range(top_degree)]

    grams = []
    for n in dims:
        if n == 0:
            grams.append(np.zeros((0, 0), dtype=np.complex128))
            continue
        a = rng.standard_normal((n, n))
        q, _ = np.linalg.qr(a + np.eye(n))
        d = rng.uniform(0.5, 2.0, size=n)
        g = q @ np.diag(d) @ q.T
        grams.append(np.asarray(0.5 * (g + g.T), dtype=np.complex128))

    base = minimal_model(dims, gram=grams)

    def unit_column(degree: int) -> dict[int, np.ndarray]:
        if degree > top_degree or dims[degree] == 0:
            return {}
        vec = rng.standard_normal(dims[degree])
        return {0: vec.reshape(dims[degree], 1).astype(np.complex128)}

    f_op = unit_column(2)
    h2_op = unit_column(2)
    h3_op = unit_column(3)
    radius = float(rng.uniform(0.5, 2.0))
    return BundleData(base=base, f_op=f_op, h2_op=h2_op, h3_op=h3_op, radius=radius)
