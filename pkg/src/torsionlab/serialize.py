"""JSON round-tripping for models, bundles, and reports.

Complex matrix entries are stored as [re, im] pairs.  ``canonical_bytes``
fixes key order and separators so equal payloads hash identically, and
``digest`` is the sha256 of that encoding.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .chain_models import (
    GradedCochainComplex,
    LocalSystem,
    SimplicialComplex,
    build_simplicial,
)
from .circle_bundle import BundleData
from .errors import ParseError

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "encode_complex",
    "encode_bundle",
    "encode_cochain",
    "decode_cochain",
    "decode_model",
    "canonical_bytes",
    "digest",
    "load_json_file",
    "dump_json_file",
]

COMPLEX_SCHEMA = "complex.v1"
BUNDLE_SCHEMA = "bundle.v1"
COCHAIN_SCHEMA = "cochain.v1"
REPORT_SCHEMA = "report.v1"


def matrix_to_json(m: np.ndarray) -> list:
    a = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(rows, shape=None) -> np.ndarray:
    if shape is not None and not rows:
        return np.zeros(shape, dtype=np.complex128)
    try:
        out = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows],
            dtype=np.complex128,
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise ParseError(f"malformed complex matrix: {exc}") from exc
    if out.size == 0:
        out = out.reshape(shape if shape is not None else (0, 0))
    if shape is not None and out.shape != tuple(shape):
        raise ParseError(f"matrix has shape {out.shape}, expected {tuple(shape)}")
    return out


def _maximal_simplices(K: SimplicialComplex) -> list[tuple[int, ...]]:
    out = []
    for d, level in enumerate(K.simplices):
        higher = K.simplices[d + 1] if d + 1 < len(K.simplices) else ()
        hsets = [set(t) for t in higher]
        for s in level:
            ss = set(s)
            if not any(ss <= h for h in hsets):
                out.append(s)
    return out


def _encode_simplicial(K: SimplicialComplex) -> dict:
    tops = _maximal_simplices(K)
    payload: dict = {
        "schema": COMPLEX_SCHEMA,
        "kind": "simplicial",
        "top_simplices": [list(s) for s in tops],
    }
    if K.orientation is not None and all(len(s) == K.dim + 1 for s in tops):
        payload["orientation"] = [
            int(K.orientation[K.index(K.dim, s)]) for s in tops
        ]
    return payload


def _encode_local_system(ls: LocalSystem) -> dict:
    return {
        "rank": ls.rank,
        "holonomy": [
            {"edge": [a, b], "matrix": matrix_to_json(m)}
            for (a, b), m in sorted(ls.holonomy.items())
        ],
    }


def _encode_cochain_complex(C: GradedCochainComplex) -> dict:
    payload: dict = {
        "schema": COMPLEX_SCHEMA,
        "kind": "cochain",
        "dims": list(C.dims),
        "coboundary": [matrix_to_json(C.delta(p)) for p in range(C.top)],
    }
    if C.gram is not None:
        payload["gram"] = [matrix_to_json(g) for g in C.gram]
    return payload


def encode_complex(model, local_system: LocalSystem | None = None) -> dict:
    if isinstance(model, SimplicialComplex):
        payload = _encode_simplicial(model)
        if local_system is not None:
            payload["local_system"] = _encode_local_system(local_system)
        return payload
    if isinstance(model, GradedCochainComplex):
        if model.simplicial is not None:
            return _encode_simplicial(model.simplicial)
        return _encode_cochain_complex(model)
    raise ParseError(f"cannot encode object of type {type(model).__name__}")


def _ops_to_json(ops: tuple[np.ndarray, ...]) -> list:
    return [matrix_to_json(m) for m in ops]


def encode_bundle(b: BundleData) -> dict:
    return {
        "schema": BUNDLE_SCHEMA,
        "base": _encode_cochain_complex(b.base),
        "f_op": _ops_to_json(b.f_op),
        "h2_op": _ops_to_json(b.h2_op),
        "h3_op": _ops_to_json(b.h3_op),
        "radius": float(b.radius),
    }


def _require(payload: dict, key: str):
    if key not in payload:
        raise ParseError(f"missing required key {key!r}")
    return payload[key]


def _decode_local_system(payload: dict) -> LocalSystem:
    rank = int(_require(payload, "rank"))
    holonomy = {}
    for item in _require(payload, "holonomy"):
        a, b = (int(v) for v in _require(item, "edge"))
        holonomy[(a, b)] = matrix_from_json(_require(item, "matrix"), (rank, rank))
    return LocalSystem(rank=rank, holonomy=holonomy)


def _decode_simplicial(payload: dict):
    tops = [tuple(int(v) for v in s) for s in _require(payload, "top_simplices")]
    orientation = None
    if payload.get("orientation") is not None:
        signs = payload["orientation"]
        if len(signs) != len(tops):
            raise ParseError("orientation list does not match top_simplices")
        orientation = {tuple(sorted(s)): int(e) for s, e in zip(tops, signs)}
    mixed = len({len(s) for s in tops}) > 1
    K = build_simplicial(tops, orientation, allow_mixed_dimension=mixed)
    if payload.get("local_system") is not None:
        return K, _decode_local_system(payload["local_system"])
    return K, None


def _decode_cochain_complex(payload: dict) -> GradedCochainComplex:
    dims = tuple(int(n) for n in _require(payload, "dims"))
    cob_json = _require(payload, "coboundary")
    if len(cob_json) != max(len(dims) - 1, 0):
        raise ParseError(
            f"expected {len(dims) - 1} coboundary blocks, got {len(cob_json)}"
        )
    cob = tuple(
        matrix_from_json(rows, (dims[p + 1], dims[p]))
        for p, rows in enumerate(cob_json)
    )
    gram = None
    if payload.get("gram") is not None:
        gram_json = payload["gram"]
        if len(gram_json) != len(dims):
            raise ParseError("gram list must have one block per degree")
        gram = tuple(
            matrix_from_json(rows, (n, n)) for n, rows in zip(dims, gram_json)
        )
    return GradedCochainComplex(dims=dims, coboundary=cob, gram=gram)


def _decode_bundle(payload: dict) -> BundleData:
    base = _decode_cochain_complex(_require(payload, "base"))
    dims = base.dims

    def ops(key: str, shift: int):
        raw = payload.get(key)
        if raw is None:
            return None
        blocks = {}
        for q, rows in enumerate(raw):
            rows_n = dims[q + shift] if q + shift < len(dims) else 0
            blocks[q] = matrix_from_json(rows, (rows_n, dims[q]))
        return blocks

    return BundleData(
        base=base,
        f_op=ops("f_op", 2),
        h2_op=ops("h2_op", 2),
        h3_op=ops("h3_op", 3),
        radius=float(_require(payload, "radius")),
    )


def encode_cochain(c) -> dict:
    return {
        "schema": COCHAIN_SCHEMA,
        "degree": int(c.degree),
        "coefficients": [
            [float(z.real), float(z.imag)] for z in np.asarray(c.coefficients)
        ],
    }


def decode_cochain(payload: dict):
    from .chain_models import Cochain

    degree = int(_require(payload, "degree"))
    try:
        coeffs = np.array(
            [complex(e[0], e[1]) for e in _require(payload, "coefficients")],
            dtype=np.complex128,
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise ParseError(f"malformed cochain coefficients: {exc}") from exc
    return Cochain(degree=degree, coefficients=coeffs)


def decode_model(payload: dict):
    """Dispatch on the schema tag.  Simplicial models decode to a pair
    (complex, local_system or None); everything else to a single object."""
    if not isinstance(payload, dict):
        raise ParseError("top-level JSON value must be an object")
    schema = payload.get("schema")
    if schema == COMPLEX_SCHEMA:
        kind = payload.get("kind")
        if kind == "simplicial":
            return _decode_simplicial(payload)
        if kind == "cochain":
            return _decode_cochain_complex(payload)
        raise ParseError(f"unknown complex kind {kind!r}")
    if schema == BUNDLE_SCHEMA:
        return _decode_bundle(payload)
    if schema == COCHAIN_SCHEMA:
        return decode_cochain(payload)
    raise ParseError(f"unknown schema {schema!r}")


def canonical_bytes(payload: dict) -> bytes:
    return (
        json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)
        + "\n"
    ).encode("utf-8")


def digest(payload: dict) -> str:
    return hashlib.sha256(canonical_bytes(payload)).hexdigest()


def load_json_file(path: str | Path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def dump_json_file(path: str | Path, payload: dict) -> None:
    Path(path).write_bytes(canonical_bytes(payload))
