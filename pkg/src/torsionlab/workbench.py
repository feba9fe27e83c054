"""Command execution and report plumbing shared by the CLI and tests.

A Report captures everything a command produced.  Wall-clock timings are
kept on the object for the text renderer but never enter the JSON
encoding, so report payloads are byte-stable across runs.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import builders, circle_bundle
from .chain_models import (
    Cochain,
    GradedCochainComplex,
    SimplicialComplex,
    coboundary_matrices,
    twisted_differential,
)
from .circle_bundle import (
    BundleData,
    build_invariant_complex,
    deformation_experiment,
    gram_scale_path,
    t_dualize,
    verify_t_duality,
)
from .errors import ParseError, UnknownBuilder, ValidationError
from .serialize import (
    REPORT_SCHEMA,
    canonical_bytes,
    decode_cochain,
    decode_model,
    digest,
    encode_bundle,
    encode_complex,
    load_json_file,
)
from .torsion_engine import (
    cohomology_dimensions,
    reidemeister_torsion,
    twisted_cohomology_dimensions,
    twisted_torsion,
)

__all__ = [
    "RunOptions",
    "Report",
    "COMMANDS",
    "load_model",
    "load_bundle",
    "parse_flux",
    "run",
    "emit",
    "parse_report",
]

COMMANDS = (
    "reidemeister",
    "twisted",
    "bundle-torsion",
    "t-dual",
    "verify-duality",
    "deform",
)


@dataclass(frozen=True)
class RunOptions:
    flux: str = "zero"
    radius: float | None = None
    kernel_tol: float | None = None
    seed: int | None = None
    steps: int = 8
    duality_tol: float = 1e-8


@dataclass(frozen=True)
class Report:
    command: str
    model: str
    convention: str | None
    kernel_tol: float | None
    result: dict
    warnings: tuple[str, ...] = ()
    errors: tuple[str, ...] = ()
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "model": self.model,
            "convention": self.convention,
            "kernel_tol": self.kernel_tol,
            "result": self.result,
            "warnings": list(self.warnings),
            "errors": list(self.errors),
        }


def parse_report(payload: dict) -> Report:
    if payload.get("schema") != REPORT_SCHEMA:
        raise ParseError(f"expected schema {REPORT_SCHEMA!r}, got {payload.get('schema')!r}")
    return Report(
        command=payload["command"],
        model=payload["model"],
        convention=payload.get("convention"),
        kernel_tol=payload.get("kernel_tol"),
        result=payload["result"],
        warnings=tuple(payload.get("warnings", ())),
        errors=tuple(payload.get("errors", ())),
    )


# ---------------------------------------------------------------------------
# model resolution
# ---------------------------------------------------------------------------

def _looks_like_path(text: str) -> bool:
    return text.endswith(".json") or Path(text).exists()


def load_model(text: str):
    """Resolve a model reference: a JSON file path or builder syntax.
    Bundle builders (hopf, random) are part of the catalog too."""
    if _looks_like_path(text):
        return decode_model(load_json_file(text))
    m = _BUNDLE_CALL.match(text)
    if m and m.group(1) in ("hopf", "random", "random_bundle"):
        return load_bundle(text)
    return builders.from_expression(text)


def _as_complex(obj) -> GradedCochainComplex:
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], SimplicialComplex):
        return coboundary_matrices(obj[0], obj[1])
    if isinstance(obj, SimplicialComplex):
        return coboundary_matrices(obj)
    if isinstance(obj, GradedCochainComplex):
        return obj
    raise ValidationError(
        f"this command needs a cochain or simplicial model, got {type(obj).__name__}"
    )


_BUNDLE_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*$")


def _float_args(argtext: str) -> list[float]:
    out = []
    for piece in argtext.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            out.append(float(piece))
        except ValueError as exc:
            raise UnknownBuilder(f"bundle arguments must be numbers, got {piece!r}") from exc
    return out


def load_bundle(text: str, options: RunOptions | None = None) -> BundleData:
    """Resolve a bundle reference: JSON file, ``hopf(f,h2[,r])``, or
    ``random_bundle([seed[,top]])``; --radius and --seed override."""
    options = options or RunOptions()
    if _looks_like_path(text):
        obj = decode_model(load_json_file(text))
        if not isinstance(obj, BundleData):
            raise ValidationError(f"{text} does not contain bundle data")
        bundle = obj
    else:
        m = _BUNDLE_CALL.match(text)
        if not m:
            raise UnknownBuilder(
                f"cannot parse bundle expression {text!r}; expected name(arg, ...)"
            )
        name, args = m.group(1), _float_args(m.group(2))
        if name == "hopf":
            if len(args) == 2:
                bundle = circle_bundle.hopf(args[0], args[1], 1.0)
            elif len(args) == 3:
                bundle = circle_bundle.hopf(args[0], args[1], args[2])
            else:
                raise UnknownBuilder("hopf takes (f, h2) or (f, h2, radius)")
        elif name in ("random", "random_bundle"):
            seed = int(args[0]) if args else (options.seed if options.seed is not None else 0)
            top = int(args[1]) if len(args) > 1 else 3
            bundle = circle_bundle.random_bundle(seed, top)
        else:
            raise UnknownBuilder(
                f"unknown bundle model {name!r}; known: hopf, random"
            )
    if options.radius is not None:
        bundle = BundleData(
            base=bundle.base,
            f_op=bundle.f_op,
            h2_op=bundle.h2_op,
            h3_op=bundle.h3_op,
            radius=options.radius,
        )
    return bundle


def parse_flux(spec: str | None, C: GradedCochainComplex):
    """Flux option grammar: ``zero``, ``top``, ``top(c)`` with a real or
    complex coefficient on the canonical all-ones top cochain, or a path
    to a cochain.v1 JSON file."""
    text = (spec or "zero").strip()
    if text in ("zero", "none", "0"):
        return None
    if _looks_like_path(text):
        payload = load_json_file(text)
        if payload.get("schema") != "cochain.v1":
            raise ValidationError(f"{text} is not a cochain.v1 file")
        return decode_cochain(payload)
    m = re.match(r"^top(?:\((.*)\))?$", text)
    if m is None:
        raise ValidationError(
            f"unknown flux spec {spec!r}; expected zero, top, or top(c)"
        )
    coeff = 1.0 + 0.0j
    if m.group(1):
        try:
            coeff = complex(m.group(1).strip().replace(" ", ""))
        except ValueError as exc:
            raise ValidationError(f"bad flux coefficient {m.group(1)!r}") from exc
    top = C.top
    n = C.simplicial.n(top) if C.simplicial is not None else C.dims[top]
    return Cochain(degree=top, coefficients=coeff * np.ones(n, dtype=np.complex128))


# ---------------------------------------------------------------------------
# command execution
# ---------------------------------------------------------------------------

def _digest_of_model(obj) -> str:
    if isinstance(obj, tuple):
        return digest(encode_complex(obj[0], obj[1]))
    if isinstance(obj, BundleData):
        return digest(encode_bundle(obj))
    return digest(encode_complex(obj))


def run(command: str, model: str, options: RunOptions | None = None) -> Report:
    """Execute one workbench command and wrap the outcome in a Report.

    Input and model errors raise; they are the caller's problem (the CLI
    maps them to exit code 2).
    """
    options = options or RunOptions()
    t0 = time.perf_counter()

    if command == "reidemeister":
        obj = load_model(model)
        C = _as_complex(obj)
        elem = reidemeister_torsion(C, kernel_tol=options.kernel_tol)
        result = {
            "torsion": elem.to_json(),
            "cohomology_dims": list(cohomology_dimensions(C)),
            "model_digest": _digest_of_model(obj),
        }
        convention = elem.convention_tag
        warnings = elem.warnings
    elif command == "twisted":
        obj = load_model(model)
        C = _as_complex(obj)
        flux = parse_flux(options.flux, C)
        T = twisted_differential(C, flux)
        elem = twisted_torsion(T, kernel_tol=options.kernel_tol)
        even, odd = twisted_cohomology_dimensions(T)
        result = {
            "torsion": elem.to_json(),
            "flux": options.flux or "zero",
            "cohomology_dims": {"even": even, "odd": odd},
            "model_digest": _digest_of_model(obj),
        }
        convention = elem.convention_tag
        warnings = elem.warnings
    elif command == "bundle-torsion":
        bundle = load_bundle(model, options)
        ic = build_invariant_complex(bundle)
        elem = twisted_torsion(ic.pair, kernel_tol=options.kernel_tol)
        result = {
            "torsion": elem.to_json(),
            "radius": bundle.radius,
            "cohomology_dims": {
                "even": elem.kernel_dims[0],
                "odd": elem.kernel_dims[1],
            },
            "model_digest": _digest_of_model(bundle),
        }
        convention = elem.convention_tag
        warnings = elem.warnings
    elif command == "t-dual":
        bundle = load_bundle(model, options)
        dual = t_dualize(bundle)
        payload = encode_bundle(dual)
        result = {
            "bundle": payload,
            "radius": dual.radius,
            "model_digest": _digest_of_model(bundle),
            "dual_digest": digest(payload),
        }
        convention = None
        warnings = ()
    elif command == "verify-duality":
        bundle = load_bundle(model, options)
        rep = verify_t_duality(
            bundle, kernel_tol=options.kernel_tol, tol=options.duality_tol
        )
        result = {
            **rep.to_json(),
            "tolerance": options.duality_tol,
            "passed": abs(rep.product_log) <= options.duality_tol,
            "model_digest": _digest_of_model(bundle),
        }
        convention = rep.torsion.convention_tag
        warnings = tuple(rep.torsion.warnings) + tuple(rep.dual_torsion.warnings)
    elif command == "deform":
        bundle = load_bundle(model, options)
        path = gram_scale_path(bundle, degree=0, factor=2.0)
        drift = deformation_experiment(
            path, options.steps, kernel_tol=options.kernel_tol
        )
        result = {
            **drift.to_json(),
            "path": "gram_scale(degree=0, factor=2.0)",
            "model_digest": _digest_of_model(bundle),
        }
        convention = None
        warnings = ()
    else:
        raise ValidationError(
            f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}"
        )

    wall = time.perf_counter() - t0
    return Report(
        command=command,
        model=model,
        convention=convention,
        kernel_tol=options.kernel_tol,
        result=result,
        warnings=tuple(warnings),
        timings={"wall_seconds": wall},
    )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _text_lines(report: Report) -> list[str]:
    lines = [f"torsion {report.command} {report.model}"]
    if report.convention:
        lines.append(f"  convention: {report.convention}")
    tol = "auto" if report.kernel_tol is None else repr(report.kernel_tol)
    lines.append(f"  kernel tolerance: {tol}")
    r = report.result
    if "torsion" in r and "product_log" not in r:
        t = r["torsion"]
        lines.append(f"  log tau = {t['log_scalar']!r}")
        lines.append(f"  tau = {t['scalar']!r}")
        lines.append(f"  kernel dims = {t['kernel_dims']}")
    if "product_log" in r:
        lines.append(f"  log tau = {r['torsion']['log_scalar']!r}")
        lines.append(f"  log tau_dual = {r['dual_torsion']['log_scalar']!r}")
        lines.append(f"  tau * tau_dual = {r['tau_times_tau_dual']!r}")
        lines.append(f"  |log tau + log tau_dual| = {abs(r['product_log'])!r}")
        lines.append(f"  tolerance: {r['tolerance']!r}")
        for key in (
            "intertwining_residual",
            "isometry_residual",
            "inverse_residual",
            "spectral_transport_residual",
            "harmonic_transport_residual",
        ):
            lines.append(f"  {key.replace('_', ' ')} = {r[key]!r}")
        lines.append(f"  verdict: {'pass' if r['passed'] else 'FAIL'}")
    if "max_abs_log_drift" in r:
        lines.append(f"  path: {r['path']}")
        lines.append(f"  parameters: {r['parameters']}")
        lines.append(f"  log scalars: {r['log_scalars']}")
        lines.append(f"  max |log drift| = {r['max_abs_log_drift']!r}")
        lines.append(f"  note: {r['note']}")
    if "cohomology_dims" in r:
        lines.append(f"  cohomology dims: {r['cohomology_dims']}")
    if report.command == "t-dual":
        lines.append(f"  dual radius = {r['radius']!r}")
        lines.append(f"  dual digest = {r['dual_digest']}")
    for w in report.warnings:
        lines.append(f"  warning: {w}")
    for e in report.errors:
        lines.append(f"  error: {e}")
    if "wall_seconds" in report.timings:
        lines.append(f"  wall time: {report.timings['wall_seconds']:.3f} s")
    return lines


def emit(report: Report, fmt: str = "json") -> bytes:
    """Render a report; JSON is canonical bytes, text is for terminals."""
    if fmt == "json":
        return canonical_bytes(report.to_json())
    if fmt == "text":
        return ("\n".join(_text_lines(report)) + "\n").encode("utf-8")
    raise ValidationError(f"unknown format {fmt!r}; expected json or text")
