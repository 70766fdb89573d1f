"""Instance files and certificate reports (JSON, complex numbers as ``[re, im]``)."""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .approximants import ScheduleError, make_schedule
from .numeric import ToleranceConfig
from .pipeline import PipelineResult
from .tower import TailSequence

__all__ = [
    "SCHEMA_VERSION",
    "REPORT_SCHEMA_VERSION",
    "InstanceError",
    "Instance",
    "parse_instance",
    "load_instance",
    "instance_digest",
    "dumps",
    "encode_scalar",
    "decode_scalar",
    "build_report",
]

SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1


class InstanceError(ValueError):
    """Malformed or invalid instance file."""


@dataclass(frozen=True)
class Instance:
    seq: TailSequence
    epsilon: dict
    weights: dict
    tol: ToleranceConfig
    seed: int
    raw: dict

    @property
    def digest(self) -> str:
        return instance_digest(self.raw)


def encode_scalar(z, complex_field: bool):
    if complex_field:
        z = complex(z)
        return [z.real, z.imag]
    return float(np.real(z))


def decode_scalar(value, complex_field: bool):
    if complex_field:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return complex(value, 0.0)
        if isinstance(value, list) and len(value) == 2 and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return complex(value[0], value[1])
        raise InstanceError(f"complex entry must be a number or [re, im] pair, got {value!r}")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise InstanceError(f"real entry must be a number, got {value!r}")


def _decode_vectors(rows, dim, complex_field, name):
    if not isinstance(rows, list):
        raise InstanceError(f"{name} must be a list of vectors")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise InstanceError(f"{name}[{i}] must be a list of {dim} entries")
        out.append([decode_scalar(v, complex_field) for v in row])
    return out


def _validate_epsilon(spec):
    if spec is None:
        return {"kind": "geometric", "params": {"ratio": 0.5, "mass": 0.25}}
    if not isinstance(spec, dict) or spec.get("kind") not in ("geometric", "explicit"):
        raise InstanceError("epsilon must be an object with kind 'geometric' or 'explicit'")
    try:
        if spec["kind"] == "geometric":
            params = {"ratio": 0.5, "mass": 0.25, **(spec.get("params") or {})}
            make_schedule(1, "geometric", ratio=float(params["ratio"]), mass=float(params["mass"]))
            return {"kind": "geometric", "params": params}
        values = spec.get("values")
        if not isinstance(values, list) or not values:
            raise InstanceError("explicit epsilon needs a non-empty 'values' list")
        make_schedule(len(values), "explicit", values=values)
        return {"kind": "explicit", "values": [float(v) for v in values]}
    except (ScheduleError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"invalid epsilon schedule: {exc}") from exc


def _validate_weights(spec):
    if spec is None:
        return {"kind": "dyadic"}
    if not isinstance(spec, dict) or spec.get("kind") not in ("dyadic", "explicit"):
        raise InstanceError("weights must be an object with kind 'dyadic' or 'explicit'")
    if spec["kind"] == "dyadic":
        return {"kind": "dyadic"}
    values = spec.get("values")
    if not isinstance(values, list) or not values:
        raise InstanceError("explicit weights need a non-empty 'values' list")
    try:
        values = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"invalid weight value: {exc}") from exc
    if any(not (v > 0 and np.isfinite(v)) for v in values):
        raise InstanceError("weights must be positive and finite")
    return {"kind": "explicit", "values": values}


def parse_instance(raw: dict, tol_overrides: dict | None = None) -> Instance:
    """Validate an instance mapping.

    Totality is not checked here; building the tower rejects non-total
    sequences with :class:`~tailframe.tower.TotalityError`.
    """
    if not isinstance(raw, dict):
        raise InstanceError("instance must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InstanceError(f"unsupported schema_version {version!r}")
    field = raw.get("field", "real")
    if field not in ("real", "complex"):
        raise InstanceError(f"field must be 'real' or 'complex', got {field!r}")
    dim = raw.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InstanceError("dim must be a positive integer")
    complex_field = field == "complex"
    prefix = _decode_vectors(raw.get("prefix", []), dim, complex_field, "prefix")
    cycle = _decode_vectors(raw.get("cycle", []), dim, complex_field, "cycle")
    if not prefix and not cycle:
        raise InstanceError("instance has no vectors")

    tol_raw = raw.get("tolerances") or {}
    if not isinstance(tol_raw, dict):
        raise InstanceError("tolerances must be an object")
    try:
        tol = ToleranceConfig().with_overrides(**{**tol_raw, **(tol_overrides or {})})
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"invalid tolerances: {exc}") from exc

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise InstanceError("seed must be a nonnegative integer")

    seq = TailSequence.from_vectors(prefix, cycle, field, dim=dim)
    return Instance(seq, _validate_epsilon(raw.get("epsilon")), _validate_weights(raw.get("weights")),
                    tol, seed, raw)


def load_instance(path, tol_overrides: dict | None = None) -> Instance:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance {path}: {exc}") from exc
    return parse_instance(raw, tol_overrides)


def instance_digest(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _vec(v, complex_field):
    return [encode_scalar(x, complex_field) for x in v]


def build_report(result: PipelineResult, checks, digest: str, seed: int, samples: int,
                 timings: dict | None = None) -> dict:
    """Certificate report as a JSON-ready mapping.

    Every pass/fail in ``checks`` is stored with its measured value,
    reference and tolerance.  ``timings`` is included only when given, so
    default reports are byte-reproducible.
    """
    seq = result.seq
    cx = seq.field == "complex"
    cert = result.certificate
    tower = result.tower
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": {"name": "tailframe", "version": __version__, "numpy": np.__version__,
                 "python": platform.python_version()},
        "instance_digest": digest,
        "field": seq.field,
        "dim": seq.dim,
        "prefix_len": seq.m,
        "cycle_len": seq.p,
        "tolerances": result.tol.as_dict(),
        "sampling": {"seed": seed, "samples": samples},
        "tower": {"dims": tower.dims, "h_inf_dim": tower.h_inf.rank, "stab_index": tower.stab_index},
        "adapted": {
            "length": result.system.length,
            "nonzero_count": result.system.nonzero_count,
            "u": [_vec(u, cx) for u in result.system.u],
        },
        "epsilon": {"kind": result.schedule.kind, "sum_sq": result.schedule.sum_sq},
        "approximants": [
            {
                "n": z.n,
                "start": z.start,
                "K": z.K,
                "eps": z.eps,
                "err": z.err,
                "gamma": [[k, encode_scalar(g, cx)] for k, g in z.coeffs],
            }
            for z in result.approximants
        ],
        "perturbation": {"T_norm": result.perturbation.norm, "bound": result.perturbation.bound},
        "duals": {
            "w": [_vec(w, cx) for w in result.duals.w],
            "resolution_residual": result.duals.resolution_residual,
            "neumann_gap": result.duals.neumann_gap,
            "neumann_order": result.duals.neumann_order,
        },
        "frame": {
            "k_max": result.k_max,
            "weights": {"kind": cert.weights.kind, "values": list(cert.weights.values)},
            "C_a": cert.C_a,
            "eig_slack_C": cert.eig_slack_weighted,
            "lambda": list(cert.lam),
            "lambda_bound": list(cert.lam_bound),
            "contributing": list(cert.contributing),
            "eig_slack": cert.eig_slack,
        },
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
    if timings is not None:
        report["timings"] = timings
    return report
