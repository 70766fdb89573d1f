"""End-to-end construction: tower, adapted basis, approximants, resolution, weights."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .adapted import AdaptedSystem, canonical_x, interleave
from .approximants import EpsilonSchedule, build_all, make_schedule
from .numeric import ToleranceConfig
from .resolution import DualSystem, PerturbationOperator, assemble_T, dual_vectors
from .tower import TailSequence, TailTower, build_tower
from .weights import (
    FrameCertificate,
    WeightError,
    WeightSequence,
    constant_C,
    explicit_lambda,
    frame_operator_eig_check,
    used_k_max,
)

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_WEIGHTS",
    "PipelineResult",
    "schedule_from_spec",
    "weights_from_spec",
    "certify",
    "run_pipeline",
    "inject_gamma_fault",
]

DEFAULT_EPSILON = {"kind": "geometric", "params": {"ratio": 0.5, "mass": 0.25}}
DEFAULT_WEIGHTS = {"kind": "dyadic"}


@dataclass(frozen=True)
class PipelineResult:
    seq: TailSequence
    tol: ToleranceConfig
    tower: TailTower
    system: AdaptedSystem
    schedule: EpsilonSchedule
    approximants: tuple
    perturbation: PerturbationOperator
    duals: DualSystem
    certificate: FrameCertificate
    k_max: int


def schedule_from_spec(spec, count: int) -> EpsilonSchedule:
    spec = spec or DEFAULT_EPSILON
    kind = spec.get("kind", "geometric")
    if kind == "geometric":
        params = {**DEFAULT_EPSILON["params"], **(spec.get("params") or {})}
        return make_schedule(count, "geometric", ratio=params["ratio"], mass=params["mass"])
    return make_schedule(count, kind, values=spec.get("values"))


def weights_from_spec(spec, k_max: int) -> WeightSequence:
    spec = spec or DEFAULT_WEIGHTS
    kind = spec.get("kind", "dyadic")
    if kind == "dyadic":
        return WeightSequence.dyadic(k_max)
    if kind == "explicit":
        values = spec.get("values") or []
        if len(values) < k_max:
            raise WeightError(f"explicit weights give {len(values)} values, {k_max} needed")
        return WeightSequence.explicit(values[:k_max])
    raise WeightError(f"unknown weight kind {kind!r}")


def certify(seq, w, zs, weights: WeightSequence, T_norm, res_residual, k_max) -> FrameCertificate:
    C_a = constant_C(weights, w, zs)
    lam, bound, contributing = explicit_lambda(w, zs, k_max)
    eig = frame_operator_eig_check(lam, seq)
    eig_w = frame_operator_eig_check([C_a * a for a in weights.values], seq)
    return FrameCertificate(C_a, weights, lam, bound, contributing, T_norm, res_residual, eig, eig_w)


def run_pipeline(seq: TailSequence, tol: ToleranceConfig | None = None, epsilon=None, weights=None,
                 max_tail: int | None = None, workers: int | None = None) -> PipelineResult:
    """Run every construction stage on ``seq``.

    ``epsilon`` and ``weights`` are either ready objects or instance-file
    style dicts (``{"kind": "geometric", "params": {...}}``,
    ``{"kind": "explicit", "values": [...]}``, ``{"kind": "dyadic"}``).
    """
    tol = tol or ToleranceConfig()
    tower = build_tower(seq, tol)
    system = interleave(canonical_x(seq, tower, tol), tower.h_inf)
    schedule = epsilon if isinstance(epsilon, EpsilonSchedule) else schedule_from_spec(epsilon, system.length)
    zs = tuple(build_all(system, seq, schedule, tol, max_tail, workers))
    T = assemble_T(system, zs, seq)
    duals = dual_vectors(T, system, zs, seq, tol, workers)
    k_max = used_k_max(zs, seq)
    if isinstance(weights, WeightSequence):
        if weights.k_max < k_max:
            raise WeightError(f"weights cover k <= {weights.k_max}, {k_max} needed")
        a = weights
    else:
        a = weights_from_spec(weights, k_max)
    cert = certify(seq, duals.w, zs, a, T.norm, duals.resolution_residual, k_max)
    return PipelineResult(seq, tol, tower, system, schedule, zs, T, duals, cert, k_max)


def inject_gamma_fault(result: PipelineResult, n: int | None = None, k: int | None = None,
                       delta: float = 0.5) -> PipelineResult:
    """Copy of ``result`` with one stored ``gamma_k^(n)`` shifted by ``delta``.

    Nothing downstream is recomputed, so the stored ``T``, ``w`` and
    certificate no longer match the coefficients.  Defaults to the first
    coefficient of the first non-placeholder approximant.
    """
    zs = list(result.approximants)
    if n is None:
        n = next(z.n for z in zs if z.coeffs)
    z = zs[n - 1]
    if not z.coeffs:
        raise ValueError(f"approximant z_{n} has no coefficients to perturb")
    if k is None:
        k = z.coeffs[0][0]
    if k not in z.indices:
        raise ValueError(f"approximant z_{n} carries no coefficient for k={k}")
    coeffs = tuple((j, g + delta if j == k else g) for j, g in z.coeffs)
    zs[n - 1] = replace(z, coeffs=coeffs)
    return replace(result, approximants=tuple(zs))
