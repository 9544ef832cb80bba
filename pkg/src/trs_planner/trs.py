"""Resource-substitution planning on top of the rate model.

Inverts the per-user rate for each of the three provisioning levers
(spectrum, station density, antennas per station), traces indifference
curves at fixed demand, and measures the technical rate of substitution
(TRS) between spectrum and the infrastructure levers.

Step policy: the published substitution tables difference the indifference
curve with a forward unit step on the infrastructure axis (one extra
station per unit area, one extra antenna), so that is the frozen default
here ("unit-step").  A derivative-based variant ("central-derivative",
implicit-function ratio with a relative step of 1e-3) is kept selectable
for smooth-curve analysis; both are recorded on the returned value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .coverage import (
    ConfigError,
    LoadModel,
    NetworkConfig,
    active_probability,
    mean_load_share,
    spectral_efficiency,
    user_rate,
)

RATE_REL_TOL = 1e-6
DENSITY_REL_TOL = 1e-8
DEFAULT_MAX_ANTENNAS = 1024
DEFAULT_MAX_DENSITY_RATIO = 1e4
CENTRAL_REL_STEP = 1e-3


class InfeasibleError(RuntimeError):
    """The demand cannot be met by moving the requested lever."""


class ScaleMode(enum.Enum):
    DOUBLE_RATE = "double-rate"
    DOUBLE_USAGE = "double-usage"


class Lever(enum.Enum):
    SPECTRUM = "spectrum"
    DENSITY = "density"
    ANTENNAS = "antennas"


@dataclass(frozen=True)
class OperatingPoint:
    """A network configuration delivering a target per-user rate."""

    config: NetworkConfig
    target_rate_mbps: float

    def __post_init__(self):
        if self.target_rate_mbps <= 0.0:
            raise ConfigError(f"target rate must be positive, got {self.target_rate_mbps}")


def make_operating_point(
    target_rate_mbps: float,
    lambda_b: float,
    antennas: int,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
) -> OperatingPoint:
    """Operating point with the bandwidth solved to meet the target rate."""
    w = required_spectrum(target_rate_mbps, lambda_b, antennas, lambda_u, alpha, load_model)
    config = NetworkConfig(
        lambda_b=lambda_b,
        lambda_u=lambda_u,
        antennas=antennas,
        bandwidth_mhz=w,
        alpha=alpha,
        load_model=load_model,
    )
    return OperatingPoint(config=config, target_rate_mbps=target_rate_mbps)


def required_spectrum(
    target_rate_mbps: float,
    lambda_b: float,
    antennas: int,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
) -> float:
    """Bandwidth (MHz) meeting the target rate; exact since rate is linear in W."""
    if target_rate_mbps < 0.0:
        raise ConfigError(f"target rate must be >= 0, got {target_rate_mbps}")
    p_a = active_probability(lambda_b / lambda_u)
    se = spectral_efficiency(p_a, antennas, alpha)
    share = 1.0 if load_model is LoadModel.NO_SHARING else min(1.0, p_a * lambda_b / lambda_u)
    denom = se * share
    if denom <= 0.0 or not math.isfinite(denom):
        raise InfeasibleError(f"rate per MHz is degenerate ({denom}) at lambda_b={lambda_b}")
    return target_rate_mbps / denom


def _rate_at_density(lambda_b, bandwidth_mhz, antennas, lambda_u, alpha, load_model):
    cfg = NetworkConfig(
        lambda_b=lambda_b,
        lambda_u=lambda_u,
        antennas=antennas,
        bandwidth_mhz=bandwidth_mhz,
        alpha=alpha,
        load_model=load_model,
    )
    return user_rate(cfg)


def required_density(
    target_rate_mbps: float,
    bandwidth_mhz: float,
    antennas: int,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
    bracket: tuple[float, float] | None = None,
    max_density_ratio: float = DEFAULT_MAX_DENSITY_RATIO,
) -> float:
    """Station density meeting the target rate at fixed bandwidth.

    Bisection on the monotone map lambda_b -> rate; the bracket auto-expands
    up to ``max_density_ratio * lambda_u`` unless one is supplied.  Raises
    InfeasibleError when no density within the bracket reaches the demand:
    once the bandwidth share saturates the rate grows only logarithmically
    with density, so demands can sit effectively out of reach.
    """
    if target_rate_mbps <= 0.0:
        raise ConfigError(f"target rate must be positive, got {target_rate_mbps}")

    def rate(lam):
        return _rate_at_density(lam, bandwidth_mhz, antennas, lambda_u, alpha, load_model)

    if bracket is not None:
        lo, hi = bracket
        if rate(lo) > target_rate_mbps or rate(hi) < target_rate_mbps:
            raise InfeasibleError(
                f"no sign change in bracket [{lo}, {hi}] for {target_rate_mbps} Mbps"
            )
    else:
        cap = max_density_ratio * lambda_u
        lo = hi = lambda_u
        while rate(hi) < target_rate_mbps:
            if hi >= cap:
                raise InfeasibleError(
                    f"infeasible demand: {target_rate_mbps} Mbps not reached at the "
                    f"density search cap lambda_b={cap:.3g} (rate grows only "
                    "logarithmically once the bandwidth share saturates)"
                )
            hi = min(hi * 4.0, cap)
        for _ in range(60):
            if rate(lo) <= target_rate_mbps:
                break
            lo /= 4.0
        else:
            raise InfeasibleError(f"demand met even at vanishing density (lambda_b={lo:.3g})")

    while (hi - lo) > DENSITY_REL_TOL * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if rate(mid) < target_rate_mbps:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    achieved = rate(lam)
    if abs(achieved - target_rate_mbps) > RATE_REL_TOL * target_rate_mbps:
        raise ArithmeticError(
            f"bisection landed at {achieved} Mbps against target {target_rate_mbps}"
        )
    return lam


def required_antennas(
    target_rate_mbps: float,
    bandwidth_mhz: float,
    lambda_b: float,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
    max_antennas: int = DEFAULT_MAX_ANTENNAS,
) -> int:
    """Smallest antenna count meeting the target rate at fixed W and density.

    Raises InfeasibleError when the search cap is reached: per-antenna gains
    diminish, so demands can be unreachable at any sane array size.
    """
    if target_rate_mbps <= 0.0:
        raise ConfigError(f"target rate must be positive, got {target_rate_mbps}")

    def rate(m):
        cfg = NetworkConfig(
            lambda_b=lambda_b,
            lambda_u=lambda_u,
            antennas=m,
            bandwidth_mhz=bandwidth_mhz,
            alpha=alpha,
            load_model=load_model,
        )
        return user_rate(cfg)

    # tolerate float dust when the demand sits exactly on a solved point
    floor = target_rate_mbps * (1.0 - RATE_REL_TOL)
    if rate(1) >= floor:
        return 1
    lo = 1
    hi = 2
    while rate(hi) < floor:
        lo = hi
        if hi >= max_antennas:
            raise InfeasibleError(
                f"antenna-infeasible: {target_rate_mbps} Mbps not reached at "
                f"the {max_antennas}-antenna search cap"
            )
        hi = min(hi * 2, max_antennas)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if rate(mid) < floor:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class CurveSample:
    axis1: float
    axis2: float | None
    feasible: bool


@dataclass(frozen=True)
class IndifferenceCurve:
    """Samples of (infrastructure value, spectrum MHz) at fixed demand."""

    pair: str
    target_rate_mbps: float
    lambda_u: float
    held: dict
    samples: tuple[CurveSample, ...]


def indifference_curve(
    target_rate_mbps: float,
    lambda_u: float,
    pair: str,
    grid,
    lambda_b: float | None = None,
    antennas: int | None = None,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
) -> IndifferenceCurve:
    """Trace spectrum against antennas ("w-m") or density ("w-density").

    Axis 1 runs over the supplied grid (antenna counts or station
    densities, sorted ascending); axis 2 is the spectrum meeting the
    demand there.  Per-sample infeasibility is recorded, not raised.
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("curve grid must be non-empty")
    if sorted(grid) != grid:
        raise ConfigError("curve grid must be sorted ascending")
    samples = []
    if pair == "w-m":
        if lambda_b is None:
            raise ConfigError("w-m curve needs the held lambda_b")
        held = {"lambda_b": lambda_b, "alpha": alpha, "load_model": load_model.value}
        for m in grid:
            if int(m) != m or m < 1:
                raise ConfigError(f"antenna grid values must be integers >= 1, got {m}")
            try:
                w = required_spectrum(target_rate_mbps, lambda_b, int(m), lambda_u, alpha, load_model)
                samples.append(CurveSample(axis1=float(m), axis2=w, feasible=True))
            except InfeasibleError:
                samples.append(CurveSample(axis1=float(m), axis2=None, feasible=False))
    elif pair == "w-density":
        if antennas is None:
            raise ConfigError("w-density curve needs the held antenna count")
        held = {"antennas": antennas, "alpha": alpha, "load_model": load_model.value}
        for lam in grid:
            if lam <= 0:
                raise ConfigError(f"density grid values must be positive, got {lam}")
            try:
                w = required_spectrum(target_rate_mbps, lam, antennas, lambda_u, alpha, load_model)
                samples.append(CurveSample(axis1=float(lam), axis2=w, feasible=True))
            except InfeasibleError:
                samples.append(CurveSample(axis1=float(lam), axis2=None, feasible=False))
    else:
        raise ConfigError(f"unknown curve pair {pair!r} (expected 'w-m' or 'w-density')")
    return IndifferenceCurve(
        pair=pair,
        target_rate_mbps=target_rate_mbps,
        lambda_u=lambda_u,
        held=held,
        samples=tuple(samples),
    )


def log_grid(lo: float, hi: float, points: int = 64):
    """Default curve grid: log-spaced, endpoints included."""
    if lo <= 0 or hi <= lo:
        raise ConfigError(f"grid bounds must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return list(np.geomspace(lo, hi, points))


@dataclass(frozen=True)
class TrsValue:
    """|delta lever / delta MHz| at an operating point, with provenance."""

    pair: str
    magnitude: float
    units: str
    step_policy: str
    target_rate_mbps: float
    lambda_u: float
    lambda_b: float
    antennas: int
    bandwidth_mhz: float
    note: str = ""

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.magnitude)


def trs_spectrum_antennas(
    target_rate_mbps: float,
    lambda_b: float,
    antennas: int,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
) -> TrsValue:
    """Antennas substituting spectrum: 1 / (W(M) - W(M+1)), forward unit step."""
    w0 = required_spectrum(target_rate_mbps, lambda_b, antennas, lambda_u, alpha, load_model)
    w1 = required_spectrum(target_rate_mbps, lambda_b, antennas + 1, lambda_u, alpha, load_model)
    saving = w0 - w1
    if saving <= 0.0:
        magnitude, note = math.inf, "adding an antenna saves no spectrum here"
    else:
        magnitude, note = 1.0 / saving, ""
    return TrsValue(
        pair="spectrum-antennas",
        magnitude=magnitude,
        units="antennas_per_mhz",
        step_policy="forward-unit-step dM=1",
        target_rate_mbps=target_rate_mbps,
        lambda_u=lambda_u,
        lambda_b=lambda_b,
        antennas=antennas,
        bandwidth_mhz=w0,
        note=note,
    )


def trs_spectrum_density(
    target_rate_mbps: float,
    lambda_b: float,
    antennas: int,
    lambda_u: float,
    alpha: float = 4.0,
    load_model: LoadModel = LoadModel.MEAN_LOAD,
    policy: str = "unit-step",
) -> TrsValue:
    """Density substituting spectrum at a point on the indifference curve.

    "unit-step" differences the curve with one extra station per unit area
    (the table-matching default); "central-derivative" evaluates the
    implicit-function ratio (dR/dW)/(dR/dlambda_b) with dR/dW = R/W exact
    and the density derivative by central difference.
    """
    w0 = required_spectrum(target_rate_mbps, lambda_b, antennas, lambda_u, alpha, load_model)
    if policy == "unit-step":
        w1 = required_spectrum(target_rate_mbps, lambda_b + 1.0, antennas, lambda_u, alpha, load_model)
        saving = w0 - w1
        if saving <= 0.0:
            magnitude, note = math.inf, "densifying saves no spectrum here"
        else:
            magnitude, note = 1.0 / saving, ""
        step = "forward-unit-step dlambda_b=1"
    elif policy == "central-derivative":
        h = CENTRAL_REL_STEP * lambda_b
        up = _rate_at_density(lambda_b + h, w0, antennas, lambda_u, alpha, load_model)
        dn = _rate_at_density(lambda_b - h, w0, antennas, lambda_u, alpha, load_model)
        drate_ddensity = (up - dn) / (2.0 * h)
        drate_dspectrum = target_rate_mbps / w0
        if drate_ddensity <= 0.0:
            magnitude, note = math.inf, "rate is insensitive to density here"
        else:
            magnitude, note = drate_dspectrum / drate_ddensity, ""
        step = f"implicit-ratio central-diff rel={CENTRAL_REL_STEP:g}"
    else:
        raise ConfigError(f"unknown TRS step policy {policy!r}")
    return TrsValue(
        pair="spectrum-density",
        magnitude=magnitude,
        units="lambda_b_per_mhz",
        step_policy=step,
        target_rate_mbps=target_rate_mbps,
        lambda_u=lambda_u,
        lambda_b=lambda_b,
        antennas=antennas,
        bandwidth_mhz=w0,
        note=note,
    )


@dataclass(frozen=True)
class DoublingReport:
    """Resource requirement for scaling demand by ``factor`` with one lever."""

    mode: str
    lever: str
    factor: float
    base_target_rate_mbps: float
    base_lambda_u: float
    scaled_target_rate_mbps: float
    scaled_lambda_u: float
    base_value: float
    lever_value: float | None
    ratio: float | None
    feasible: bool
    note: str = ""


def doubling_scenario(
    base: OperatingPoint,
    mode: ScaleMode,
    lever: Lever,
    factor: float = 2.0,
    max_antennas: int = DEFAULT_MAX_ANTENNAS,
) -> DoublingReport:
    """Scale either the per-user rate or the user density, move one lever.

    Infeasibility is a first-class result: the report carries it instead of
    raising, because rate saturation under densification and diminishing
    antenna gains are findings, not errors.
    """
    if factor <= 0.0:
        raise ConfigError(f"scale factor must be positive, got {factor}")
    cfg = base.config
    if mode is ScaleMode.DOUBLE_RATE:
        target_rate = factor * base.target_rate_mbps
        target_lambda_u = cfg.lambda_u
    else:
        target_rate = base.target_rate_mbps
        target_lambda_u = factor * cfg.lambda_u

    lever_value: float | None
    note = ""
    try:
        if lever is Lever.SPECTRUM:
            base_value = cfg.bandwidth_mhz
            lever_value = required_spectrum(
                target_rate, cfg.lambda_b, cfg.antennas, target_lambda_u, cfg.alpha, cfg.load_model
            )
        elif lever is Lever.DENSITY:
            base_value = cfg.lambda_b
            lever_value = required_density(
                target_rate, cfg.bandwidth_mhz, cfg.antennas, target_lambda_u, cfg.alpha, cfg.load_model
            )
        else:
            base_value = float(cfg.antennas)
            lever_value = float(
                required_antennas(
                    target_rate, cfg.bandwidth_mhz, cfg.lambda_b, target_lambda_u,
                    cfg.alpha, cfg.load_model, max_antennas=max_antennas,
                )
            )
    except InfeasibleError as err:
        lever_value = None
        note = str(err)

    return DoublingReport(
        mode=mode.value,
        lever=lever.value,
        factor=factor,
        base_target_rate_mbps=base.target_rate_mbps,
        base_lambda_u=cfg.lambda_u,
        scaled_target_rate_mbps=target_rate,
        scaled_lambda_u=target_lambda_u,
        base_value=base_value,
        lever_value=lever_value,
        ratio=None if lever_value is None else lever_value / base_value,
        feasible=lever_value is not None,
        note=note,
    )
