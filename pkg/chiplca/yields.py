"""Die yield models, defect-density calibration and wafer geometry."""

import logging
import math
import typing as TYPE

import numpy as np
from logfunc import logf
from pydantic import BaseModel, ConfigDict, Field

from . import config
from .common import YieldModelSpec, YieldVariant
from .ex import DomainError, GeometryError

_log = logging.getLogger(__name__)


class DieCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    gross_real: float = Field(gt=0)
    gross: int = Field(ge=0)
    functional_expected: TYPE.Optional[float] = Field(None, ge=0)

    def with_yield(self, yield_: float) -> 'DieCount':
        return self.model_copy(
            update={
                'functional_expected': functional_dies(self.gross_real, yield_)
            }
        )


def _murphy(ad: float) -> float:
    if ad == 0:
        return 1.0
    # -expm1(-x) keeps precision for small A*D
    return (-math.expm1(-ad) / ad) ** 2


def _poisson(ad: float) -> float:
    return math.exp(-ad)


def _seeds(ad: float) -> float:
    return 1.0 / (1.0 + ad)


_MODELS: TYPE.Dict[YieldVariant, TYPE.Callable[[float], float]] = {
    YieldVariant.murphy: _murphy,
    YieldVariant.poisson: _poisson,
    YieldVariant.seeds: _seeds,
}


def yield_by_variant(
    variant: TYPE.Union[YieldVariant, str],
    die_area: float,
    defect_density: float,
) -> float:
    """Fraction of functional dies for die_area (cm^2) at defect_density
    (defects/cm^2)."""
    if not (die_area > 0 and defect_density >= 0):
        raise DomainError(
            'need die area > 0 and defect density >= 0, got %r, %r'
            % (die_area, defect_density)
        )
    return _MODELS[YieldVariant(variant)](die_area * defect_density)


def yield_fraction(model: YieldModelSpec, die_area: float) -> float:
    """Yield of a die of die_area cm^2 under model.
    ~model (YieldModelSpec): variant and (resolved) defect density
    ~die_area (float): cm^2, > 0
    -> float: fraction in (0, 1]; 1 when A*D == 0
    """
    if model.defect_density is None:
        raise DomainError('yield model has no defect density; calibrate first')
    return yield_by_variant(model.variant, die_area, model.defect_density)


@logf()
def calibrate_defect_density(
    variant: TYPE.Union[YieldVariant, str],
    die_area: float,
    target_yield: float,
    tol: float = config.CALIBRATION_TOL,
) -> float:
    """Defect density that makes `variant` yield target_yield for die_area.

    Bisection on D -> Y(D), which is strictly decreasing. The upper bracket
    starts at A*D = 1 and doubles until Y drops below the target.
    """
    if not 0 < target_yield <= 1:
        raise DomainError(
            'target yield must be in (0, 1], got %r' % target_yield
        )
    if die_area <= 0:
        raise DomainError('die area must be > 0, got %r' % die_area)
    if target_yield == 1:
        return 0.0

    def f(d: float) -> float:
        return yield_by_variant(variant, die_area, d)

    lo, hi = 0.0, 1.0 / die_area
    while f(hi) >= target_yield:
        lo, hi = hi, hi * 2

    mid = (lo + hi) / 2
    for _ in range(config.CALIBRATION_MAX_ITER):
        mid = (lo + hi) / 2
        y = f(mid)
        if abs(y - target_yield) <= tol:
            break
        if y > target_yield:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * math.ulp(hi):
            break
    _log.debug(
        'calibrated D=%r for %s A=%r Y=%r',
        mid,
        variant,
        die_area,
        target_yield,
    )
    return mid


def gross_dies_per_wafer(diameter: float, die_area: float) -> DieCount:
    """Gross die sites on a round wafer.
    ~diameter (float): wafer diameter, mm
    ~die_area (float): die area, mm^2
    -> DieCount: gross_real = pi*(d/2)^2/S - pi*d/sqrt(2*S), floored gross
    """
    if diameter <= 0 or die_area <= 0:
        raise DomainError(
            'diameter and die area must be > 0, got %r, %r'
            % (diameter, die_area)
        )
    whole = math.pi * (diameter / 2) ** 2 / die_area
    edge = math.pi * diameter / math.sqrt(2 * die_area)
    gross_real = whole - edge
    if gross_real <= 0:
        raise GeometryError(
            'die of %g mm2 does not fit on a %g mm wafer'
            % (die_area, diameter)
        )
    return DieCount(gross_real=gross_real, gross=math.floor(gross_real))


def functional_dies(gross_real: float, yield_: float) -> float:
    """Expected functional dies; kept real-valued for amortization."""
    return gross_real * yield_


def die_sites(
    wafer_diameter: float, die_area: float
) -> TYPE.Tuple[np.ndarray, np.ndarray, int]:
    """Square die sites lying wholly inside the wafer.
    ~wafer_diameter (float): mm
    ~die_area (float): mm^2
    -> (ix, iy, n): grid indices of the sites, their lower-left corner at
        (ix*s, iy*s) with s = sqrt(die_area), and the half-width n of the grid
    """
    side = math.sqrt(die_area)
    radius = wafer_diameter / 2
    n = max(1, math.ceil(radius / side))
    idx = np.arange(-n, n)
    ix, iy = np.meshgrid(idx, idx, indexing='ij')
    far_x = np.maximum(np.abs(ix * side), np.abs((ix + 1) * side))
    far_y = np.maximum(np.abs(iy * side), np.abs((iy + 1) * side))
    inside = far_x**2 + far_y**2 <= radius**2
    return ix[inside], iy[inside], n


@logf()
def monte_carlo_yield(
    die_area: float,
    defect_density: float,
    wafer_diameter: float,
    trials: int = config.MC_TRIALS,
    seed: int = 0,
) -> float:
    """Empirical die yield from simulated defect scatter.

    Each trial wafer receives Poisson(D * wafer area) defects placed
    uniformly over the disc; dies are tiled on a square grid and a die is
    good when no defect lands on it. Trials are taken in fixed blocks of
    config.MC_STREAM_TRIALS; block k draws from SeedSequence(seed,
    spawn_key=(k,)), so trial t always sees the same stream and the result
    depends only on (seed, trials).
    ~die_area (float): cm^2
    ~defect_density (float): defects per cm^2
    ~wafer_diameter (float): mm
    -> float: defect-free dies / tiled dies over all trials
    """
    if trials < 1:
        raise DomainError('trials must be >= 1, got %r' % trials)
    if defect_density < 0:
        raise DomainError(
            'defect density must be >= 0, got %r' % defect_density
        )
    area_mm2 = die_area * config.MM2_PER_CM2
    ix, iy, n = die_sites(wafer_diameter, area_mm2)
    n_sites = len(ix)
    if n_sites == 0:
        raise GeometryError(
            'no %g mm2 die fits on a %g mm wafer' % (area_mm2, wafer_diameter)
        )
    side = math.sqrt(area_mm2)
    radius = wafer_diameter / 2
    grid = np.full((2 * n, 2 * n), -1, dtype=np.int64)
    grid[ix + n, iy + n] = np.arange(n_sites)

    lam = defect_density * math.pi * (radius / 10) ** 2
    block = config.MC_STREAM_TRIALS
    good = 0
    for k in range(-(-trials // block)):
        stream = np.random.SeedSequence(seed, spawn_key=(k,))
        rng = np.random.default_rng(stream)
        m = min(block, trials - k * block)
        counts = rng.poisson(lam, m)
        total = int(counts.sum())
        if total == 0:
            good += m * n_sites
            continue
        trial = np.repeat(np.arange(m, dtype=np.int64), counts)
        r = radius * np.sqrt(rng.random(total))
        theta = 2 * math.pi * rng.random(total)
        gx = np.floor(r * np.cos(theta) / side).astype(np.int64) + n
        gy = np.floor(r * np.sin(theta) / side).astype(np.int64) + n
        np.clip(gx, 0, 2 * n - 1, out=gx)
        np.clip(gy, 0, 2 * n - 1, out=gy)
        site = grid[gx, gy]
        hit = site >= 0
        dead = np.unique(trial[hit] * n_sites + site[hit]).size
        good += m * n_sites - dead
    return good / (trials * n_sites)
