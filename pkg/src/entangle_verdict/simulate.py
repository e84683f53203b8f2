"""Synthetic coincidence data and random state families with known ground truth."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import Xoshiro256, derive_seed
from .states import DensityMatrix, XStateParams, validate_density
from .tomography import (
    CoincidenceRecord,
    MeasurementSetting,
    predicted_probability,
    standard_settings_16,
)

MAX_ATTEMPTS = 10_000


class Regime(enum.Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    BOUNDARY = "boundary"
    ANY = "any"


@dataclass(frozen=True, eq=False)
class SimulationPlan:
    state: DensityMatrix
    settings: tuple[MeasurementSetting, ...] = field(
        default_factory=lambda: tuple(standard_settings_16())
    )
    counts_per_setting: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.counts_per_setting < 1:
            raise ValueError("counts_per_setting must be at least 1")
        object.__setattr__(self, "settings", tuple(self.settings))


def ideal_counts(plan: SimulationPlan, rounded: bool = True) -> list[CoincidenceRecord]:
    """Expected counts ``N * p_k``; rounded half-up unless ``rounded`` is false."""
    records = []
    for s in plan.settings:
        mean = plan.counts_per_setting * predicted_probability(plan.state, s)
        count = math.floor(mean + 0.5) if rounded else mean
        records.append(CoincidenceRecord(s, count))
    return records


def sample_counts(plan: SimulationPlan) -> list[CoincidenceRecord]:
    """Independent Poisson counts, setting ``k`` drawn from stream ``derive_seed(seed, k)``."""
    records = []
    for k, s in enumerate(plan.settings):
        mean = plan.counts_per_setting * predicted_probability(plan.state, s)
        gen = Xoshiro256(derive_seed(plan.seed, k))
        records.append(CoincidenceRecord(s, gen.poisson(mean)))
    return records


def _simplex4(gen: Xoshiro256) -> tuple[float, float, float, float]:
    cuts = sorted(gen.random() for _ in range(3))
    edges = [0.0, *cuts, 1.0]
    return tuple(edges[i + 1] - edges[i] for i in range(4))


def _symmetric_diag(gen: Xoshiro256) -> tuple[float, float, float, float]:
    alpha = 0.5 * gen.random()
    beta = 0.5 - alpha
    return alpha, beta, beta, alpha


def random_x_state(
    seed: int, regime: Regime = Regime.ANY, symmetric: bool = False
) -> XStateParams:
    """Draw X-form parameters.

    Populations are uniform on the simplex (or, with ``symmetric``,
    ``alpha = alpha'`` uniform on [0, 1/2] and ``beta = beta' = 1/2 - alpha``).
    ``gamma`` is then uniform on the regime's interval:

    * SEPARABLE: [0, min(sqrt(beta beta'), sqrt(alpha alpha'))]
    * ENTANGLED: (sqrt(beta beta'), sqrt(alpha alpha')], redrawing
      populations while that interval is empty
    * BOUNDARY: exactly sqrt(beta beta'), redrawing while that exceeds
      sqrt(alpha alpha')
    * ANY: [0, sqrt(alpha alpha')]
    """
    regime = Regime(regime)
    gen = Xoshiro256(seed)
    draw = _symmetric_diag if symmetric else _simplex4
    for _ in range(MAX_ATTEMPTS):
        alpha, beta, beta_prime, alpha_prime = draw(gen)
        lo = math.sqrt(beta * beta_prime)
        hi = math.sqrt(alpha * alpha_prime)
        if regime is Regime.SEPARABLE:
            gamma = min(lo, hi) * gen.random()
        elif regime is Regime.ANY:
            gamma = hi * gen.random()
        elif regime is Regime.ENTANGLED:
            if hi <= lo:
                continue
            gamma = hi - (hi - lo) * gen.random()
            if gamma <= lo:
                continue
        else:
            if lo > hi:
                continue
            gamma = lo
        return XStateParams(alpha, beta, beta_prime, gamma, alpha_prime)
    if regime is Regime.ENTANGLED:
        return XStateParams(0.5, 0.0, 0.0, 0.5, 0.5)
    return XStateParams(0.25, 0.25, 0.25, 0.25, 0.25)


def random_density_matrix(seed: int) -> DensityMatrix:
    """``G G^dagger / tr(G G^dagger)`` with G a 4x4 standard complex Gaussian matrix."""
    gen = Xoshiro256(seed)
    s = math.sqrt(0.5)
    g = np.array(
        [[complex(s * gen.normal(), s * gen.normal()) for _ in range(4)] for _ in range(4)]
    )
    m = g @ g.conj().T
    return validate_density(m / np.trace(m).real)
