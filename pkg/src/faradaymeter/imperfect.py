"""Detection efficiency and phase-error models, with their inversions.

Two imperfections are tracked.  Finite detector efficiency eta_a rescales
the observed coincidence rate by eta_a^3 (three atom readouts) without
touching the quantum probabilities.  A coupled-phase error sigma lets the
wrong parity branch leak through each atom readout with probability
``sin(sigma)^2``, degrading an ideal stage probability p to
``p + (1 - p) * sin(sigma)^2``.  Both effects are invertible as long as the
leak is not total and the efficiency is nonzero, which is what lets a noisy
run still report a calibrated concurrence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import InconsistentObservationError, NonInvertibleError
from .faraday import ideal_phases, perturbed_phases
from .protocol import TwoPhotonState, closed_form_outcome, run_analytic

_SOFT_SIGMA_BOUND = math.pi / 4.0
# Allow observed frequencies to undershoot the model floor by a little
# statistical noise before declaring the observation inconsistent.
_FLUCTUATION_SLACK = 1e-9


@dataclass(frozen=True)
class ImperfectionParams:
    """Detector efficiency and coupled-phase error for one run.

    ``eta_a`` must lie in [0, 1].  Any ``|sigma| < pi/2`` is accepted, but
    the leak model is only a good description for small errors, so values
    at or beyond pi/4 trigger a warning.
    """

    eta_a: float = 1.0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_a <= 1.0:
            raise ValueError(f"detection efficiency must lie in [0, 1], got {self.eta_a!r}")
        if not abs(self.sigma) < math.pi / 2.0:
            raise ValueError(f"phase error must satisfy |sigma| < pi/2, got {self.sigma!r}")
        if abs(self.sigma) >= _SOFT_SIGMA_BOUND:
            warnings.warn(
                f"phase error {self.sigma!r} is outside the small-error regime",
                stacklevel=2,
            )


def detection_scaled_ptotal(p_total: float, eta_a: float) -> float:
    """Observed coincidence probability after three detections at efficiency eta_a."""
    if not 0.0 <= p_total <= 1.0:
        raise ValueError(f"probability {p_total!r} outside [0, 1]")
    if not 0.0 <= eta_a <= 1.0:
        raise ValueError(f"detection efficiency must lie in [0, 1], got {eta_a!r}")
    return eta_a**3 * p_total


def leak_probability(sigma: float) -> float:
    """Chance the wrong parity branch survives one readout: sin(sigma)^2."""
    return math.sin(sigma) ** 2


def degraded_parity_probability(p: float, sigma: float) -> float:
    """Ideal stage probability ``p`` observed under a phase error ``sigma``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    leak = leak_probability(sigma)
    return p + (1.0 - p) * leak


def invert_parity_probability(p_observed: float, sigma: float, *, strict: bool = True) -> float:
    """Undo the leak: recover the ideal ``p`` from an observed value.

    An observation below the model floor ``sin(sigma)^2`` cannot come from
    any ideal probability.  With ``strict=True`` that raises; with
    ``strict=False`` (statistical data) the result is clamped into [0, 1].
    """
    if not 0.0 <= p_observed <= 1.0:
        raise ValueError(f"probability {p_observed!r} outside [0, 1]")
    leak = leak_probability(sigma)
    if leak >= 1.0 - 1e-12:
        raise NonInvertibleError("phase error leaks every trial; nothing to invert")
    if strict and p_observed < leak - _FLUCTUATION_SLACK:
        raise InconsistentObservationError(
            f"observed probability {p_observed!r} is below the leak floor {leak!r}"
        )
    return min(1.0, max(0.0, (p_observed - leak) / (1.0 - leak)))


def recover_concurrence(
    p1_observed: float,
    p2_observed: float,
    params: ImperfectionParams,
    *,
    strict: bool = True,
    stage1_leak_applications: int = 1,
) -> float:
    """Calibrated concurrence from observed stage probabilities.

    Inverts the leak on each stage, divides the three detection factors out
    of the product and maps through ``2 sqrt(p_total)``.  The stage-1
    observation covers two atom readouts; by default the leak correction is
    applied to it once, matching the model that is measurably closer to the
    exact simulation, while ``stage1_leak_applications=2`` treats the two
    readouts as independently degraded.
    """
    if params.eta_a <= 0.0:
        raise NonInvertibleError("zero detection efficiency cannot be divided out")
    if stage1_leak_applications not in (1, 2):
        raise ValueError("stage1_leak_applications must be 1 or 2")
    q1 = p1_observed
    for _ in range(stage1_leak_applications):
        q1 = invert_parity_probability(q1, params.sigma, strict=strict)
    q2 = invert_parity_probability(p2_observed, params.sigma, strict=strict)
    p_total = q1 * q2 / params.eta_a**3
    return min(1.0, 2.0 * math.sqrt(p_total))


def model_observed_probabilities(
    p1: float,
    p2: float,
    sigma: float,
    *,
    stage1_leak_applications: int = 1,
) -> tuple[float, float]:
    """Forward model: ideal stage probabilities as seen under a phase error."""
    if stage1_leak_applications not in (1, 2):
        raise ValueError("stage1_leak_applications must be 1 or 2")
    q1 = p1
    for _ in range(stage1_leak_applications):
        q1 = degraded_parity_probability(q1, sigma)
    return q1, degraded_parity_probability(p2, sigma)


def simulated_observed_probabilities(state: TwoPhotonState, sigma: float) -> tuple[float, float]:
    """Exact stage probabilities from a full run at the perturbed phases."""
    outcome = run_analytic(state, perturbed_phases(sigma))
    return outcome.p1, outcome.p2


def model_deviation(
    state: TwoPhotonState,
    sigma: float,
    *,
    stage1_leak_applications: int = 1,
) -> float:
    """Largest gap between the leak model and the exact perturbed simulation.

    Useful for checking that the model error vanishes quadratically as the
    phase error shrinks, which is what justifies using the inversion on
    measured data.
    """
    ideal = run_analytic(state, ideal_phases())
    m1, m2 = model_observed_probabilities(
        ideal.p1, ideal.p2, sigma, stage1_leak_applications=stage1_leak_applications
    )
    s1, s2 = simulated_observed_probabilities(state, sigma)
    return max(abs(s1 - m1), abs(s2 - m2))


def expected_ptotal_with_imperfections(state: TwoPhotonState, params: ImperfectionParams) -> float:
    """Model prediction for the observed coincidence probability of a run."""
    ideal = closed_form_outcome(state)
    q1, q2 = model_observed_probabilities(ideal.p1, ideal.p2, params.sigma)
    return detection_scaled_ptotal(q1 * q2, params.eta_a)
