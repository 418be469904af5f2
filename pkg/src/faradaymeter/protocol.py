"""Two-copy parity-check protocol mapping concurrence onto a success probability.

Two identical photon pairs (a1, b1) and (a2, b2) are prepared; the a photons
interact with one cavity atom, the b photons with another, and each atom is
read out in the |+/-> basis.  Post-selecting both atoms on |+> keeps exactly
the odd-parity part of the joint state (stage 1).  A quarter-wave-plate
rotation on the a photons followed by a third parity check and |+> readout
(stage 2) succeeds with conditional probability p2, and the product
``p_total = p1 * p2`` equals one quarter of the squared concurrence of the
input pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .faraday import FaradayPhases, interaction_table
from .qstate import (
    ATOM_LABELS,
    EMPTY_BRANCH_CUTOFF,
    FULL_REGISTER,
    StateVector,
    apply_diagonal_phase,
    apply_single_qubit,
    empty_branch,
    project_qubit,
    qubit_state,
    reorder,
    tensor_product,
)

_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Atom readout basis.
ATOM_PLUS = np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex)
ATOM_MINUS = np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex)

# Quarter-wave plate: R -> (R + L)/sqrt2, L -> (R - L)/sqrt2.
QWP_HADAMARD = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex)

_NORM_TOL = 1e-10
# Forgive only rounding-level excess when converting p_total to a concurrence.
_ROUNDING_SLACK = 1e-9


@dataclass(frozen=True)
class TwoPhotonState:
    """Pure polarization state alpha|RR> + beta|RL> + gamma_c|LR> + delta|LL>.

    The first slot is the a photon, the second the b photon.  The third
    amplitude is called ``gamma_c`` so it cannot be confused with the atomic
    decay rate gamma used elsewhere in the package.  Must be normalized to
    within 1e-10; use :meth:`normalized` to build one from raw amplitudes.
    """

    alpha: complex
    beta: complex
    gamma_c: complex
    delta: complex

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma_c", "delta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        nrm = math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes()))
        if abs(nrm - 1.0) > _NORM_TOL:
            raise ValueError(f"two-photon amplitudes have norm {nrm!r}, expected 1")

    @classmethod
    def normalized(cls, alpha, beta, gamma_c, delta) -> "TwoPhotonState":
        amps = np.array([alpha, beta, gamma_c, delta], dtype=complex)
        nrm = float(np.linalg.norm(amps))
        if nrm < EMPTY_BRANCH_CUTOFF:
            raise ValueError("cannot normalize a zero amplitude vector")
        return cls(*(amps / nrm))

    def amplitudes(self) -> tuple[complex, complex, complex, complex]:
        """Amplitudes in |RR>, |RL>, |LR>, |LL> order."""
        return (self.alpha, self.beta, self.gamma_c, self.delta)


@dataclass(frozen=True)
class ProtocolOutcome:
    """Stage probabilities and the resulting concurrence estimate.

    ``p_total`` is always the exact product ``p1 * p2`` and ``c_estimate``
    is ``2 * sqrt(p_total)``.  ``final_state`` is the post-selected
    seven-qubit state, flagged empty when the run cannot succeed.
    """

    p1: float
    p2: float
    p_total: float
    c_estimate: float
    final_state: StateVector


def _pair_state(state: TwoPhotonState, a_label: str, b_label: str) -> StateVector:
    # Register (a, b) with a as the low bit: index = a_bit + 2 * b_bit.
    amps = np.array([state.alpha, state.gamma_c, state.beta, state.delta], dtype=complex)
    return StateVector(amps, (a_label, b_label))


def prepare_joint(state: TwoPhotonState) -> StateVector:
    """Two copies of the pair plus three atoms in |+>, in register order."""
    joint = tensor_product(_pair_state(state, "a1", "b1"), _pair_state(state, "a2", "b2"))
    for atom in ATOM_LABELS:
        joint = tensor_product(joint, qubit_state(atom, _SQRT_HALF, _SQRT_HALF))
    return reorder(joint, FULL_REGISTER)


def parity_check(
    state: StateVector,
    photon_pair: tuple[str, str],
    atom: str,
    phases: FaradayPhases,
) -> StateVector:
    """Reflect two photons off the same cavity, one after the other."""
    table = interaction_table(phases)
    first, second = photon_pair
    state = apply_diagonal_phase(state, (first, atom), table)
    return apply_diagonal_phase(state, (second, atom), table)


def _concurrence_estimate(p_total: float) -> float:
    c = 2.0 * math.sqrt(p_total)
    if 1.0 < c <= 1.0 + _ROUNDING_SLACK:
        return 1.0
    return c


def _failed(p1: float, labels) -> ProtocolOutcome:
    return ProtocolOutcome(p1, 0.0, 0.0, 0.0, empty_branch(labels))


def run_analytic(state: TwoPhotonState, phases: FaradayPhases) -> ProtocolOutcome:
    """Run the full protocol by exact state evolution and projection.

    Stage 1 post-selects atoms 1 and 2 on |+>; stage 2 rotates the a
    photons, runs the third parity check and post-selects atom 3.  When the
    stage-1 weight falls below the empty-branch cutoff the later stages are
    undefined and reported as zero.
    """
    joint = prepare_joint(state)
    joint = parity_check(joint, ("a1", "a2"), "atom1", phases)
    joint = parity_check(joint, ("b1", "b2"), "atom2", phases)
    q1, joint = project_qubit(joint, "atom1", ATOM_PLUS)
    if joint.empty:
        return _failed(0.0, FULL_REGISTER)
    q2, joint = project_qubit(joint, "atom2", ATOM_PLUS)
    p1 = q1 * q2
    if joint.empty or p1 < EMPTY_BRANCH_CUTOFF:
        return _failed(p1 if not joint.empty else 0.0, FULL_REGISTER)
    joint = apply_single_qubit(joint, "a1", QWP_HADAMARD)
    joint = apply_single_qubit(joint, "a2", QWP_HADAMARD)
    joint = parity_check(joint, ("a1", "a2"), "atom3", phases)
    p2, joint = project_qubit(joint, "atom3", ATOM_PLUS)
    if joint.empty:
        return _failed(p1, FULL_REGISTER)
    p_total = p1 * p2
    return ProtocolOutcome(p1, p2, p_total, _concurrence_estimate(p_total), joint)


def target_final_state() -> StateVector:
    """Post-selected state at the ideal operating point.

    The photons end in a product of antisymmetric pairs,
    (|LR> - |RL>)_a1a2 (|RL> - |LR>)_b1b2 / 2, and every atom returns
    to |+>.
    """
    a_amps = np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0], dtype=complex)
    b_amps = np.array([0.0, -_SQRT_HALF, _SQRT_HALF, 0.0], dtype=complex)
    out = tensor_product(
        StateVector(a_amps, ("a1", "a2")), StateVector(b_amps, ("b1", "b2"))
    )
    for atom in ATOM_LABELS:
        out = tensor_product(out, qubit_state(atom, _SQRT_HALF, _SQRT_HALF))
    return out


def closed_form_outcome(state: TwoPhotonState) -> ProtocolOutcome:
    """Stage probabilities from the closed-form expressions.

    ``p1 = 2|alpha delta|^2 + 2|beta gamma_c|^2`` is the odd-parity weight,
    ``p2 = |alpha delta - beta gamma_c|^2 / (2 (|alpha delta|^2 + |beta gamma_c|^2))``
    the conditional stage-2 success, so the product collapses to
    ``|alpha delta - beta gamma_c|^2``, one quarter of the squared
    concurrence.
    """
    ad = state.alpha * state.delta
    bg = state.beta * state.gamma_c
    odd_weight = abs(ad) ** 2 + abs(bg) ** 2
    p1 = 2.0 * odd_weight
    if p1 < EMPTY_BRANCH_CUTOFF:
        return _failed(p1, FULL_REGISTER)
    p2 = abs(ad - bg) ** 2 / (2.0 * odd_weight)
    p_total = p1 * p2
    if p_total < EMPTY_BRANCH_CUTOFF:
        return _failed(p1, FULL_REGISTER)
    return ProtocolOutcome(p1, p2, p_total, _concurrence_estimate(p_total), target_final_state())


def concurrence_from_ptotal(p_total: float) -> float:
    """Map a success probability back to a concurrence, clamped to [0, 1]."""
    if not 0.0 <= p_total <= 0.25 + _ROUNDING_SLACK:
        raise ValueError(f"success probability {p_total!r} outside [0, 1/4]")
    return min(1.0, 2.0 * math.sqrt(p_total))
