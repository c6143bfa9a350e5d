"""Single vacuum-fluctuation kick on the two-atom stuck state.

A kick of angle phi sends atom A to ``sin(phi)|0> + cos(phi)|1>`` and atom B
to ``cos(phi)|0> + sin(phi)|1>``.  Keeping only the energy-conserving
one-excitation components of their product gives

    sin(theta)|1>_A|0>_B + cos(theta)|0>_A|1>_B,   tan(theta) = cot(phi)**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E_GROUND = -0.5    # hartree, 1s
E_EXCITED = -0.125  # hartree, n = 2


@dataclass(frozen=True)
class KickAngle:
    phi: float

    def __post_init__(self):
        if not 0.0 < self.phi < math.pi / 2:
            raise ValueError(f"phi = {self.phi!r} outside (0, pi/2)")


@dataclass(frozen=True)
class TwoAtomJointState:
    amp_10: complex
    amp_01: complex
    E0: float = E_GROUND
    E1: float = E_EXCITED

    def __post_init__(self):
        norm = abs(self.amp_10) ** 2 + abs(self.amp_01) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"joint state not normalized: {norm!r}")

    @property
    def x(self) -> float:
        """Diffusion coordinate: probability that atom A holds the excitation."""
        return abs(self.amp_10) ** 2


def _angle(phi) -> float:
    return phi.phi if isinstance(phi, KickAngle) else KickAngle(float(phi)).phi


def kick_atom_states(phi):
    """(ground, excited) amplitude pairs for atoms A and B after the kick."""
    p = _angle(phi)
    s, c = math.sin(p), math.cos(p)
    return (s, c), (c, s)


def theta_of(phi) -> float:
    return math.atan(1.0 / math.tan(_angle(phi)) ** 2)


def joint_state_after_kick(phi, E0: float = E_GROUND,
                           E1: float = E_EXCITED) -> TwoAtomJointState:
    # (sin, cos) of theta straight from tan(theta) = u; going through theta
    # itself loses digits once theta is near pi/2
    u = 1.0 / math.tan(_angle(phi)) ** 2
    norm = math.hypot(1.0, u)
    return TwoAtomJointState(u / norm, 1.0 / norm, E0, E1)


def product_state(phi) -> np.ndarray:
    """Coefficients of the kicked product state on |00>, |01>, |10>, |11>.

    Labels are ``|a>_A |b>_B`` with index ``2a + b``.
    """
    a, b = kick_atom_states(phi)
    return np.kron(np.asarray(a), np.asarray(b))


def projection_consistency(phi) -> float:
    """Distance between the projected product state and the kicked joint state."""
    full = product_state(phi)
    one_exc = np.array([full[2], full[1]])  # (|1>_A|0>_B, |0>_A|1>_B)
    one_exc = one_exc / np.linalg.norm(one_exc)
    joint = joint_state_after_kick(phi)
    return float(np.linalg.norm(one_exc - np.array([joint.amp_10, joint.amp_01])))


def atom_energy(amps, E0: float = E_GROUND, E1: float = E_EXCITED) -> float:
    g, e = amps
    return abs(g) ** 2 * E0 + abs(e) ** 2 * E1


def total_energy(state: TwoAtomJointState) -> float:
    return (abs(state.amp_10) ** 2 * (state.E1 + state.E0)
            + abs(state.amp_01) ** 2 * (state.E0 + state.E1))


def stuck_state_decomposition() -> np.ndarray:
    """Rebuild the symmetric stuck state from the product-minus-corrections form.

    sqrt(2) * h_A (x) h_B - |00>/sqrt(2) - |11>/sqrt(2) with
    h = (|0> + |1>)/sqrt(2), on the basis |00>, |01>, |10>, |11>.
    """
    h = np.array([1.0, 1.0]) / math.sqrt(2)
    e00 = np.array([1.0, 0.0, 0.0, 0.0])
    e11 = np.array([0.0, 0.0, 0.0, 1.0])
    return math.sqrt(2) * np.kron(h, h) - e00 / math.sqrt(2) - e11 / math.sqrt(2)


def kick_chain(n_kicks: int, rng: np.random.Generator, half_width: float = 0.05,
               x0: float = 0.5):
    """Compose random kicks, returning the kick angles and the x path.

    Each kick multiplies the amplitude ratio amp_10/amp_01 by cot(phi)**2,
    which for the stuck state reproduces ``joint_state_after_kick``.  Angles
    are uniform on ``pi/4 +- half_width``.
    """
    if not 0.0 < half_width < math.pi / 4:
        raise ValueError("half_width must lie in (0, pi/4)")
    if not 0.0 < x0 < 1.0:
        raise ValueError("x0 must lie in (0, 1)")
    phis = math.pi / 4 + rng.uniform(-half_width, half_width, n_kicks)
    log_ratio = 0.5 * math.log(x0 / (1.0 - x0))  # ln tan(theta)
    steps = np.concatenate(([log_ratio], log_ratio + np.cumsum(-2.0 * np.log(np.tan(phis)))))
    # x = sin^2(theta) = tan^2 / (1 + tan^2) = logistic(2 ln tan)
    x = 1.0 / (1.0 + np.exp(-2.0 * steps))
    return phis, x
