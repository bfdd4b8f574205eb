"""Tunable-coupler arithmetic and Z-line crosstalk compensation.

The effective qubit-qubit coupling through a tunable coupler is the direct
term plus a superexchange term J_l J_r / Delta, where 1/Delta averages the
inverse detunings of the coupler from its two qubits. Solving the inverse
problem (coupler frequency for a target coupling) is a bracketed root find
on the branch above both qubit frequencies, where the coupling is strictly
increasing in the coupler frequency.

The shipped default constants are synthetic: chosen so the achievable
coupling range over the default bracket matches the documented tunable
range of the reference device (about -30 to +4.8 MHz), not measured values.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi

# Synthetic reference constants (rad/ns); see module docstring.
DEFAULT_OMEGA_Q = TWO_PI * 4.36  # 4.36 GHz
DEFAULT_J_QC = TWO_PI * 0.0933  # 93.3 MHz qubit-coupler coupling
DEFAULT_J_DIRECT = TWO_PI * 0.0135  # 13.5 MHz direct coupling
DEFAULT_BRACKET = (TWO_PI * 4.56, TWO_PI * 5.36)


@dataclass(frozen=True)
class CouplerSpec:
    """One coupler between two qubits, all frequencies in rad/ns."""

    J_direct_qq: float
    J_qc_left: float
    J_qc_right: float
    omega_q_left: float
    omega_q_right: float
    omega_c: float

    def __post_init__(self):
        if self.omega_c in (self.omega_q_left, self.omega_q_right):
            raise ValueError("coupler frequency coincides with a qubit")

    @classmethod
    def default(cls, omega_c):
        return cls(J_direct_qq=DEFAULT_J_DIRECT, J_qc_left=DEFAULT_J_QC,
                   J_qc_right=DEFAULT_J_QC, omega_q_left=DEFAULT_OMEGA_Q,
                   omega_q_right=DEFAULT_OMEGA_Q, omega_c=omega_c)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            payload = json.load(fh)
        return cls(**payload)


def effective_coupling(spec):
    """J = J_direct + J_l J_r / Delta with the averaged inverse detuning."""
    dl = spec.omega_q_left - spec.omega_c
    dr = spec.omega_q_right - spec.omega_c
    if dl == 0 or dr == 0:
        raise ValueError("zero coupler-qubit detuning")
    inv_delta = 0.5 * (1.0 / dl + 1.0 / dr)
    return spec.J_direct_qq + spec.J_qc_left * spec.J_qc_right * inv_delta


def coupling_range(spec_fields, bracket):
    """Achievable (J_min, J_max) over a coupler-frequency bracket."""
    a, b = bracket
    Ja = effective_coupling(_with_omega(spec_fields, a))
    Jb = effective_coupling(_with_omega(spec_fields, b))
    return (min(Ja, Jb), max(Ja, Jb))


def _with_omega(fields, omega_c):
    if isinstance(fields, CouplerSpec):
        fields = dict(J_direct_qq=fields.J_direct_qq,
                      J_qc_left=fields.J_qc_left,
                      J_qc_right=fields.J_qc_right,
                      omega_q_left=fields.omega_q_left,
                      omega_q_right=fields.omega_q_right)
    return CouplerSpec(omega_c=omega_c, **fields)


def solve_coupler_frequency(target_J, spec_fields, bracket=DEFAULT_BRACKET,
                            tol=1e-6):
    """Coupler frequency realizing `target_J` inside `bracket` (rad/ns).

    Raises with the achievable interval if the target lies outside it.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError(f"invalid bracket {bracket}")
    fa = effective_coupling(_with_omega(spec_fields, a)) - target_J
    fb = effective_coupling(_with_omega(spec_fields, b)) - target_J
    if fa * fb > 0:
        lo, hi = coupling_range(spec_fields, (a, b))
        raise ValueError(
            f"target coupling {target_J:.6g} rad/ns not achievable; "
            f"bracket admits [{lo:.6g}, {hi:.6g}]")
    root = brentq(
        lambda w: effective_coupling(_with_omega(spec_fields, w)) - target_J,
        a, b, xtol=tol)
    return float(root)


def compensate_crosstalk(intended, X, cond_limit=1e6):
    """Z-pulse amplitudes to apply so the realized amplitudes are `intended`.

    X maps applied to realized (diagonal 1); returns X^-1 @ intended.
    """
    X = np.asarray(X, dtype=float)
    v = np.asarray(intended, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"crosstalk matrix must be square, got {X.shape}")
    if v.shape != (X.shape[0],):
        raise ValueError(
            f"amplitude vector length {v.shape} does not match {X.shape}")
    if not np.allclose(np.diag(X), 1.0, atol=1e-9):
        raise ValueError("crosstalk matrix must have unit diagonal")
    cond = np.linalg.cond(X)
    if cond > cond_limit:
        raise ValueError(f"crosstalk matrix condition number {cond:.3g} "
                         f"exceeds {cond_limit:.3g}")
    applied = np.linalg.solve(X, v)
    resid = np.abs(X @ applied - v).max()
    if resid > 1e-10:
        raise RuntimeError(f"compensation residual {resid:.2e}")
    return applied


def load_crosstalk(path):
    """Read a crosstalk matrix from a JSON file holding a nested list."""
    with open(path) as fh:
        X = np.asarray(json.load(fh), dtype=float)
    return X
