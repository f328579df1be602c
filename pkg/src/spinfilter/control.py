"""Feedback laws evaluated on the estimated state.

Only the estimate is ever passed to a controller — the signature enforces
that the law cannot peek at the actual state.  All laws are C^1 on the state
space for beta >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SpinOperators

CONTROLLER_KINDS = ("off", "constant", "population", "expectation")


@dataclass(frozen=True)
class Controller:
    """Feedback law selector.

    kind
        ``off`` — u = 0;
        ``constant`` — u = c;
        ``population`` — u = alpha (1 - Tr(rho_hat rho_nbar))^beta;
        ``expectation`` — u = alpha (J - nbar - Tr(J_z rho_hat))^beta.
    """

    kind: str = "off"
    c: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    nbar: int = 0

    def __post_init__(self):
        if self.kind not in CONTROLLER_KINDS:
            raise ValueError(
                f"unknown controller kind {self.kind!r}; expected one of {CONTROLLER_KINDS}"
            )
        if self.kind in ("population", "expectation"):
            if not self.alpha > 0:
                raise ValueError(f"alpha must be > 0, got {self.alpha}")
            if not self.beta >= 1:
                raise ValueError(f"beta must be >= 1, got {self.beta}")
            if self.nbar < 0:
                raise ValueError(f"nbar must be a basis index >= 0, got {self.nbar}")

    @property
    def target(self) -> int:
        """Target basis index; 0 for laws without one (used for metrics)."""
        return self.nbar if self.kind in ("population", "expectation") else 0


def signed_power(base: float, beta: float) -> float:
    """base**beta extended oddly to negative bases for non-integer beta.

    Integer exponents use the plain power (so (-0.7)**2 = 0.49); otherwise
    sign(base) |base|^beta keeps the law real-valued and C^1 for beta >= 1.
    """
    if float(beta).is_integer():
        return float(base) ** int(beta)
    return float(np.sign(base)) * abs(float(base)) ** float(beta)


def evaluate(ctrl: Controller, rho_hat: np.ndarray, ops: SpinOperators) -> float:
    """Control value u(rho_hat).

    The population law reads the single diagonal entry Tr(rho_hat rho_nbar);
    the expectation law reads Tr(J_z rho_hat) with the angular-momentum J_z
    in either convention.
    """
    if ctrl.kind == "off":
        return 0.0
    if ctrl.kind == "constant":
        return float(ctrl.c)
    if ctrl.nbar >= ops.dim:
        raise IndexError(f"nbar={ctrl.nbar} outside 0..{ops.dim - 1}")
    diag = np.real(np.diag(rho_hat))
    if ctrl.kind == "population":
        return ctrl.alpha * signed_power(1.0 - float(diag[ctrl.nbar]), ctrl.beta)
    # expectation law
    jz_diag = np.real(np.diag(ops.jz))
    base = ops.j - ctrl.nbar - float(np.sum(jz_diag * diag))
    return ctrl.alpha * signed_power(base, ctrl.beta)
