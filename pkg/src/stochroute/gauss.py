"""Closed-form moments of censored Gaussian quantities.

Everything downstream (route evaluation, chance checks) reduces to three
primitives on a normal variable A and a constant bound:

* ``expected_earliness`` -- E[(h - A)^+], the early-arrival slack,
* ``expected_delay``     -- E[(A - h)^+], the late-arrival penalty,
* ``waiting_moments``    -- mean and variance of W = max(0, e - A).

All three handle the degenerate (zero-variance) case explicitly, which a
purely formula-driven implementation would turn into 0/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

#: Variances below this are treated as exactly deterministic.
DEGENERATE_VAR = 1e-18


class NumericalInstabilityError(ArithmeticError):
    """A censored-moment formula produced a materially negative variance."""


@dataclass(frozen=True)
class NormalVar:
    """A Gaussian quantity, ``N(mu, var)``; ``var == 0`` means a constant."""

    mu: float
    var: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise ValueError(f"non-finite mean {self.mu!r}")
        if not (self.var >= 0.0) or not math.isfinite(self.var):
            raise ValueError(f"variance must be finite and >= 0, got {self.var!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var)

    @property
    def degenerate(self) -> bool:
        return self.var < DEGENERATE_VAR

    def plus(self, other: "NormalVar") -> "NormalVar":
        """Sum of independent normals (means and variances add)."""
        return NormalVar(self.mu + other.mu, self.var + other.var)


def std_pdf(z: float) -> float:
    """Standard normal density."""
    return math.exp(-0.5 * z * z) * _INV_SQRT_2PI


def std_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / _SQRT2)


def expected_earliness(a: NormalVar, h: float) -> float:
    """E[(h - A)^+] for A ~ N(a.mu, a.var).

    Equals h*Phi((h-mu)/s) + mu*Phi((mu-h)/s) + s*phi((h-mu)/s) - mu in the
    textbook long form; computed here in the cancellation-free grouping
    (h-mu)*Phi(z) + s*phi(z).
    """
    if a.degenerate:
        return max(0.0, h - a.mu)
    s = a.sigma
    z = (h - a.mu) / s
    return max(0.0, (h - a.mu) * std_cdf(z) + s * std_pdf(z))


def expected_delay(a: NormalVar, h: float) -> float:
    """E[(A - h)^+] for A ~ N(a.mu, a.var).

    Satisfies expected_delay(a, h) - expected_earliness(a, h) == a.mu - h.
    """
    if a.degenerate:
        return max(0.0, a.mu - h)
    s = a.sigma
    z = (a.mu - h) / s
    return max(0.0, (a.mu - h) * std_cdf(z) + s * std_pdf(z))


def wait_mean_var(mu: float, var: float, e: float) -> tuple[float, float]:
    """(mean, variance) of W = max(0, e - A) for A ~ N(mu, var), as floats.

    With m = e - mu and s = sqrt(var) this is the max-of-normal-and-constant
    reduction: E[W] = m*Phi(m/s) + s*phi(m/s) and
    E[W^2] = (m^2 + s^2)*Phi(m/s) + m*s*phi(m/s).
    """
    if var < DEGENERATE_VAR:
        return max(0.0, e - mu), 0.0
    s = math.sqrt(var)
    m = e - mu
    z = m / s
    cdf = std_cdf(z)
    cdfc = std_cdf(-z)
    pdf = std_pdf(z)
    mean = m * cdf + s * pdf
    # E[W^2] - E[W]^2 regrouped so no m^2-scale terms cancel:
    # m^2*Phi*Phic + s^2*(Phi - phi^2) + m*s*phi*(1 - 2*Phi)
    wvar = m * m * cdf * cdfc + s * s * (cdf - pdf * pdf) + m * s * pdf * (1.0 - 2.0 * cdf)
    if wvar < 0.0:
        # roundoff can undershoot zero by hair widths only; anything
        # materially negative means the formula was misapplied
        if wvar < -1e-9:
            raise NumericalInstabilityError(
                f"waiting variance {wvar!r} for bound {e!r} against N({mu!r}, {var!r})"
            )
        wvar = 0.0
    return max(0.0, mean), wvar


def waiting_moments(a: NormalVar, e: float) -> NormalVar:
    """Mean and variance of the wait W = max(0, e - A), as a NormalVar."""
    mean, var = wait_mean_var(a.mu, a.var, e)
    return NormalVar(mean, var)
