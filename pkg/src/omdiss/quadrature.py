from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class QuadratureSettings:
    """Controls for the frequency integrals.

    ``window`` is the half-width of the finite core interval in units of
    ``omega_m``; everything outside it is integrated as a tail. The core is
    evaluated a second time with a doubled window and the two results must
    agree to ``check_rtol``.
    """

    window: float = 50.0
    limit: int = 2000
    epsabs: float = 1e-12
    epsrel: float = 1e-10
    check_rtol: float = 1e-6

    def __post_init__(self):
        if self.window <= 1.0:
            raise ValueError("window must exceed one mechanical frequency")
        if self.limit < 50:
            raise ValueError("limit too small")
