"""Physical parameters shared by all dynamics.

Units: the one-photon dissipation rate ``gamma`` sets the time unit, so
detuning and pump amplitude are quoted in units of gamma and times in units
of 1/gamma.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class KpoParams:
    """Parameters of one Kerr parametric oscillator (shared by the network).

    delta : frequency detuning between oscillator resonance and half the
        pump frequency (the state-selection knob, may be negative)
    g     : two-photon pump amplitude, >= 0
    u     : Kerr nonlinearity, >= 0
    gamma : one-photon dissipation rate, > 0
    """

    delta: float = 0.0
    g: float = 0.0
    u: float = 0.01
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.u < 0:
            raise ValueError(f"u must be >= 0, got {self.u}")

    def with_drive(self, delta=None, g=None):
        """Copy with detuning and/or pump replaced (sweep helper)."""
        kw = {}
        if delta is not None:
            kw["delta"] = float(delta)
        if g is not None:
            kw["g"] = float(g)
        return replace(self, **kw)
