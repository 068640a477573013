"""Piecewise-constant voltage programs."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Waveform:
    """Ordered ``(voltage, duration)`` segments with ideal rectangular edges.

    Segment boundaries are left-closed, right-open: at a breakpoint the
    voltage is that of the following segment.  Beyond the end it is zero.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(u), float(d)) for u, d in self.segments)
        if not segs:
            raise ValueError("waveform needs at least one segment")
        for u, d in segs:
            if d < 0:
                raise ValueError(f"segment duration must be >= 0, got {d!r}")
        if sum(d for _, d in segs) <= 0:
            raise ValueError("waveform total duration must be positive")
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self):
        return sum(d for _, d in self.segments)

    def voltage_at(self, t):
        return voltage_at(self, t)

    def scale(self, factor):
        """Every segment voltage multiplied by ``factor``."""
        return Waveform(tuple((u * factor, d) for u, d in self.segments))

    def half_select(self):
        return self.scale(0.5)

    def merged(self):
        """Equivalent waveform with adjacent equal-voltage segments fused."""
        out = []
        for u, d in self.segments:
            if d == 0:
                continue
            if out and out[-1][0] == u:
                out[-1] = (u, out[-1][1] + d)
            else:
                out.append((u, d))
        return Waveform(tuple(out))

    def square_integral(self):
        """Integral of U(t)^2 dt in V^2 s."""
        return sum(u * u * d for u, d in self.segments)

    def to_list(self):
        return [[u, d] for u, d in self.segments]

    @classmethod
    def from_list(cls, pairs):
        return cls(tuple((u, d) for u, d in pairs))


def vcma_pulse(u, width):
    """Single rectangular pulse of amplitude ``u`` (V) and ``width`` (s)."""
    if not width > 0:
        raise ValueError(f"pulse width must be positive, got {width!r}")
    return Waveform(((u, width),))


def combined_pulse(u_vcma, w_vcma, u_stt, w_stt):
    """VCMA pulse immediately followed by an STT pulse."""
    if not (w_vcma > 0 and w_stt > 0):
        raise ValueError("pulse widths must be positive")
    return Waveform(((u_vcma, w_vcma), (u_stt, w_stt)))


def voltage_at(waveform, t):
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t!r}")
    start = 0.0
    for u, d in waveform.segments:
        if start <= t < start + d:
            return u
        start += d
    return 0.0
