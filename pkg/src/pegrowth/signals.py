"""Piecewise-constant persistently exciting signals.

A signal is a right-continuous step function alpha with values in [0, 1].
``SignalClass(T, mu)`` describes the excitation constraint: the integral of
alpha over every window of length T must be at least mu.  Periodic signals
carry an explicit period and are the workhorses of the growth-rate search;
aperiodic signals extend their end values and are only used over finite
horizons.

Segment durations are stored alongside breakpoints: reversal and the
worst-window search operate on durations, which keeps time reversal an exact
involution at the floating-point level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SignalClass",
    "PESignal",
    "PEValidation",
    "SpliceError",
    "validate_pe",
    "reverse",
    "splice_periodic",
    "periodize",
]

# Absolute slack on the window-integral constraint; boundary constructions
# such as the constant mu/T sit exactly on it.
EP_TOL = 1e-12


@dataclass(frozen=True)
class SignalClass:
    """Excitation parameters: window length T and window energy mu, 0 < mu <= T."""

    T: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.mu <= self.T) or not np.isfinite(self.T):
            raise ValueError(f"need 0 < mu <= T, got T={self.T}, mu={self.mu}")

    @property
    def floor(self) -> float:
        """Smallest admissible constant value, mu/T."""
        return self.mu / self.T


class SpliceError(RuntimeError):
    """A constructed signal failed its excitation check (bad prefix)."""


@dataclass(frozen=True)
class PESignal:
    """Piecewise-constant signal.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``; the last
    segment runs to ``period`` for periodic signals and extends forever for
    aperiodic ones.  Periodic signals must start at breakpoint 0.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    period: float | None = None
    durations: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        bk = np.asarray(self.breakpoints, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=float).ravel()
        if bk.size == 0 or bk.size != vals.size:
            raise ValueError("need one value per breakpoint, at least one segment")
        if not np.all(np.isfinite(bk)) or not np.all(np.isfinite(vals)):
            raise ValueError("non-finite signal data")
        if np.any(np.diff(bk) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValueError("signal values must lie in [0, 1]")
        durs = self.durations
        if self.period is not None:
            per = float(self.period)
            if not (per > 0.0 and np.isfinite(per)):
                raise ValueError("period must be positive and finite")
            if bk[0] != 0.0:
                raise ValueError("periodic signals must start at breakpoint 0")
            if bk[-1] >= per:
                raise ValueError("last breakpoint must precede the period")
            if durs is None:
                durs = np.concatenate([np.diff(bk), [per - bk[-1]]])
        else:
            durs = np.diff(bk)
        durs = np.asarray(durs, dtype=float).ravel()
        object.__setattr__(self, "breakpoints", _freeze(bk))
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "durations", _freeze(durs))
        if self.period is not None:
            object.__setattr__(self, "period", float(self.period))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_segments(cls, segments, period: float | None = None) -> "PESignal":
        """Build from (value, duration) pairs, merging equal neighbours and
        dropping zero-length segments."""
        vals: list[float] = []
        durs: list[float] = []
        for v, dur in segments:
            if dur < 0:
                raise ValueError("segment durations must be nonnegative")
            if dur == 0.0:
                continue
            if vals and vals[-1] == v:
                durs[-1] = durs[-1] + dur
            else:
                vals.append(float(v))
                durs.append(float(dur))
        if not vals:
            raise ValueError("signal needs at least one segment of positive length")
        bk = np.concatenate([[0.0], np.cumsum(durs)[:-1]])
        if period is None:
            return cls(bk, vals, None)
        return cls(bk, np.asarray(vals), period, durations=np.asarray(durs))

    @classmethod
    def constant(cls, value: float, period: float | None = None) -> "PESignal":
        return cls(np.array([0.0]), np.array([value]), period)

    # -- basic queries -----------------------------------------------------

    @property
    def n_segments(self) -> int:
        return int(self.values.size)

    def value_at(self, t):
        """Signal value at time(s) t (periodic wrap or constant extension)."""
        tt = np.asarray(t, dtype=float)
        if self.period is not None:
            r = np.mod(tt, self.period)
            idx = np.searchsorted(self.breakpoints, r, side="right") - 1
        else:
            idx = np.searchsorted(self.breakpoints, tt, side="right") - 1
            idx = np.clip(idx, 0, self.n_segments - 1)
        out = self.values[idx]
        return float(out) if np.isscalar(t) else out

    def _cum_at_breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.values * self.durations)])

    def integrate(self, t0: float, t1: float) -> float:
        """Exact integral of the signal over [t0, t1]."""
        if t1 < t0:
            raise ValueError("need t1 >= t0")
        if self.period is not None:
            per = self.period
            cum = self._cum_at_breakpoints()
            total = cum[-1]

            def F(x):
                k = np.floor(x / per)
                r = x - k * per
                if r >= per:  # floating wrap guard
                    k, r = k + 1, r - per
                i = int(np.searchsorted(self.breakpoints, r, side="right")) - 1
                return k * total + cum[i] + self.values[i] * (r - self.breakpoints[i])

            return float(F(t1) - F(t0))
        bk, vals = self.breakpoints, self.values
        cum = np.concatenate([[0.0], np.cumsum(vals[:-1] * np.diff(bk))])

        def G(x):
            if x <= bk[0]:
                return vals[0] * (x - bk[0])
            i = min(int(np.searchsorted(bk, x, side="right")) - 1, bk.size - 1)
            return cum[i] + vals[i] * (x - bk[i])

        return float(G(t1) - G(t0))

    def segments(self, t0: float, t1: float):
        """(value, duration) pairs covering [t0, t1], in time order."""
        if t1 < t0:
            raise ValueError("need t1 >= t0")
        if t1 == t0:
            return []
        events = [t0]
        if self.period is not None:
            per = self.period
            k0 = int(np.floor(t0 / per))
            k1 = int(np.floor(t1 / per)) + 1
            for k in range(k0, k1 + 1):
                for b in self.breakpoints:
                    e = b + k * per
                    if t0 < e < t1:
                        events.append(float(e))
        else:
            for b in self.breakpoints:
                if t0 < b < t1:
                    events.append(float(b))
        events = sorted(set(events))
        events.append(t1)
        out = []
        for a, b in zip(events[:-1], events[1:]):
            out.append((self.value_at(0.5 * (a + b)), b - a))
        return out

    def period_segments(self):
        """(value, duration) pairs for exactly one period, no rounding."""
        if self.period is None:
            raise ValueError("signal is not periodic")
        return list(zip(self.values.tolist(), self.durations.tolist()))

    def shift(self, t0: float) -> "PESignal":
        """The shifted signal t -> alpha(t0 + t) (periodic only)."""
        if self.period is None:
            raise ValueError("shift is defined for periodic signals")
        per = self.period
        events = sorted({float(np.mod(b - t0, per)) for b in self.breakpoints} | {0.0})
        events = [e for e in events if e < per]
        vals = [self.value_at(t0 + e) for e in events]
        segs = [(v, (events[i + 1] if i + 1 < len(events) else per) - events[i])
                for i, v in enumerate(vals)]
        return PESignal.from_segments(segs, period=per)

    def encoding_key(self) -> bytes:
        """Deterministic byte encoding (values, durations, period)."""
        per = -1.0 if self.period is None else self.period
        return (np.ascontiguousarray(self.values).tobytes()
                + np.ascontiguousarray(self.durations).tobytes()
                + struct.pack("<d", per))

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [float(v) for v in self.values],
            "period": None if self.period is None else float(self.period),
        }

    @classmethod
    def from_json(cls, obj) -> "PESignal":
        try:
            return cls(np.asarray(obj["breakpoints"], dtype=float),
                       np.asarray(obj["values"], dtype=float),
                       obj.get("period"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed signal object: {obj!r}") from exc


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PEValidation:
    valid: bool
    worst_window_start: float
    worst_integral: float


def validate_pe(s: PESignal, cls: SignalClass, horizon: float | None = None) -> PEValidation:
    """Check the excitation constraint: every length-T window integrates to >= mu.

    For a piecewise-constant signal the window integral is piecewise linear
    in the window start, so the minimum is attained where the start or the
    end of the window hits a breakpoint; only that finite candidate set is
    evaluated.  Periodic signals are checked over one period; aperiodic
    signals need an explicit ``horizon`` and are checked on [0, horizon].
    """
    T, mu = cls.T, cls.mu
    if s.period is not None:
        per = s.period
        cand = np.concatenate([s.breakpoints, np.mod(s.breakpoints - T, per)])
        cand = np.unique(np.mod(cand, per))
    else:
        if horizon is None:
            raise ValueError("aperiodic signals need a validation horizon")
        if horizon < T:
            raise ValueError("horizon shorter than the window length T")
        cand = np.concatenate([s.breakpoints, s.breakpoints - T, [0.0, horizon - T]])
        cand = np.unique(cand[(cand >= 0.0) & (cand <= horizon - T)])
    worst_t = 0.0
    worst = np.inf
    for t in cand:
        val = s.integrate(t, t + T)
        if val < worst:
            worst, worst_t = val, float(t)
    return PEValidation(valid=bool(worst >= mu - EP_TOL),
                        worst_window_start=worst_t,
                        worst_integral=float(worst))


def reverse(s: PESignal) -> PESignal:
    """Time reversal t -> alpha(-t) of a periodic signal.

    Implemented by reversing the segment (value, duration) list, so applying
    it twice reproduces the original values and durations bit for bit.
    """
    if s.period is None:
        raise ValueError("time reversal is defined for periodic signals only")
    vals = s.values[::-1]
    durs = s.durations[::-1]
    bk = np.concatenate([[0.0], np.cumsum(durs)[:-1]])
    return PESignal(bk, vals, s.period, durations=durs)


def splice_periodic(prefix: PESignal, t: float, steering: PESignal, tau: float,
                    cls: SignalClass) -> PESignal:
    """Close a prefix into a periodic signal of the same excitation class.

    The output repeats: the prefix on [0, t], full-on padding of length
    T - mu, the steering segment (values within [mu/T, 1]) of length tau,
    and a second full-on pad.  The period is exactly ``t + 2(T - mu) + tau``.
    A validation failure afterwards indicates a prefix that already violated
    the excitation constraint on [0, t].
    """
    if t <= 0.0:
        raise ValueError("prefix duration t must be positive")
    if tau < 0.0:
        raise ValueError("steering duration must be nonnegative")
    T, mu = cls.T, cls.mu
    steer_segs = steering.segments(0.0, tau) if tau > 0.0 else []
    lo = cls.floor - 1e-12
    if any(v < lo or v > 1.0 for v, _ in steer_segs):
        raise ValueError("steering values must lie within [mu/T, 1]")
    segs = list(prefix.segments(0.0, t))
    segs.append((1.0, T - mu))
    segs.extend(steer_segs)
    segs.append((1.0, T - mu))
    period = t + 2.0 * (T - mu) + tau
    out = PESignal.from_segments(segs, period=period)
    check = validate_pe(out, cls)
    if not check.valid:
        raise SpliceError(
            "spliced signal violates the excitation constraint "
            f"(worst window {check.worst_integral:.6g} < mu={mu:.6g} "
            f"at t={check.worst_window_start:.6g}); the prefix is not admissible")
    return out


def periodize(s: PESignal, k: float, cls: SignalClass) -> PESignal:
    """Periodic extension of a finite patch, padded with full-on segments.

    Takes the signal on [-k, k], prepends and appends constant-1 segments of
    length T - mu each, and repeats with period 2(k + T - mu).  The output
    starts at the leading pad (a time shift, which does not affect class
    membership).
    """
    if k < 0.0:
        raise ValueError("need k >= 0")
    T, mu = cls.T, cls.mu
    pad = T - mu
    if k == 0.0 and pad == 0.0:
        raise ValueError("degenerate construction: zero period")
    segs = [(1.0, pad)]
    if k > 0.0:
        segs.extend(s.segments(-k, k))
    segs.append((1.0, pad))
    period = 2.0 * (k + pad)
    out = PESignal.from_segments(segs, period=period)
    check = validate_pe(out, cls)
    if not check.valid:
        raise SpliceError(
            "periodized signal violates the excitation constraint "
            f"(worst window {check.worst_integral:.6g} < mu={mu:.6g})")
    return out
