"""Growth rates of persistently excited closed loops.

Per-signal Lyapunov exponents via monodromy matrices, worst-case
convergence/divergence estimators over finite families of periodic signals,
and the exact algebraic checks that tie a system to its time reversal.

Time-reversal symmetry is enforced exactly: the tuple (A, B, K, signal) and
its reversal (-A, -B, K, reversed signal) generate monodromies that are
inverse to each other, so per-signal log-spectra are evaluated once on a
canonical orbit representative and negated for the partner.  Convergence
estimates of a system and divergence estimates of its reversal therefore
agree bit for bit on mirrored families, for any evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .matcore import (as_matrix, multiset_residual, opnorm, parity_matrix,
                      nilpotent_shift, require_square, unit_vector)
from .signals import PESignal, SignalClass, reverse, validate_pe

__all__ = [
    "SearchBudget",
    "RateEstimate",
    "Monodromy",
    "fundamental_solution",
    "monodromy",
    "lyap_exponents",
    "constant_family",
    "bang_bang_family",
    "mirror_family",
    "rc_estimate",
    "rd_estimate",
    "duality_check",
    "DualityReport",
    "delta_quantities",
    "DeltaReport",
    "shift_law_check",
    "ShiftLawReport",
    "coordinate_invariance_check",
    "CoordinateInvarianceReport",
    "parity_duality_check",
    "ParityDualityReport",
]


def _loop_matrices(A, B, K):
    a = require_square(A, "A")
    b = as_matrix(B, "B")
    k = as_matrix(K, "K")
    if b.shape[0] != a.shape[0] or k.shape != (b.shape[1], a.shape[0]):
        raise ValueError(
            f"inconsistent shapes: A {a.shape}, B {b.shape}, K {k.shape}")
    return a, b, k


def _product_over_segments(a, bk, segments) -> np.ndarray:
    """Ordered product of per-segment exponentials, cached by (value, dt)."""
    d = a.shape[0]
    r = np.eye(d)
    cache: dict[tuple[float, float], np.ndarray] = {}
    for value, dt in segments:
        if dt == 0.0:
            continue
        key = (value, dt)
        e = cache.get(key)
        if e is None:
            e = scipy.linalg.expm((a + value * bk) * dt)
            cache[key] = e
        r = e @ r
    return r


def fundamental_solution(A, B, K, s: PESignal, t: float) -> np.ndarray:
    """Solution at time t of R' = (A + alpha(t) B K) R, R(0) = I.

    Exact product of per-segment matrix exponentials over the segments of
    [0, t]; deterministic.
    """
    a, b, k = _loop_matrices(A, B, K)
    if t < 0:
        raise ValueError("need t >= 0")
    if t == 0.0:
        return np.eye(a.shape[0])
    return _product_over_segments(a, b @ k, s.segments(0.0, t))


def _monodromy_matrix(a, bk, s: PESignal) -> np.ndarray:
    return _product_over_segments(a, bk, s.period_segments())


@dataclass(frozen=True)
class Monodromy:
    """Fundamental solution over one signal period and the induced rates.

    ``top_rate``/``bottom_rate`` are log spectral radius of R and of its
    inverse (negated), divided by the period: the extreme Lyapunov exponents
    of the periodic system.
    """

    R: np.ndarray
    tau: float
    top_rate: float
    bottom_rate: float


def monodromy(A, B, K, s: PESignal) -> Monodromy:
    a, b, k = _loop_matrices(A, B, K)
    if s.period is None:
        raise ValueError("monodromy needs a periodic signal")
    r = _monodromy_matrix(a, b @ k, s)
    mods = np.abs(np.linalg.eigvals(r))
    if mods.min() <= 0.0:  # pragma: no cover - fundamental solutions are invertible
        raise ArithmeticError("numerically singular fundamental solution")
    tau = s.period
    return Monodromy(R=r, tau=tau,
                     top_rate=float(np.log(mods.max()) / tau),
                     bottom_rate=float(np.log(mods.min()) / tau))


# -- canonical orbit evaluation -------------------------------------------


def _triple_encoding(a, b, k, s: PESignal) -> bytes:
    return (np.ascontiguousarray(a).tobytes()
            + np.ascontiguousarray(b).tobytes()
            + np.ascontiguousarray(k).tobytes()
            + s.encoding_key())


def _orbit_log_spectra(a, b, k, s: PESignal, want_svals: bool):
    """Sorted log eigenvalue moduli (and optionally log singular values) of
    the monodromy, evaluated on the canonical member of the time-reversal
    orbit and negated for the other member.

    Guarantees the exact spectral-level identities
    ``bottom(-A,-B,K,rev s) = -top(A,B,K,s)`` and the corresponding
    norm/conorm pair, independent of which member is queried.
    """
    s_rev = reverse(s)
    here = _triple_encoding(a, b, k, s)
    there = _triple_encoding(-a, -b, k, s_rev)
    if here <= there:
        r = _monodromy_matrix(a, b @ k, s)
        flip = False
    else:
        r = _monodromy_matrix(-a, -(b @ k), s_rev)
        flip = True
    logmod = np.sort(np.log(np.abs(np.linalg.eigvals(r))))
    if flip:
        logmod = -logmod[::-1]
    if not want_svals:
        return logmod, None
    logsv = np.sort(np.log(scipy.linalg.svdvals(r)))
    if flip:
        logsv = -logsv[::-1]
    return logmod, logsv


def _signal_log_moduli(A, B, K, s: PESignal) -> np.ndarray:
    a, b, k = _loop_matrices(A, B, K)
    return _orbit_log_spectra(a, b, k, s, want_svals=False)[0]


# -- per-vector exponents ---------------------------------------------------


def _modulus_classes(logmods: np.ndarray, tol: float = 1e-7) -> list[float]:
    """Distinct log-modulus levels, descending, clustered within tol."""
    vals = np.sort(logmods)[::-1]
    classes = [[vals[0]]]
    for x in vals[1:]:
        if classes[-1][-1] - x <= tol:
            classes[-1].append(x)
        else:
            classes.append([x])
    return [float(np.mean(c)) for c in classes]


def _spectral_component(r: np.ndarray, thresh: float, x: np.ndarray) -> float:
    """Norm of the component of x in the invariant subspace with |eig| >= thresh."""
    d = r.shape[0]
    t, z, sdim = scipy.linalg.schur(
        r, output="real", sort=lambda re, im: np.hypot(re, im) >= thresh)
    if sdim == 0:
        return 0.0
    if sdim == d:
        return float(np.linalg.norm(x))
    t11 = t[:sdim, :sdim]
    t22 = t[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(t11, -t22, t[:sdim, sdim:])
    w = z.T @ x
    proj = np.zeros_like(w)
    proj[:sdim] = w[:sdim] + y @ w[sdim:]
    return float(np.linalg.norm(z @ proj))


def _per_vector_exponent(r: np.ndarray, tau: float, x0: np.ndarray,
                         tol: float = 1e-9) -> float:
    logmods = np.log(np.abs(np.linalg.eigvals(r)))
    classes = _modulus_classes(logmods)
    if len(classes) == 1:
        return classes[0] / tau
    scale = tol * np.linalg.norm(x0)
    for i, c in enumerate(classes[:-1]):
        thresh = np.exp(0.5 * (c + classes[i + 1]))
        if _spectral_component(r, thresh, x0) > scale:
            return c / tau
    return classes[-1] / tau


def lyap_exponents(x0, A, B, K, s: PESignal, horizon: float | None = None):
    """Per-initial-vector exponential growth rate(s).

    Periodic signals: the exponent is read off the monodromy eigenstructure
    (the slowest/fastest classes the vector actually touches), and the upper
    and lower limits coincide.  Aperiodic signals are propagated to
    ``horizon`` with running renormalisation, and the max/min of
    ``log|x(t)|/t`` over the tail of a geometric time grid are returned.
    """
    a, b, k = _loop_matrices(A, B, K)
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != a.shape[0] or np.linalg.norm(x) == 0.0:
        raise ValueError("x0 must be a nonzero vector of matching dimension")
    if s.period is not None:
        r = _monodromy_matrix(a, b @ k, s)
        lam = _per_vector_exponent(r, s.period, x)
        return lam, lam
    if horizon is None or horizon <= 0:
        raise ValueError("aperiodic signals need a positive horizon")
    times = np.geomspace(horizon / 256.0, horizon, 48)
    rates = []
    logn = float(np.log(np.linalg.norm(x)))
    cur = x / np.linalg.norm(x)
    prev = 0.0
    bk = b @ k
    for tj in times:
        for value, dt in s.segments(prev, tj):
            cur = scipy.linalg.expm((a + value * bk) * dt) @ cur
            nrm = np.linalg.norm(cur)
            cur /= nrm
            logn += np.log(nrm)
        prev = tj
        rates.append(logn / tj)
    tail = [r for tj, r in zip(times, rates) if tj >= horizon / 2.0]
    return float(max(tail)), float(min(tail))


# -- signal families ---------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    """Shape of the periodic bang-bang search family.

    Periods run over {T, 2T, ..., n_periods*T}; candidates alternate between
    1 and a low level (0 or mu/T) with an even number of switches per period
    (at most max_switches), switching on a uniform grid of ``time_grid``
    cells per window length T.  Candidates failing the excitation check are
    discarded.  Generation is deterministic in ``seed``.
    """

    n_periods: int = 4
    max_switches: int = 6
    time_grid: int = 16
    size: int = 32
    include_constants: bool = True
    seed: int = 0


def constant_family(cls: SignalClass, n: int) -> list[PESignal]:
    """Constant signals on an n-point grid spanning [mu/T, 1]."""
    if n < 1:
        raise ValueError("need n >= 1")
    levels = np.linspace(cls.floor, 1.0, n) if n > 1 else np.array([1.0])
    return [PESignal.constant(float(v), period=cls.T) for v in levels]


def bang_bang_family(cls: SignalClass, budget: SearchBudget) -> list[PESignal]:
    """Deterministic PE-valid family of periodic bang-bang candidates."""
    rng = np.random.default_rng(budget.seed)
    out: list[PESignal] = []
    seen: set[bytes] = set()

    def push(sig: PESignal) -> None:
        key = sig.encoding_key()
        if key in seen:
            return
        if validate_pe(sig, cls).valid:
            seen.add(key)
            out.append(sig)

    if budget.include_constants:
        push(PESignal.constant(1.0, period=cls.T))
        push(PESignal.constant(cls.floor, period=cls.T))
    step = cls.T / budget.time_grid
    halves = max(1, budget.max_switches // 2)
    attempts = 0
    max_attempts = 80 * budget.size
    while len(out) < budget.size and attempts < max_attempts:
        attempts += 1
        mult = int(rng.integers(1, budget.n_periods + 1))
        cells = budget.time_grid * mult
        k = 2 * int(rng.integers(1, halves + 1))
        if k >= cells:
            continue
        idx = np.sort(rng.choice(np.arange(1, cells), size=k - 1, replace=False))
        bounds = np.concatenate([[0], idx, [cells]])
        low = 0.0 if rng.random() < 0.7 else cls.floor
        first_high = bool(rng.random() < 0.5)
        segs = []
        for i in range(k):
            high = (i % 2 == 0) == first_high
            segs.append((1.0 if high else low, (bounds[i + 1] - bounds[i]) * step))
        try:
            push(PESignal.from_segments(segs, period=mult * cls.T))
        except ValueError:
            continue
    fill = 3
    while len(out) < budget.size:
        for v in np.linspace(cls.floor, 1.0, fill):
            push(PESignal.constant(float(v), period=cls.T))
            if len(out) >= budget.size:
                break
        fill += 2
    out.sort(key=lambda s: s.encoding_key())
    return out


def mirror_family(family) -> list[PESignal]:
    """Time reversal of every signal in the family."""
    return [reverse(s) for s in family]


@dataclass(frozen=True)
class RateEstimate:
    """A one-sided bound on a worst-case growth rate.

    ``value`` bounds the true rate from the side named in ``bound``; the
    witnessing signal attains it within the searched family.
    """

    value: float
    bound: str  # "upper" | "lower" | "exact"
    witness: PESignal | None
    method: str

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "bound": self.bound,
            "method": self.method,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _resolve_family(cls: SignalClass, family) -> list[PESignal]:
    if isinstance(family, SearchBudget):
        family = bang_bang_family(cls, family)
    sigs = list(family)
    for i, s in enumerate(sigs):
        if s.period is None:
            raise ValueError(f"family[{i}] is not periodic")
    valid = [s for s in sigs if validate_pe(s, cls).valid]
    if not valid:
        raise ValueError("no PE-valid signals in the family")
    return valid


def _family_minimum(A, B, K, cls, family, kind: str) -> RateEstimate:
    sigs = _resolve_family(cls, family)
    best = None
    for s in sigs:
        lm = _signal_log_moduli(A, B, K, s)
        if kind == "rc":
            value = -(lm[-1] / s.period)
        else:
            value = lm[0] / s.period
        entry = (value, s.encoding_key(), s)
        if best is None or entry[:2] < best[:2]:
            best = entry
    return RateEstimate(value=best[0], bound="upper", witness=best[2],
                        method=f"{kind}/periodic-monodromy-min/{len(sigs)}")


def rc_estimate(A, B, K, cls: SignalClass, family) -> RateEstimate:
    """Upper bound on the worst-case convergence rate.

    Minimises the negated top monodromy exponent over the family; since the
    family is a subset of the signal class, the true rate cannot exceed the
    returned value.  ``family`` is a sequence of periodic signals or a
    ``SearchBudget``.
    """
    return _family_minimum(A, B, K, cls, family, "rc")


def rd_estimate(A, B, K, cls: SignalClass, family) -> RateEstimate:
    """Upper bound on the worst-case divergence rate (bottom exponents)."""
    return _family_minimum(A, B, K, cls, family, "rd")


@dataclass(frozen=True)
class DualityReport:
    """Per-signal inversion residuals plus the aggregate estimate equality."""

    per_signal: tuple  # of (index, period, residual)
    max_residual: float
    rc: RateEstimate
    rd_mirror: RateEstimate
    estimates_equal: bool
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol and self.estimates_equal


def duality_check(A, B, K, cls: SignalClass, family, tol: float = 1e-8) -> DualityReport:
    """Verify time-reversal duality on a family of periodic signals.

    For each signal alpha of period tau the product
    ``R(tau; -A,-B,K, alpha_rev) R(tau; A,B,K, alpha)`` must be the identity
    (both factors are computed independently; the residual is reported).
    Aggregately, the convergence estimate of (A, B, K) and the divergence
    estimate of (-A, -B, K) on the mirrored family must coincide exactly.
    """
    a, b, k = _loop_matrices(A, B, K)
    sigs = _resolve_family(cls, family)
    d = a.shape[0]
    eye = np.eye(d)
    bk = b @ k
    rows = []
    worst = 0.0
    for i, s in enumerate(sigs):
        r = _monodromy_matrix(a, bk, s)
        r_rev = _monodromy_matrix(-a, -bk, reverse(s))
        res = opnorm(r_rev @ r - eye)
        worst = max(worst, res)
        rows.append((i, s.period, res))
    rc = rc_estimate(a, b, k, cls, sigs)
    rd = rd_estimate(-a, -b, k, cls, mirror_family(sigs))
    return DualityReport(per_signal=tuple(rows), max_residual=worst,
                         rc=rc, rd_mirror=rd,
                         estimates_equal=bool(rc.value == rd.value), tol=tol)


@dataclass(frozen=True)
class DeltaReport:
    """Norm/conorm growth envelopes over a family of periodic signals."""

    delta_hat: RateEstimate        # max of log||R||/tau: lower bound on the sup envelope
    delta_star_hat: RateEstimate   # min of log conorm(R)/tau: upper bound on the inf envelope
    mirror_identity_exact: bool    # delta_star(A,B,K) == -delta_hat(-A,-B,K) on mirrors
    ordered: bool                  # delta_star_hat <= delta_hat


def delta_quantities(A, B, K, cls: SignalClass, family) -> DeltaReport:
    """Extremal log-norm and log-conorm growth over the family.

    The norm envelope is bounded below by the best signal found; the conorm
    envelope is bounded above.  The exact mirror identity (the conorm
    envelope of a system is the negated norm envelope of its reversal) is
    evaluated on the mirrored family and reported.
    """
    a, b, k = _loop_matrices(A, B, K)
    sigs = _resolve_family(cls, family)

    def collect(aa, bb, fam):
        tops, bottoms = [], []
        for s in fam:
            _, ls = _orbit_log_spectra(aa, bb, k, s, want_svals=True)
            tops.append((ls[-1] / s.period, s.encoding_key(), s))
            bottoms.append((ls[0] / s.period, s.encoding_key(), s))
        return tops, bottoms

    tops, bottoms = collect(a, b, sigs)
    top = max(tops, key=lambda e: (e[0], e[1]))
    bottom = min(bottoms, key=lambda e: (e[0], e[1]))
    delta_hat = RateEstimate(top[0], "lower", top[2], "delta/log-norm-max")
    delta_star = RateEstimate(bottom[0], "upper", bottom[2], "delta*/log-conorm-min")

    mtops, _ = collect(-a, -b, mirror_family(sigs))
    mirror_delta = max(mtops, key=lambda e: (e[0], e[1]))[0]
    return DeltaReport(delta_hat=delta_hat, delta_star_hat=delta_star,
                       mirror_identity_exact=bool(delta_star.value == -mirror_delta),
                       ordered=bool(delta_star.value <= delta_hat.value))


@dataclass(frozen=True)
class ShiftLawReport:
    shift: float
    top_rate_residual: float
    bottom_rate_residual: float
    exponent_residual: float
    rc_shift_residual: float | None


def shift_law_check(A, B, K, shift: float, s: PESignal, x0,
                    cls: SignalClass | None = None, family=None) -> ShiftLawReport:
    """Exponents must shift by exactly ``shift`` under A -> A + shift*I.

    Checks the top/bottom monodromy rates and the per-vector exponent of
    ``x0``; optionally also the convergence estimate over a family (which
    shifts the other way).
    """
    a, b, k = _loop_matrices(A, B, K)
    d = a.shape[0]
    shifted = a + shift * np.eye(d)
    m0 = monodromy(a, b, k, s)
    m1 = monodromy(shifted, b, k, s)
    l0 = lyap_exponents(x0, a, b, k, s)[0]
    l1 = lyap_exponents(x0, shifted, b, k, s)[0]
    rc_res = None
    if family is not None:
        if cls is None:
            raise ValueError("family checks need the signal class")
        rc0 = rc_estimate(a, b, k, cls, family).value
        rc1 = rc_estimate(shifted, b, k, cls, family).value
        rc_res = abs(rc1 - (rc0 - shift))
    return ShiftLawReport(
        shift=float(shift),
        top_rate_residual=abs(m1.top_rate - (m0.top_rate + shift)),
        bottom_rate_residual=abs(m1.bottom_rate - (m0.bottom_rate + shift)),
        exponent_residual=abs(l1 - (l0 + shift)),
        rc_shift_residual=rc_res)


@dataclass(frozen=True)
class CoordinateInvarianceReport:
    spectral_residual: float     # relative multiset distance of monodromy spectra
    conjugacy_residual: float    # relative ||R' - P R P^-1||
    top_rate_difference: float
    bottom_rate_difference: float


def coordinate_invariance_check(A, B, K, P, V, s: PESignal) -> CoordinateInvarianceReport:
    """Per-signal rates are unchanged by x -> Px, u -> Vu.

    The transformed loop has monodromy ``P R P^-1``; spectra agree as
    multisets, so the exponents agree while norms may not.
    """
    a, b, k = _loop_matrices(A, B, K)
    p = require_square(P, "P")
    v = require_square(V, "V")
    pinv = np.linalg.inv(p)
    vinv = np.linalg.inv(v)
    m = monodromy(a, b, k, s)
    m2 = monodromy(p @ a @ pinv, p @ b @ vinv, v @ k @ pinv, s)
    conj = p @ m.R @ pinv
    ev0 = np.linalg.eigvals(m.R)
    ev2 = np.linalg.eigvals(m2.R)
    rel = multiset_residual(ev2, ev0) / (1.0 + float(np.max(np.abs(ev0))))
    return CoordinateInvarianceReport(
        spectral_residual=rel,
        conjugacy_residual=opnorm(m2.R - conj) / (1.0 + opnorm(conj)),
        top_rate_difference=abs(m2.top_rate - m.top_rate),
        bottom_rate_difference=abs(m2.bottom_rate - m.bottom_rate))


@dataclass(frozen=True)
class ParityDualityReport:
    K_minus: np.ndarray
    per_signal: tuple  # of (index, period, residual)
    max_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol


def parity_duality_check(K, family, cls: SignalClass | None = None,
                         tol: float = 1e-8) -> ParityDualityReport:
    """Spectral inversion between a companion gain and its parity conjugate.

    For the chain pair (J, e_d) and a gain K with all components nonzero,
    the gain ``K_minus = (-1)^d K D`` (D the alternating parity matrix)
    satisfies: the monodromy spectrum of (J, e_d, K_minus) under the
    reversed signal is the elementwise inverse of the spectrum of
    (J, e_d, K) under the original.  Checked per signal via multiset
    matching.
    """
    k = as_matrix(K, "K").reshape(-1)
    d = k.size
    if np.any(k == 0.0):
        raise ValueError("all components of K must be nonzero")
    if d < 2:
        raise ValueError("need d >= 2")
    parity = parity_matrix(d)
    k_minus = ((-1.0) ** d) * (k @ parity)
    j = nilpotent_shift(d)
    ed = unit_vector(d, d - 1).reshape(d, 1)
    rows = []
    worst = 0.0
    for i, s in enumerate(family):
        if s.period is None:
            raise ValueError(f"family[{i}] is not periodic")
        if cls is not None and not validate_pe(s, cls).valid:
            raise ValueError(f"family[{i}] fails the excitation check")
        ev = np.linalg.eigvals(_monodromy_matrix(j, ed @ k.reshape(1, d), s))
        ev_minus = np.linalg.eigvals(
            _monodromy_matrix(j, ed @ k_minus.reshape(1, d), reverse(s)))
        res = multiset_residual(ev_minus, 1.0 / ev)
        worst = max(worst, res)
        rows.append((i, s.period, float(res)))
    return ParityDualityReport(K_minus=k_minus, per_signal=tuple(rows),
                               max_residual=worst, tol=tol)
