"""Controllability machinery: Kalman rank, controllability decomposition,
the single-input companion form, and the per-gain accessibility certificates
built on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .matcore import (DEFAULT_RANK_TOL, as_matrix, nilpotent_shift, opnorm,
                      require_square, unit_vector)

__all__ = [
    "MatrixPair",
    "NotControllableError",
    "ControllabilityDecomposition",
    "ControllabilityForm",
    "AccCertificate",
    "CoefficientBoundReport",
    "controllability_matrix",
    "kalman_rank",
    "controllability_decomposition",
    "controllable_form_si",
    "accessibility_certificate",
    "companion_coefficient_bounds",
    "spectral_halfplane_gate",
    "ackermann",
    "companion_gain",
]


@dataclass(frozen=True)
class MatrixPair:
    """A system pair (A, B) with A d x d, B d x m, d >= 2, m >= 1."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        a = require_square(self.A, "A")
        b = as_matrix(self.B, "B")
        if a.shape[0] < 2:
            raise ValueError("state dimension must be at least 2")
        if b.shape[0] != a.shape[0]:
            raise ValueError(f"B must have {a.shape[0]} rows, got {b.shape}")
        if b.shape[1] < 1:
            raise ValueError("input dimension must be at least 1")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


class NotControllableError(ValueError):
    """Raised where controllability is required; carries the Kalman rank."""

    def __init__(self, rank: int, d: int):
        super().__init__(f"pair is not controllable (Kalman rank {rank} < {d})")
        self.rank = rank
        self.d = d


def controllability_matrix(A, B) -> np.ndarray:
    """[B, AB, ..., A^(d-1)B]."""
    a = require_square(A, "A")
    b = as_matrix(B, "B")
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def kalman_rank(A, B, tol: float = DEFAULT_RANK_TOL) -> int:
    c = controllability_matrix(A, B)
    sv = scipy.linalg.svdvals(c)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * smax))


@dataclass(frozen=True)
class ControllabilityDecomposition:
    """Orthogonal change of coordinates splitting off the controllable part.

    P is orthogonal with P A P^(-1) block upper-triangular: the leading r x r
    block A1 together with B1 is controllable, A3 carries the uncontrollable
    modes, and P B has its last d - r rows equal to zero.
    """

    P: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    B1: np.ndarray
    r: int


def controllability_decomposition(A, B, tol: float = DEFAULT_RANK_TOL) -> ControllabilityDecomposition:
    a = require_square(A, "A")
    b = as_matrix(B, "B")
    d = a.shape[0]
    c = controllability_matrix(a, b)
    u, sv, _ = np.linalg.svd(c)
    smax = sv[0] if sv.size else 0.0
    r = int(np.count_nonzero(sv > tol * smax)) if smax > 0 else 0
    p = u.T  # rows: orthonormal basis of the reachable subspace, then its complement
    ap = p @ a @ u
    bp = p @ b
    return ControllabilityDecomposition(
        P=p, A1=ap[:r, :r], A2=ap[:r, r:], A3=ap[r:, r:], B1=bp[:r, :], r=r)


@dataclass(frozen=True)
class ControllabilityForm:
    """Companion form data for a single-input pair.

    ``P`` maps the trace-shifted matrix to ``J + e_d v`` (J the upper shift)
    with ``P @ b = e_d``; the last entry of v equals the trace of the shifted
    matrix, so it vanishes exactly when the shift removes the whole trace.
    """

    v: np.ndarray
    P: np.ndarray
    r: int


def controllable_form_si(A, b, trace_divisor: float = 1.0,
                         tol: float = DEFAULT_RANK_TOL) -> ControllabilityForm:
    """Companion (controllability) form of ``A - (tr A / trace_divisor) I``.

    With ``trace_divisor=d`` the shifted matrix is traceless and the
    companion row v satisfies ``v @ e_d = 0``; the default divisor 1 shifts
    by the full trace.  Rejects non-controllable input with the Kalman rank
    in the diagnostic.
    """
    a = require_square(A, "A")
    bb = as_matrix(b, "b")
    d = a.shape[0]
    if bb.shape == (1, d):
        bb = bb.T
    if bb.shape != (d, 1):
        raise ValueError(f"b must be a {d}-vector, got shape {bb.shape}")
    m = a - (np.trace(a) / trace_divisor) * np.eye(d)
    rank = kalman_rank(m, bb, tol=tol)
    if rank < d:
        raise NotControllableError(rank, d)
    c = controllability_matrix(m, bb)
    q = np.linalg.solve(c.T, unit_vector(d, d - 1))  # row with q C = e_d'
    rows = [q]
    for _ in range(d - 1):
        rows.append(rows[-1] @ m)
    p = np.vstack(rows)
    v = (p @ m @ np.linalg.inv(p))[d - 1, :]
    return ControllabilityForm(v=v, P=p, r=d)


@dataclass(frozen=True)
class AccCertificate:
    """Accessibility certificate for a gain in companion coordinates.

    ``verdict`` is true when every Markov-type scalar r_j is safely nonzero
    and the iterated rows K_j are independent; the certified feedback for
    the original pair is ``K @ P``.
    """

    verdict: bool
    r: tuple
    K_seq: tuple
    v: np.ndarray
    P: np.ndarray

    def to_json(self) -> dict:
        return {
            "verdict": bool(self.verdict),
            "r": [float(x) for x in self.r],
            "K_seq": [[float(x) for x in row] for row in self.K_seq],
            "v": [float(x) for x in self.v],
        }


def accessibility_certificate(A, b, K, trace_divisor: float = 1.0,
                              tol: float = 1e-9) -> AccCertificate:
    """Check the sufficient accessibility conditions for a companion gain.

    Computes the companion row v of the (trace-shifted) pair, then
    ``K_j = K (J + e_d v)^j`` and ``r_j = K_j e_d`` for j < d.  A true
    verdict needs every ``|r_j|`` above a scale-aware floor and the K_j
    linearly independent; it certifies that ``K @ P`` puts the closed loop
    of the shifted pair at full Lie rank.
    """
    form = controllable_form_si(A, b, trace_divisor=trace_divisor)
    d = form.P.shape[0]
    k = as_matrix(K, "K").reshape(-1)
    if k.size != d:
        raise ValueError(f"K must have length {d}, got {k.size}")
    av = nilpotent_shift(d) + np.outer(unit_vector(d, d - 1), form.v)
    rows = [k.copy()]
    for _ in range(d - 1):
        rows.append(rows[-1] @ av)
    r_vals = tuple(float(row[-1]) for row in rows)
    norm_av = opnorm(av)
    norm_k = float(np.linalg.norm(k))
    nonzero = all(
        abs(r_vals[j]) > tol * (1.0 + norm_k * norm_av ** j) for j in range(d))
    sv = scipy.linalg.svdvals(np.vstack(rows))
    independent = bool(sv[-1] > DEFAULT_RANK_TOL * sv[0]) if sv[0] > 0 else False
    return AccCertificate(verdict=nonzero and independent, r=r_vals,
                          K_seq=tuple(tuple(map(float, row)) for row in rows),
                          v=form.v, P=form.P)


@dataclass(frozen=True)
class CoefficientBoundReport:
    verdict: bool
    slacks: tuple
    c0: float
    sign: int  # +1: all real parts positive, -1: all negative


def companion_coefficient_bounds(K, eigenvalues=None, tol: float = 1e-9) -> CoefficientBoundReport:
    """Coefficient lower bounds forced by a one-sign closed-loop spectrum.

    For the companion matrix ``J + e_d K`` whose eigenvalues all have real
    parts of one sign, each coefficient obeys
    ``|k_(d-m)| >= c0 |k_(d-m+1)| (d-m)/(m+1)`` with ``k_(d+1) = 1`` and
    ``c0`` the smallest absolute real part.  Returns the per-m slacks.

    ``eigenvalues`` may be supplied when the spectrum is known exactly
    (pole-placed gains with defective roots lose accuracy through the
    numerical eigensolver); supplied values are validated against the
    companion characteristic polynomial before use.

    Raises ``ValueError`` when real parts are mixed-sign or numerically zero.
    """
    k = as_matrix(K, "K").reshape(-1)
    d = k.size
    comp = nilpotent_shift(d) + np.outer(unit_vector(d, d - 1), k)
    if eigenvalues is None:
        ev = np.linalg.eigvals(comp)
    else:
        ev = np.asarray(eigenvalues, dtype=complex).ravel()
        if ev.size != d:
            raise ValueError(f"expected {d} eigenvalues, got {ev.size}")
        coeffs = np.real(np.poly(ev))
        implied_k = -coeffs[1:][::-1]
        if np.max(np.abs(implied_k - k)) > 1e-6 * (1.0 + np.max(np.abs(k))):
            raise ValueError("supplied eigenvalues do not match the companion row")
    scale = 1.0 + float(np.max(np.abs(ev)))
    re = ev.real
    if np.any(np.abs(re) <= tol * scale):
        raise ValueError("spectrum has (numerically) zero real parts")
    if not (np.all(re > 0) or np.all(re < 0)):
        raise ValueError("spectrum real parts are not of one sign")
    c0 = float(np.min(np.abs(re)))
    kext = np.concatenate([k, [1.0]])  # k_(d+1) := 1
    slacks = []
    for m in range(d):
        lhs = abs(kext[d - m - 1])
        rhs = c0 * abs(kext[d - m]) * (d - m) / (m + 1)
        slacks.append(float(lhs - rhs))
    verdict = all(s >= -tol for s in slacks)
    return CoefficientBoundReport(verdict=verdict, slacks=tuple(slacks),
                                  c0=c0, sign=1 if re[0] > 0 else -1)


def spectral_halfplane_gate(A, b, K, c: float) -> bool:
    """True when the closed-loop spectrum lies entirely beyond +-c.

    Checks max Re < -c or min Re > c for ``A + b K``.
    """
    if c <= 0:
        raise ValueError("need c > 0")
    a = require_square(A, "A")
    bb = as_matrix(b, "b")
    if bb.shape[1] != 1 and bb.shape[0] == 1:
        bb = bb.T
    k = as_matrix(K, "K")
    ev = np.linalg.eigvals(a + bb @ k)
    return bool(ev.real.max() < -c or ev.real.min() > c)


def ackermann(A, b, poles) -> np.ndarray:
    """Single-input pole placement (test oracle): sigma(A + bK) = poles."""
    a = require_square(A, "A")
    bb = as_matrix(b, "b")
    d = a.shape[0]
    if bb.shape == (1, d):
        bb = bb.T
    rank = kalman_rank(a, bb)
    if rank < d:
        raise NotControllableError(rank, d)
    coeffs = np.real(np.poly(np.asarray(poles, dtype=complex)))
    qa = np.zeros((d, d))
    apow = np.eye(d)
    for cj in coeffs[::-1]:
        qa += cj * apow
        apow = apow @ a
    c = controllability_matrix(a, bb)
    row = np.linalg.solve(c.T, unit_vector(d, d - 1))
    return -(row @ qa).reshape(1, d)


def companion_gain(poles) -> np.ndarray:
    """Row K with sigma(J + e_d K) = poles, from the expanded polynomial."""
    coeffs = np.real(np.poly(np.asarray(poles, dtype=complex)))
    return -coeffs[1:][::-1]
