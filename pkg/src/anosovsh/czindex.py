"""Conley-Zehnder index of non-degenerate symplectic paths by crossing forms.

A path ``Psi`` with ``Psi(0) = I`` satisfies ``Psi' = J S Psi`` with ``S``
symmetric.  Its index is half the signature of ``S(0)`` plus, at every
interior time where ``Psi(t)`` has eigenvalue one, the signature of ``S(t)``
restricted to ``ker(Psi(t) - I)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import block_diag, expm

from .errors import DegeneracyError, RegularityError, ValidationError
from .symplin import (
    DEGENERACY_TOL,
    Parity,
    det_sign_parity,
    standard_j,
    symplectic_defect,
)

N_SAMPLES = 2048
BISECTION_TOL = 1e-12
FD_STEP = 1e-6
SHIFT_FRACTION = 1e-5
KERNEL_SAFETY = 100.0
KERNEL_GAP = 1e4
REFINE_SAMPLES = 16
REFINE_DEPTH = 8
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class SymplecticPath:
    """A path of symplectic matrices on ``[0, duration]`` starting at the identity.

    ``evaluate`` must be a pure function of ``t``.  When ``derivative`` is
    omitted a central finite difference with step ``1e-6`` is used.  An
    optional ``hamiltonian`` returns the symmetric generator ``S(t)`` directly,
    which avoids inverting badly conditioned ``Psi(t)``.
    """

    dim: int
    duration: float
    evaluate: Callable[[float], np.ndarray]
    derivative: Optional[Callable[[float], np.ndarray]] = None
    check: bool = field(default=True, compare=False, repr=False)
    hamiltonian: Optional[Callable[[float], np.ndarray]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise ValidationError(f"path dimension must be even and positive, got {self.dim}")
        if not self.duration > 0:
            raise ValidationError(f"duration must be positive, got {self.duration}")
        if not self.check:
            return
        I = np.eye(self.dim)
        if np.max(np.abs(self(0.0) - I)) > 1e-9:
            raise ValidationError("path does not start at the identity")
        for t in np.linspace(0.0, self.duration, 100):
            if symplectic_defect(self(t)) > 1e-7 * max(1.0, float(np.max(np.abs(self(t)))) ** 2):
                raise ValidationError(f"path is not symplectic at t={t}")

    def __call__(self, t):
        return np.asarray(self.evaluate(float(t)), dtype=float)

    def diff(self, t):
        if self.derivative is not None:
            return np.asarray(self.derivative(float(t)), dtype=float)
        h = FD_STEP
        lo, hi = max(0.0, t - h), min(self.duration, t + h)
        return (self(hi) - self(lo)) / (hi - lo)

    def endpoint(self):
        return self(self.duration)


@dataclass(frozen=True)
class CZResult:
    index: int
    crossings: tuple  # ((time, contribution), ...); t = 0 carries the half-signature

    @property
    def parity(self):
        return Parity.of(self.index)


def generator(path, t):
    """Symmetric ``S(t) = -J Psi'(t) Psi(t)^{-1}``."""
    if path.hamiltonian is not None:
        S = np.asarray(path.hamiltonian(float(t)), dtype=float)
        return 0.5 * (S + S.T)
    J = standard_j(path.dim)
    S = -J @ np.linalg.solve(path(t).T, path.diff(t).T).T
    return 0.5 * (S + S.T)


def _signature(Q, where):
    w = np.linalg.eigvalsh(Q)
    eps = 1e-9 * max(1.0, float(np.max(np.abs(w))))
    if np.any(np.abs(w) <= eps):
        raise RegularityError(f"crossing form is singular at t={where!r}", time=where)
    return int(np.sum(w > 0) - np.sum(w < 0))


def _gap(path, t):
    """Smallest singular value of ``Psi(t) - I`` relative to ``max(1, norm)``."""
    s = np.linalg.svd(path(t) - np.eye(path.dim), compute_uv=False)
    return s[-1] / max(1.0, s[0])


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn, a, b):
    # absolute tolerance in t; the gap is V-shaped at a crossing, so no parabolic steps
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > BISECTION_TOL:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    t = 0.5 * (a + b)
    return t, fn(t)


def _bisect(fn, a, b, fa):
    while b - a > BISECTION_TOL:
        c = 0.5 * (a + b)
        fc = fn(c)
        if fc == 0:
            return c
        if np.sign(fc) == np.sign(fa):
            a, fa = c, fc
        else:
            b = c
    return 0.5 * (a + b)


def _scan(path, ts, depth, found, top):
    I = np.eye(path.dim)
    n = len(ts)
    mats = np.stack([path(t) for t in ts]) - I
    dets = np.linalg.det(mats)
    svals = np.linalg.svd(mats, compute_uv=False)
    gaps = svals[:, -1] / np.maximum(1.0, svals[:, 0])

    # simple crossings: sign changes of det(Psi - I)
    fn = lambda t: np.linalg.det(path(t) - I)
    for i in range(1 if top else 0, n - 1):
        if dets[i] != 0 and dets[i + 1] != 0 and np.sign(dets[i]) != np.sign(dets[i + 1]):
            found.append(_bisect(fn, ts[i], ts[i + 1], dets[i]))
    # V-shaped dips of the gap hide touching crossings and close pairs of
    # simple ones; rescan them finer, then minimise
    last = n if top else n - 1
    for i in range(1, last):
        right = gaps[i + 1] if i + 1 < n else gaps[i - 1]
        if not (gaps[i] <= gaps[i - 1] and gaps[i] <= right
                and gaps[i] <= 0.5 * max(gaps[i - 1], right)):
            continue
        lo, hi = ts[i - 1], ts[min(i + 1, n - 1)]
        if depth > 0:
            _scan(path, np.linspace(lo, hi, REFINE_SAMPLES), depth - 1, found, False)
            continue
        t_min, g_min = _golden_min(lambda t: _gap(path, t), lo, hi)
        s = np.linalg.svd(path(t_min) - I, compute_uv=False)
        if s[-1] <= _kernel_tol(path, t_min, s[0]):
            found.append(t_min)


def _locate_crossings(path, shift):
    T = path.duration
    ts = np.linspace(0.0, T, N_SAMPLES)
    if shift:
        ts[1:-1] = np.clip(ts[1:-1] + shift, 0.0, T)
    found = []
    _scan(path, ts, REFINE_DEPTH, found, True)
    floor = 0.5 * (ts[1] - ts[0])
    merged = []
    tol = MERGE_TOL * max(1.0, T)
    for t in sorted(found):
        if t <= floor * 1e-3 or (merged and t - merged[-1] < tol):
            continue
        merged.append(t)
    return merged


def _kernel_tol(path, t, norm):
    # how small sigma_min can be at a crossing located to BISECTION_TOL
    slope = float(np.linalg.norm(path.diff(t), 2))
    eps = np.finfo(float).eps
    return KERNEL_SAFETY * (BISECTION_TOL * slope + eps * path.dim * max(1.0, norm))


def _kernel(path, t):
    _, s, Vt = np.linalg.svd(path(t) - np.eye(path.dim))
    # a kernel direction is both below the localisation bound and close to
    # the smallest singular value; nearby crossings of other directions are not
    floor = 1e3 * np.finfo(float).eps
    tol = min(_kernel_tol(path, t, s[0]), KERNEL_GAP * max(s[-1], floor))
    K = Vt[s <= tol].T
    if K.shape[1] == 0:
        raise RegularityError(f"no kernel found at suspected crossing t={t!r}", time=t)
    return K


def _interior_contribution(path, t):
    K = _kernel(path, t)
    return _signature(K.T @ generator(path, t) @ K, t)


def cz_index(path, degeneracy_tol=DEGENERACY_TOL):
    """Conley-Zehnder index of a path with non-degenerate endpoint.

    Raises
    ------
    DegeneracyError
        ``det(Psi(T) - I)`` is within ``degeneracy_tol`` of zero.
    RegularityError
        A crossing form stays singular after one shifted re-scan.
    """
    end = path.endpoint()
    if not abs(np.linalg.det(end - np.eye(path.dim))) > degeneracy_tol:
        raise DegeneracyError("endpoint has eigenvalue 1")
    start = _signature(generator(path, 0.0), 0.0)
    if start % 2:
        raise RegularityError("odd signature at t=0", time=0.0)
    last_error = None
    for shift in (0.0, path.duration * SHIFT_FRACTION):
        try:
            crossings = [(0.0, start // 2)]
            for t in _locate_crossings(path, shift):
                crossings.append((t, _interior_contribution(path, t)))
        except RegularityError as exc:
            last_error = exc
            continue
        index = sum(c for _, c in crossings)
        if Parity.of(index) != det_sign_parity(end, degeneracy_tol):
            last_error = RegularityError("crossing count contradicts the endpoint parity")
            continue
        return CZResult(index=index, crossings=tuple(crossings))
    raise last_error


def iterate_path(path, j):
    """Path of the ``j``-th iterate: ``Psi(s + kT) = Psi(s) Psi(T)^k``."""
    j = int(j)
    if j < 1:
        raise ValidationError(f"iterate must be >= 1, got {j}")
    if j == 1:
        return path
    T = path.duration
    powers = [np.eye(path.dim)]
    end = path.endpoint()
    for _ in range(j - 1):
        powers.append(powers[-1] @ end)

    def split(t):
        k = min(int(math.floor(t / T)), j - 1)
        return t - k * T, k

    def evaluate(t):
        s, k = split(t)
        return path(s) @ powers[k]

    def derivative(t):
        s, k = split(t)
        return path.diff(s) @ powers[k]

    def hamiltonian(t):
        return generator(path, split(t)[0])

    return SymplecticPath(path.dim, j * T, evaluate, derivative, check=False,
                          hamiltonian=hamiltonian)


def cz_parity_cross_check(path):
    """Does the crossing-form parity agree with ``(-1)^m sign det(I - Psi(T))``?"""
    return cz_index(path).parity == det_sign_parity(path.endpoint())


# --- model paths -----------------------------------------------------------

def _rot(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def rotation_path(theta, duration=1.0):
    """``t -> R(2 pi theta t / duration)``; index ``2 floor(theta) + 1`` for non-integer theta."""
    w = 2.0 * math.pi * theta / duration
    Jm = np.array([[0.0, -1.0], [1.0, 0.0]])
    return SymplecticPath(
        2, duration,
        lambda t: _rot(w * t),
        lambda t: w * _rot(w * t) @ Jm,
    )


def hyperbolic_path(rate=1.0, duration=1.0):
    """``t -> diag(e^{rate t}, e^{-rate t})``; index 0."""
    return SymplecticPath(
        2, duration,
        lambda t: np.diag([math.exp(rate * t), math.exp(-rate * t)]),
        lambda t: np.diag([rate * math.exp(rate * t), -rate * math.exp(-rate * t)]),
    )


def negative_hyperbolic_path(rate=1.0, duration=1.0):
    """``t -> R(pi t / duration) diag(e^{rate t}, e^{-rate t})``; index 1."""
    w = math.pi / duration
    Jm = np.array([[0.0, -1.0], [1.0, 0.0]])

    def D(t):
        return np.diag([math.exp(rate * t), math.exp(-rate * t)])

    return SymplecticPath(
        2, duration,
        lambda t: _rot(w * t) @ D(t),
        lambda t: w * _rot(w * t) @ Jm @ D(t) + _rot(w * t) @ np.diag([rate, -rate]) @ D(t),
    )


def generator_path(S, duration=1.0):
    """``t -> exp(t J S)`` for a constant symmetric ``S``."""
    S = np.asarray(S, dtype=float)
    X = standard_j(S.shape[0]) @ S
    return SymplecticPath(S.shape[0], duration, lambda t: expm(t * X), lambda t: X @ expm(t * X))


def direct_sum_path(*paths):
    """Direct sum of paths of equal duration, with q and p coordinates interleaved."""
    T = paths[0].duration
    if any(abs(p.duration - T) > 1e-12 for p in paths):
        raise ValidationError("direct sum requires equal durations")
    dim = sum(p.dim for p in paths)
    # block-diagonal coordinates (q1 p1 q2 p2 ...) -> (q1 q2 ... p1 p2 ...)
    qs, ps, off = [], [], 0
    for p in paths:
        k = p.dim // 2
        qs.extend(range(off, off + k))
        ps.extend(range(off + k, off + 2 * k))
        off += 2 * k
    perm = np.array(qs + ps)

    def total(blocks):
        return block_diag(*blocks)[np.ix_(perm, perm)]

    return SymplecticPath(
        dim, T,
        lambda t: total([p(t) for p in paths]),
        lambda t: total([p.diff(t) for p in paths]),
        check=False,
        hamiltonian=lambda t: total([generator(p, t) for p in paths]),
    )
