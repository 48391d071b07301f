"""Exactly computable model flows and their periodic-orbit data.

* suspensions of hyperbolic toral automorphisms ``A`` in SL(2, Z) with a
  positive roof function,
* the flat torus geodesic flow (Morse-Bott) and its Morse perturbation,
* irrational ellipsoids ``E(a, b)`` in C^2,
* synthetic censuses of hyperbolic orbits obeying ``mu(g^j) = j mu(g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._parallel import pmap
from .czindex import cz_index, rotation_path
from .errors import ConfigError, ResourceError, ValidationError
from .records import CensusTable, OrbitRecord, classify_all
from .symplin import Parity

ENUMERATION_CAP = 10**7
PERIOD_SLACK = 1e-12
# a float within this of p/q (q <= 10**6) is treated as that rational
RATIONAL_TOL = 1e-14


# --- roof functions --------------------------------------------------------

@dataclass(frozen=True)
class Roof:
    """``constant + sum_j a_j cos(2 pi k_j.x) + b_j sin(2 pi k_j.x)`` on the 2-torus.

    ``terms`` holds tuples ``(k1, k2, a, b)``.  Bounds default to
    ``constant -/+ sum(|a| + |b|)``, which is exact for a single term.
    """

    constant: float = 1.0
    terms: tuple = ()
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))
        if self.min <= 0:
            raise ValidationError(f"roof minimum must be positive, got {self.min}")

    @property
    def amplitude(self):
        return sum(abs(a) + abs(b) for _, _, a, b in self.terms)

    @property
    def min(self):
        return self.lower if self.lower is not None else self.constant - self.amplitude

    @property
    def max(self):
        return self.upper if self.upper is not None else self.constant + self.amplitude

    @property
    def is_constant(self):
        return not any(a or b for _, _, a, b in self.terms)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        out = np.full(x1.shape, float(self.constant))
        for k1, k2, a, b in self.terms:
            phase = 2.0 * np.pi * (k1 * x1 + k2 * np.asarray(x2, dtype=float))
            if a:
                out = out + a * np.cos(phase)
            if b:
                out = out + b * np.sin(phase)
        return out

    def scaled(self, c):
        return Roof(
            self.constant * c,
            tuple((k1, k2, a * c, b * c) for k1, k2, a, b in self.terms),
            None if self.lower is None else self.lower * c,
            None if self.upper is None else self.upper * c,
        )

    def to_spec(self):
        if self.is_constant:
            return {"kind": "const", "value": self.constant}
        spec = {
            "kind": "trig",
            "constant": self.constant,
            "terms": [{"k": [k1, k2], "cos": a, "sin": b} for k1, k2, a, b in self.terms],
        }
        if self.lower is not None:
            spec["min"] = self.lower
        if self.upper is not None:
            spec["max"] = self.upper
        return spec


# --- model descriptions ----------------------------------------------------

@dataclass(frozen=True)
class ToralSuspension:
    matrix: tuple
    roof: Roof = field(default_factory=Roof)

    def __post_init__(self):
        m = tuple(int(x) for x in np.asarray(self.matrix).ravel())
        if len(m) != 4:
            raise ValidationError("suspension matrix must be 2x2")
        object.__setattr__(self, "matrix", m)
        a, b, c, d = m
        if a * d - b * c != 1:
            raise ValidationError(f"det A = {a * d - b * c}, expected 1")
        if abs(a + d) < 3:
            raise ValidationError(f"|trace A| = {abs(a + d)} < 3, not hyperbolic")

    @property
    def A(self):
        return np.array(self.matrix, dtype=np.int64).reshape(2, 2)

    @property
    def trace(self):
        return self.matrix[0] + self.matrix[3]

    @property
    def expansion(self):
        """Modulus of the unstable eigenvalue."""
        t = abs(self.trace)
        return (t + math.sqrt(t * t - 4)) / 2.0

    @property
    def entropy(self):
        return math.log(self.expansion)

    @property
    def coker_order(self):
        """Order of coker(A - I), i.e. the number of fixed points."""
        return periodic_point_count(self.matrix, 1)

    def to_spec(self):
        return {"type": "cat-suspension", "matrix": list(self.matrix), "roof": self.roof.to_spec()}


@dataclass(frozen=True)
class FlatTorusModel:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"torus dimension must be an integer >= 2, got {self.n}")

    def to_spec(self):
        return {"type": "flat-torus", "n": self.n}


@dataclass(frozen=True)
class EllipsoidModel:
    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ValidationError(f"need 0 < a < b, got a={self.a}, b={self.b}")
        ratio = self.a / self.b
        approx = Fraction(ratio).limit_denominator(10**6)
        if abs(ratio - approx) < RATIONAL_TOL:
            raise ValidationError(f"a/b is numerically rational (close to {approx})")

    def to_spec(self):
        return {"type": "ellipsoid", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class SyntheticModel:
    """Simple hyperbolic orbits with prescribed indices and periods, class 0."""

    orbits: tuple  # ((index, period), ...)

    def __post_init__(self):
        orbits = tuple((int(i), float(p)) for i, p in self.orbits)
        if any(p <= 0 for _, p in orbits):
            raise ValidationError("synthetic periods must be positive")
        object.__setattr__(self, "orbits", orbits)

    def to_spec(self):
        return {
            "type": "synthetic",
            "orbits": [{"index": i, "period": p} for i, p in self.orbits],
        }


def _require(spec, key, kind=None):
    if key not in spec:
        raise ConfigError(key, "missing")
    value = spec[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(key, f"expected {kind}, got {type(value).__name__}")
    return value


def roof_from_spec(spec):
    if not isinstance(spec, dict):
        raise ConfigError("roof", "expected an object")
    kind = spec.get("kind")
    try:
        if kind == "const":
            return Roof(float(_require(spec, "value", (int, float))))
        if kind == "trig":
            terms = []
            for i, t in enumerate(spec.get("terms", [])):
                k = t.get("k")
                if not isinstance(k, list) or len(k) != 2:
                    raise ConfigError(f"roof.terms[{i}].k", "expected a pair of integers")
                terms.append((int(k[0]), int(k[1]), float(t.get("cos", 0.0)), float(t.get("sin", 0.0))))
            return Roof(float(spec.get("constant", 0.0)), tuple(terms),
                        spec.get("min"), spec.get("max"))
    except ValidationError as exc:
        raise ConfigError("roof", str(exc)) from exc
    raise ConfigError("roof.kind", f"unknown roof kind {kind!r}")


def model_from_spec(spec):
    """Build a model from its JSON description, naming the bad field on error."""
    if not isinstance(spec, dict):
        raise ConfigError("model", "expected a JSON object")
    kind = spec.get("type")
    try:
        if kind == "cat-suspension":
            matrix = _require(spec, "matrix", list)
            if len(matrix) != 4 or not all(isinstance(x, int) for x in matrix):
                raise ConfigError("matrix", "expected four integers")
            roof = roof_from_spec(spec.get("roof", {"kind": "const", "value": 1.0}))
            return ToralSuspension(tuple(matrix), roof)
        if kind == "flat-torus":
            return FlatTorusModel(_require(spec, "n", int))
        if kind == "ellipsoid":
            return EllipsoidModel(float(_require(spec, "a", (int, float))),
                                  float(_require(spec, "b", (int, float))))
        if kind == "synthetic":
            orbits = _require(spec, "orbits", list)
            try:
                pairs = tuple((o["index"], o.get("period", 1.0)) for o in orbits)
            except (TypeError, KeyError) as exc:
                raise ConfigError("orbits", "each orbit needs an integer 'index'") from exc
            return SyntheticModel(pairs)
    except ValidationError as exc:
        raise ConfigError(kind, str(exc)) from exc
    raise ConfigError("type", f"unknown model type {kind!r}")


def scaled_model(model, c):
    """The model whose contact form (or roof) is multiplied by ``c``."""
    if isinstance(model, ToralSuspension):
        return ToralSuspension(model.matrix, model.roof.scaled(c))
    if isinstance(model, EllipsoidModel):
        return EllipsoidModel(model.a * c, model.b * c)
    if isinstance(model, SyntheticModel):
        return SyntheticModel(tuple((i, p * c) for i, p in model.orbits))
    raise ValidationError(f"scaling not supported for {type(model).__name__}")


# --- integer arithmetic for toral automorphisms ----------------------------

def _mat(A):
    a = tuple(int(x) for x in np.asarray(A).ravel())
    if len(a) != 4:
        raise ValidationError("expected a 2x2 integer matrix")
    return a


def _matmul(X, Y):
    a, b, c, d = X
    e, f, g, h = Y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def matrix_power(A, k):
    """Exact power of a 2x2 integer matrix (Python integers)."""
    result, base = (1, 0, 0, 1), _mat(A)
    while k:
        if k & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        k >>= 1
    return result


@lru_cache(maxsize=None)
def _traces(A, k):
    t1 = A[0] + A[3]
    seq = [2, t1]
    for _ in range(k - 1):
        seq.append(t1 * seq[-1] - seq[-2])
    return tuple(seq)


def trace_power(A, k):
    """``trace(A^k)`` via ``t_k = t t_{k-1} - t_{k-2}``."""
    return _traces(_mat(A), max(int(k), 1))[k]


def periodic_point_count(A, k):
    """``|Fix(A^k)| = |det(A^k - I)| = |trace(A^k) - 2|`` as an exact integer."""
    if int(k) != k or k < 1:
        raise ValidationError(f"period must be a positive integer, got {k}")
    return abs(trace_power(A, int(k)) - 2)


def smith_normal_form(M):
    """Smith form ``D = U M V`` of a small integer matrix.

    Returns ``(D, U, V)`` as nested lists of Python integers with ``U``, ``V``
    unimodular and ``D`` diagonal, each diagonal entry dividing the next.
    """
    D = [list(map(int, row)) for row in np.asarray(M, dtype=object)]
    n, m = len(D), len(D[0])
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(X, i, j):
        X[i], X[j] = X[j], X[i]

    def swap_cols(X, i, j):
        for row in X:
            row[i], row[j] = row[j], row[i]

    def add_row(X, src, dst, q):  # row_dst -= q row_src
        X[dst] = [x - q * y for x, y in zip(X[dst], X[src])]

    def add_col(X, src, dst, q):  # col_dst -= q col_src
        for row in X:
            row[dst] -= q * row[src]

    for t in range(min(n, m)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, n) for j in range(t, m) if D[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(D, t, i), swap_rows(U, t, i)
            swap_cols(D, t, j), swap_cols(V, t, j)
            p = D[t][t]
            done = True
            for i in range(t + 1, n):
                q = D[i][t] // p
                add_row(D, t, i, q), add_row(U, t, i, q)
                done &= D[i][t] == 0
            for j in range(t + 1, m):
                q = D[t][j] // p
                add_col(D, t, j, q), add_col(V, t, j, q)
                done &= D[t][j] == 0
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, n) for j in range(t + 1, m) if D[i][j] % p]
            if not bad:
                break
            i, _ = bad[0]
            add_row(D, i, t, -1), add_row(U, i, t, -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return D, U, V


def fixed_points(A, k):
    """All solutions of ``(A^k - I) x = 0 mod Z^2`` as integer numerators over ``q``.

    Returns ``(points, q)`` with ``points`` an ``(N, 2)`` int64 array; the
    points are ``points / q`` and ``N = periodic_point_count(A, k)``.
    """
    a, b, c, d = matrix_power(A, k)
    D, _, V = smith_normal_form([[a - 1, b], [c, d - 1]])
    d1, d2 = D[0][0], D[1][1]
    if d1 == 0 or d2 == 0:
        raise ValidationError("A^k - I is singular; A is not hyperbolic")
    q = d2
    j1, j2 = np.meshgrid(np.arange(d1, dtype=np.int64) * (d2 // d1),
                         np.arange(d2, dtype=np.int64), indexing="ij")
    y = np.stack([j1.ravel(), j2.ravel()])
    Vm = np.array([[V[0][0] % q, V[0][1] % q], [V[1][0] % q, V[1][1] % q]], dtype=np.int64)
    pts = (Vm @ y) % q
    return pts.T.copy(), q


def _apply_mod(Am, pts, q):
    x, y = pts[:, 0], pts[:, 1]
    return np.stack([(Am[0] * x + Am[1] * y) % q, (Am[2] * x + Am[3] * y) % q], axis=1)


def _prime_factors(m):
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def _least_period_orbits(args):
    """Orbits of least period ``m``: (representative numerators, q, Birkhoff sums)."""
    A, m, roof = args
    pts, q = fixed_points(A, m)
    keep = np.ones(len(pts), dtype=bool)
    for p in _prime_factors(m):
        Ad = tuple(x % q for x in matrix_power(A, m // p))
        img = _apply_mod(Ad, pts, q)
        keep &= np.any(img != pts, axis=1)
    pts = pts[keep]
    if len(pts) == 0:
        return m, np.zeros((0, 2), dtype=np.int64), q, np.zeros(0)
    Am = tuple(x % q for x in A)
    cur = pts
    best = cur[:, 0] * q + cur[:, 1]
    sums = np.zeros(len(pts))
    for _ in range(m):
        sums += roof(cur[:, 0] / q, cur[:, 1] / q)
        cur = _apply_mod(Am, cur, q)
        best = np.minimum(best, cur[:, 0] * q + cur[:, 1])
    code = pts[:, 0] * q + pts[:, 1]
    is_rep = code == best
    order = np.argsort(code[is_rep], kind="stable")
    return m, pts[is_rep][order], q, sums[is_rep][order]


@dataclass(frozen=True)
class MapOrbit:
    point: tuple  # (Fraction, Fraction) in [0, 1)^2
    period: int
    label: int
    birkhoff_sum: float = 0.0

    @property
    def key(self):
        return f"m{self.period}:{self.point[0]}:{self.point[1]}"


def _check_cap(A, max_period, cap):
    total = sum(periodic_point_count(A, k) for k in range(1, max_period + 1))
    if total > cap:
        raise ResourceError(
            f"enumerating periods <= {max_period} needs {total} points, cap is {cap}"
        )


def _orbit_batches(A, max_period, roof, cap, workers):
    A = _mat(A)
    if max_period < 1:
        return []
    _check_cap(A, max_period, cap)
    return pmap(_least_period_orbits, [(A, m, roof) for m in range(1, max_period + 1)], workers)


def enumerate_map_orbits(A, max_period, cap=ENUMERATION_CAP, roof=None, workers=None):
    """Periodic orbits of the toral automorphism ``A`` with least period <= ``max_period``.

    Sorted by least period, then by representative.  Each representative is
    the lexicographically smallest point of its orbit.
    """
    if int(max_period) != max_period or max_period < 1:
        raise ValidationError(f"max_period must be a positive integer, got {max_period}")
    roof = roof or Roof()
    out = []
    for m, reps, q, sums in _orbit_batches(A, int(max_period), roof, cap, workers):
        for (x, y), s in zip(reps.tolist(), sums.tolist()):
            out.append(MapOrbit((Fraction(x, q), Fraction(y, q)), m, m, s))
    return out


def least_period_orbit_counts(A, max_period):
    """Number of orbits of each least period, by Moebius-free recursion on ``Fix``."""
    counts = {}
    for m in range(1, max_period + 1):
        pts = periodic_point_count(A, m) - sum(d * counts[d] for d in counts if m % d == 0)
        counts[m] = pts // m
    return counts


# --- suspension flows ------------------------------------------------------

def _suspension_parity(A, n):
    # det(I - A^n) = 2 - trace(A^n); half-dimension 1
    return Parity.EVEN if trace_power(A, n) > 2 else Parity.ODD


def _max_map_period(roof, T):
    return int(math.floor(T * (1 + PERIOD_SLACK) / roof.min))


def suspension_census(model, T, cap=ENUMERATION_CAP, workers=None):
    """All (simple orbit, iterate) pairs of the suspension flow with period <= ``T``.

    Indices are the 0/1 lift of the parity (``grading == "parity-level"``);
    class labels are the degree in the base circle, ``k * m``.
    """
    if not T > 0:
        raise ValidationError(f"truncation must be positive, got {T}")
    A = model.matrix
    limit = T * (1 + PERIOD_SLACK)
    records = []
    for m, reps, q, sums in _orbit_batches(A, _max_map_period(model.roof, T), model.roof, cap, workers):
        for (x, y), s in zip(reps.tolist(), sums.tolist()):
            sid = f"m{m}:{x}/{q},{y}/{q}"
            k = 1
            while k * s <= limit:
                par = _suspension_parity(A, k * m)
                records.append(OrbitRecord(
                    simple_id=sid, iterate=k, period=k * s, class_label=k * m,
                    cz_parity=par, cz_index=par.value, orbit_type="hyperbolic",
                ))
                k += 1
    return CensusTable(
        model=model.to_spec(), truncation=float(T), records=tuple(classify_all(records)),
        grading="parity-level", label_coarsened=model.coker_order != 1,
    )


def suspension_count(model, T):
    """Exact ``(P_T, Pg_T)`` for a constant roof, from trace counts alone."""
    if not model.roof.is_constant:
        raise ValidationError("closed-form counts need a constant roof")
    c = model.roof.constant
    n_max = int(math.floor(T * (1 + PERIOD_SLACK) / c))
    orbits = least_period_orbit_counts(model.matrix, n_max) if n_max >= 1 else {}
    negative = model.trace < 0
    P = Pg = 0
    for m, cnt in orbits.items():
        kmax = n_max // m
        P += cnt * kmax
        if negative and m % 2:
            # odd m: simple orbit is Odd, even iterates are Even and therefore bad
            Pg += cnt * (kmax - kmax // 2)
        else:
            Pg += cnt * kmax
    return P, Pg


def anosov_cone_check(model, t_max, samples):
    """Largest excess of ``|dphi_t v_s|`` over the uniform contraction rate.

    Norms use the adapted metric on the mapping torus in which the stable
    eigenline shrinks by exactly ``lambda_max^{-s}`` over height fraction
    ``s``.  The bound compared against is ``lambda_max^{-t / max roof}``.
    """
    if int(samples) != samples or samples < 1:
        raise ValidationError(f"samples must be a positive integer, got {samples}")
    A = model.A.astype(float)
    w, vecs = np.linalg.eig(A)
    order = np.argsort(-np.abs(w.real))
    lam_u = abs(w.real[order[0]])
    basis = vecs.real[:, order]  # columns: unstable, stable
    v_s = basis[:, 1] / np.linalg.norm(basis[:, 1])
    rmax = model.roof.max
    golden = (math.sqrt(5) - 1) / 2
    worst = -np.inf
    for i in range(int(samples)):
        x = np.array([(i * (math.sqrt(2) - 1)) % 1.0, (i * (math.sqrt(3) - 1)) % 1.0])
        f0 = (i * golden) % 1.0
        t = t_max * (i + 1) / samples
        r = float(model.roof(x[0], x[1]))
        height, left, n = f0 * r, t, 0
        while height + left >= r:
            left -= r - height
            height = 0.0
            x = (A @ x) % 1.0
            r = float(model.roof(x[0], x[1]))
            n += 1
        f1 = (height + left) / r
        img = np.linalg.matrix_power(A, n) @ v_s
        cu, cs = np.linalg.solve(basis, img)
        final = math.hypot(cs * lam_u ** (-f1), cu * lam_u ** f1)
        initial = lam_u ** (-f0) * abs(np.linalg.solve(basis, v_s)[1])
        worst = max(worst, final / initial - lam_u ** (-t / rmax))
    return float(worst)


# --- flat torus ------------------------------------------------------------

def _radius_squared(T):
    return int(math.floor(T * T * (1 + PERIOD_SLACK)))


@lru_cache(maxsize=None)
def _ball_count(n, r2):
    if r2 < 0:
        return 0
    if n == 1:
        return 2 * math.isqrt(r2) + 1
    r = math.isqrt(r2)
    return sum(_ball_count(n - 1, r2 - x * x) for x in range(-r, r + 1))


def flat_torus_count(model, T):
    """Number of Morse-Bott components with period <= ``T``: nonzero ``v`` in Z^n, ``|v| <= T``."""
    if not T > 0:
        raise ValidationError(f"truncation must be positive, got {T}")
    return _ball_count(model.n, _radius_squared(T)) - 1


def flat_torus_components(model, T):
    """Nonzero lattice vectors with ``|v| <= T``, sorted by (norm, lexicographic)."""
    if not T > 0:
        raise ValidationError(f"truncation must be positive, got {T}")
    r2 = _radius_squared(T)
    r = math.isqrt(r2)
    axes = [np.arange(-r, r + 1)] * model.n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, model.n)
    norm2 = np.sum(grid * grid, axis=1)
    keep = (norm2 <= r2) & (norm2 > 0)
    grid, norm2 = grid[keep], norm2[keep]
    order = np.lexsort(tuple(grid[:, i] for i in reversed(range(model.n))) + (norm2,))
    return grid[order]


def perturbed_flat_torus_count(model, T, crit_count=None):
    """Non-degenerate orbits of the Morse-Bott perturbation: ``crit_count * #components``."""
    minimum = 2 ** (model.n - 1)
    crit_count = minimum if crit_count is None else int(crit_count)
    if crit_count < minimum:
        raise ValidationError(
            f"a Morse function on T^{model.n - 1} has at least {minimum} critical points"
        )
    return crit_count * flat_torus_count(model, T)


# --- ellipsoid -------------------------------------------------------------

def ellipsoid_index(model, family, k):
    """CZ index of ``gamma_family^k`` from the crossing-form engine plus ``2k``."""
    period = k * (model.a if family == 1 else model.b)
    other = model.b if family == 1 else model.a
    path = rotation_path(period / other, duration=period)
    return cz_index(path).index + 2 * k


def ellipsoid_floor_index(model, family, k):
    ratio = model.a / model.b if family == 1 else model.b / model.a
    return 2 * (k + math.floor(k * ratio)) + 1


def _ellipsoid_record(args):
    model, family, k = args
    mu = ellipsoid_index(model, family, k)
    period = k * (model.a if family == 1 else model.b)
    return OrbitRecord(
        simple_id=f"gamma{family}", iterate=k, period=period, class_label=0,
        cz_parity=Parity.of(mu), cz_index=mu, orbit_type="elliptic",
    )


def ellipsoid_truncation_for_degree(model, max_degree):
    """Smallest truncation whose census contains every orbit of index <= ``max_degree``."""
    return (max_degree + 1) / (2.0 * (1.0 / model.a + 1.0 / model.b)) + 1e-9


def ellipsoid_census(model, T, workers=None):
    if not T > 0:
        raise ValidationError(f"truncation must be positive, got {T}")
    limit = T * (1 + PERIOD_SLACK)
    jobs = [(model, 1, k) for k in range(1, int(limit // model.a) + 1)]
    jobs += [(model, 2, k) for k in range(1, int(limit // model.b) + 1)]
    records = pmap(_ellipsoid_record, jobs, workers)
    return CensusTable(model=model.to_spec(), truncation=float(T),
                       records=tuple(classify_all(records)))


# --- synthetic -------------------------------------------------------------

def synthetic_census(model, T):
    """Iterates ``g_i^j`` with index ``j mu_i`` and period ``j p_i`` up to ``T``."""
    limit = T * (1 + PERIOD_SLACK)
    records = []
    for i, (mu, period) in enumerate(model.orbits):
        j = 1
        while j * period <= limit:
            records.append(OrbitRecord(
                simple_id=f"h{i}", iterate=j, period=j * period, class_label=0,
                cz_parity=Parity.of(j * mu), cz_index=j * mu, orbit_type="hyperbolic",
            ))
            j += 1
    return CensusTable(model=model.to_spec(), truncation=float(T),
                       records=tuple(classify_all(records)))


def build_census(model, T, workers=None, cap=ENUMERATION_CAP):
    if isinstance(model, ToralSuspension):
        return suspension_census(model, T, cap=cap, workers=workers)
    if isinstance(model, EllipsoidModel):
        return ellipsoid_census(model, T, workers=workers)
    if isinstance(model, SyntheticModel):
        return synthetic_census(model, T)
    raise ValidationError(
        f"{type(model).__name__} has no orbit census; only counts are available"
    )


def orbit_count(model, T, cap=ENUMERATION_CAP, workers=None):
    """``(P_T, Pg_T)`` by the cheapest exact route available for the model."""
    if isinstance(model, ToralSuspension) and model.roof.is_constant:
        return suspension_count(model, T)
    if isinstance(model, FlatTorusModel):
        c = perturbed_flat_torus_count(model, T)
        return c, c
    if isinstance(model, EllipsoidModel):
        limit = T * (1 + PERIOD_SLACK)
        c = int(limit // model.a) + int(limit // model.b)
        return c, c
    return build_census(model, T, workers=workers, cap=cap).counts
