import math
from fractions import Fraction

import numpy as np
import pytest

from anosovsh.errors import ConfigError, ResourceError, ValidationError
from anosovsh.models import (
    EllipsoidModel,
    FlatTorusModel,
    Roof,
    ToralSuspension,
    anosov_cone_check,
    build_census,
    ellipsoid_census,
    ellipsoid_floor_index,
    ellipsoid_index,
    enumerate_map_orbits,
    fixed_points,
    flat_torus_components,
    flat_torus_count,
    least_period_orbit_counts,
    matrix_power,
    model_from_spec,
    orbit_count,
    periodic_point_count,
    perturbed_flat_torus_count,
    smith_normal_form,
    suspension_census,
    suspension_count,
    trace_power,
)
from anosovsh.symplin import Parity

from conftest import CAT, NEG_CAT


def brute_fixed_points(A, k):
    """Fixed points of A^k on the torus, found by scanning the grid (1/N) Z^2."""
    a, b, c, d = matrix_power(A, k)
    N = abs((a - 1) * (d - 1) - b * c)
    pts = set()
    for i in range(N):
        for j in range(N):
            if ((a - 1) * i + b * j) % N == 0 and (c * i + (d - 1) * j) % N == 0:
                pts.add((Fraction(i, N), Fraction(j, N)))
    return pts


def moebius(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def moebius_orbits(A, m):
    return sum(moebius(m // d) * periodic_point_count(A, d) for d in range(1, m + 1) if m % d == 0) // m


# --- integer arithmetic --------------------------------------------------------

@pytest.mark.parametrize("k, expected", [(1, 1), (2, 5), (3, 16)])
def test_periodic_point_count_cat(k, expected):
    assert periodic_point_count(CAT, k) == expected


def test_periodic_point_count_zero_period():
    with pytest.raises(ValidationError):
        periodic_point_count(CAT, 0)


def test_trace_recurrence_exact_big():
    # Lucas numbers: trace(A^k) = L_{2k}
    L = [2, 1]
    for _ in range(400):
        L.append(L[-1] + L[-2])
    for k in (10, 50, 200):
        assert trace_power(CAT, k) == L[2 * k]
        a, b, c, d = matrix_power(CAT, k)
        assert a + d == L[2 * k] and a * d - b * c == 1


def test_negative_cat_counts():
    # trace(A'^k) = (-1)^k L_{2k}
    assert [periodic_point_count(NEG_CAT, k) for k in (1, 2, 3)] == [5, 5, 20]


def test_smith_normal_form():
    M = [[4, 6], [6, 4]]
    D, U, V = smith_normal_form(M)
    assert D == [[2, 0], [0, 10]]
    prod = np.array(U, dtype=object) @ np.array(M, dtype=object) @ np.array(V, dtype=object)
    assert prod.tolist() == D
    assert abs(round(np.linalg.det(np.array(U, dtype=float)))) == 1
    assert abs(round(np.linalg.det(np.array(V, dtype=float)))) == 1


@pytest.mark.parametrize("A", [CAT, NEG_CAT, (3, 2, 1, 1), (5, 2, 2, 1)])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_fixed_points_match_grid_scan(A, k):
    pts, q = fixed_points(A, k)
    found = {(Fraction(int(x), q), Fraction(int(y), q)) for x, y in pts}
    assert len(found) == len(pts) == periodic_point_count(A, k)
    assert found == brute_fixed_points(A, k)


# --- orbit enumeration -------------------------------------------------------

def test_enumerate_period_one():
    orbits = enumerate_map_orbits(CAT, 1)
    assert len(orbits) == 1
    assert orbits[0].point == (0, 0) and orbits[0].period == 1


def test_enumerate_period_two_and_three():
    by_period = {}
    for o in enumerate_map_orbits(CAT, 3):
        by_period[o.period] = by_period.get(o.period, 0) + 1
    assert by_period == {1: 1, 2: 2, 3: 5}


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        enumerate_map_orbits(CAT, 20, cap=1000)


@pytest.mark.parametrize("A", [CAT, NEG_CAT, (3, 1, 2, 1)])
def test_orbit_counts_match_moebius(A):
    got = least_period_orbit_counts(A, 12)
    assert got == {m: moebius_orbits(A, m) for m in range(1, 13)}
    enumerated = {}
    for o in enumerate_map_orbits(A, 7):
        enumerated[o.period] = enumerated.get(o.period, 0) + 1
    assert enumerated == {m: got[m] for m in range(1, 8) if got[m]}


@pytest.mark.parametrize("A", [CAT, NEG_CAT])
def test_trace_count_consistency(A):
    counts = least_period_orbit_counts(A, 15)
    for k in range(1, 16):
        assert sum(m * counts[m] for m in counts if k % m == 0) == periodic_point_count(A, k)


def test_orbit_representatives_are_minimal():
    for o in enumerate_map_orbits(CAT, 5):
        x = o.point
        A = np.array(CAT, dtype=object).reshape(2, 2)
        cur = x
        for _ in range(o.period):
            cur = tuple((A[i, 0] * cur[0] + A[i, 1] * cur[1]) % 1 for i in range(2))
            assert x <= cur
        assert cur == x


# --- suspension census ---------------------------------------------------------

def test_cat_census_t3(cat):
    table = suspension_census(cat, 3)
    assert table.counts == (10, 10)
    assert table.grading == "parity-level"
    assert not table.label_coarsened


def test_cat_census_t5(cat):
    assert suspension_census(cat, 5).counts == (48, 48)


def test_cat_census_short_truncation_empty(cat):
    assert suspension_census(cat, 0.5).records == ()


def test_census_counts_match_closed_form(cat, neg_cat):
    for model in (cat, neg_cat):
        for T in (1, 2, 3.5, 6, 8):
            assert build_census(model, T).counts == suspension_count(model, T)


def test_negative_cat_labels_coarsened(neg_cat):
    assert suspension_census(neg_cat, 1).label_coarsened


def test_constant_roof_scales_periods(cat):
    base = suspension_census(cat, 4)
    scaled = suspension_census(ToralSuspension(CAT, Roof(2.5)), 10)
    assert len(base.records) == len(scaled.records)
    for a, b in zip(base.records, scaled.records):
        assert (a.simple_id, a.iterate, a.cz_parity) == (b.simple_id, b.iterate, b.cz_parity)
        assert math.isclose(2.5 * a.period, b.period, rel_tol=1e-12)


@pytest.mark.parametrize("matrix", [CAT, NEG_CAT, (-3, -1, 1, 0)])
def test_parity_rule(matrix):
    model = ToralSuspension(matrix)
    positive = model.trace > 0
    for r in suspension_census(model, 6).records:
        A = np.array(matrix_power(matrix, r.class_label), dtype=float).reshape(2, 2)
        assert (r.cz_parity == Parity.EVEN) == bool(np.all(np.linalg.eigvals(A).real > 0))
        assert (r.cz_parity == Parity.EVEN) == (r.class_label % 2 == 0 or positive)


def test_trig_roof_periods_are_birkhoff_sums(trig_cat):
    table = suspension_census(trig_cat, 4)
    for r in table.records:
        if r.iterate == 1:
            x = [Fraction(s) for s in r.simple_id.split(":")[1].split(",")]
            total, pt = 0.0, x
            for _ in range(r.class_label):
                total += 1.0 + 0.3 * math.cos(2 * math.pi * float(pt[0]))
                pt = ((2 * pt[0] + pt[1]) % 1, (pt[0] + pt[1]) % 1)
            assert math.isclose(total, r.period, rel_tol=1e-12)


def test_matrix_validation():
    with pytest.raises(ValidationError):
        ToralSuspension((1, 1, 0, 1))
    with pytest.raises(ValidationError):
        ToralSuspension((2, 1, 1, 2))


def test_model_spec_errors_name_field():
    with pytest.raises(ConfigError, match="matrix"):
        model_from_spec({"type": "cat-suspension", "matrix": [2, 1, 1]})
    with pytest.raises(ConfigError, match="type"):
        model_from_spec({"type": "sphere"})


# --- cone check --------------------------------------------------------------

def test_cone_check_cat(cat):
    assert anosov_cone_check(cat, 10, 200) <= 1e-8


def test_cone_check_negative_trace(neg_cat):
    assert anosov_cone_check(neg_cat, 10, 200) <= 1e-8


def test_cone_check_trig_roof(trig_cat):
    assert anosov_cone_check(trig_cat, 10, 200) <= 1e-8


def test_cone_check_samples_zero(cat):
    with pytest.raises(ValidationError):
        anosov_cone_check(cat, 10, 0)


# --- flat torus --------------------------------------------------------------

def brute_lattice(n, T):
    r = int(T)
    grid = np.stack(np.meshgrid(*[np.arange(-r, r + 1)] * n, indexing="ij"), -1).reshape(-1, n)
    norm2 = (grid ** 2).sum(1)
    return int(((norm2 > 0) & (norm2 <= T * T)).sum())


@pytest.mark.parametrize("T, expected", [(1, 4), (2.5, 20), (0.5, 0)])
def test_flat_torus_components(T, expected):
    comps = flat_torus_components(FlatTorusModel(2), T)
    assert len(comps) == expected
    assert {tuple(v) for v in comps} == {tuple(-v) for v in comps}


def test_flat_torus_unit_vectors():
    assert {tuple(v) for v in flat_torus_components(FlatTorusModel(2), 1)} == {(1, 0), (-1, 0), (0, 1), (0, -1)}


@pytest.mark.parametrize("n, T", [(2, 7.3), (3, 5.0), (4, 3.2), (2, 30)])
def test_flat_torus_count_matches_brute_force(n, T):
    assert flat_torus_count(FlatTorusModel(n), T) == brute_lattice(n, T)


def test_flat_torus_volume_growth():
    ratio = flat_torus_count(FlatTorusModel(2), 200) / (math.pi * 200 ** 2)
    assert 0.9 <= ratio <= 1.1


def test_perturbed_counts():
    assert perturbed_flat_torus_count(FlatTorusModel(3), 1, 4) == 24
    assert perturbed_flat_torus_count(FlatTorusModel(2), 2.5, 2) == 40
    with pytest.raises(ValidationError):
        perturbed_flat_torus_count(FlatTorusModel(2), 1, 1)


def test_flat_torus_has_no_census():
    with pytest.raises(ValidationError):
        build_census(FlatTorusModel(2), 3)
    assert orbit_count(FlatTorusModel(2), 1) == (8, 8)


# --- ellipsoid ---------------------------------------------------------------

def test_ellipsoid_first_orbit(ellipsoid):
    table = ellipsoid_census(ellipsoid, 1.05)
    assert [(r.simple_id, r.iterate, r.cz_index) for r in table.records] == [("gamma1", 1, 3)]


def test_ellipsoid_t_2_1(ellipsoid):
    table = ellipsoid_census(ellipsoid, 2.1)
    assert sorted(r.cz_index for r in table.records) == [3, 5, 7]
    assert {(r.simple_id, r.iterate): r.cz_index for r in table.records} == {
        ("gamma1", 1): 3, ("gamma2", 1): 5, ("gamma1", 2): 7}


def test_ellipsoid_empty(ellipsoid):
    assert ellipsoid_census(ellipsoid, 0.5).records == ()


def test_ellipsoid_rational_guard():
    with pytest.raises(ValidationError):
        EllipsoidModel(1.0, 2.0)
    with pytest.raises(ValidationError):
        EllipsoidModel(2.0, 1.0)


def test_ellipsoid_engine_matches_floor_formula(ellipsoid):
    table = ellipsoid_census(ellipsoid, 30)
    for r in table.records:
        family = 1 if r.simple_id == "gamma1" else 2
        assert r.cz_index == ellipsoid_floor_index(ellipsoid, family, r.iterate)
        assert r.good and r.cz_parity == Parity.ODD


@pytest.mark.slow
def test_ellipsoid_engine_matches_floor_formula_t60(ellipsoid):
    table = ellipsoid_census(ellipsoid, 60)
    assert len(table.records) == 60 + 42
    for r in table.records:
        family = 1 if r.simple_id == "gamma1" else 2
        assert r.cz_index == ellipsoid_floor_index(ellipsoid, family, r.iterate)


def test_ellipsoid_other_ratio():
    model = EllipsoidModel(1.0, math.pi / 2)
    for family, k in [(1, 1), (1, 5), (2, 3), (2, 7)]:
        assert ellipsoid_index(model, family, k) == ellipsoid_floor_index(model, family, k)
