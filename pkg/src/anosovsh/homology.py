"""Degenerate E² page built from a census, and the obstruction analyzers.

Under an invariant Lagrangian subbundle every differential vanishes, so
ranks are plain counts of good orbits per (class label, degree).  Degrees
are total degrees; the bigrading is not tracked.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .serialize import dumps
from .symplin import Parity

__all__ = [
    "E2Page",
    "RankTable",
    "ClassVerdict",
    "Finding",
    "Report",
    "build_e2_page",
    "degeneration_check",
    "sphere_obstruction_analyzer",
    "bounded_homology_analyzer",
    "sphere_target",
    "iterate_is_good",
]

MATCH = "MATCH"
MISMATCH = "MISMATCH"
PARITY_CONTRADICTION = "PARITY_CONTRADICTION"
MULTIPLICITY_CONFLICT = "MULTIPLICITY_CONFLICT"
OBSTRUCTION_CONFIRMED = "OBSTRUCTION_CONFIRMED"
INSUFFICIENT_DATA = "INSUFFICIENT_DATA"

# finding codes that make an analyzer exit with status 2
OBSTRUCTION_CODES = frozenset({MISMATCH, PARITY_CONTRADICTION, MULTIPLICITY_CONFLICT,
                               OBSTRUCTION_CONFIRMED})

MIN_SPHERE_DEGREE = 3


@dataclass(frozen=True)
class E2Page:
    truncation: float
    ranks: dict                  # {(class_label, degree): rank}, zero ranks omitted
    grading: str = "integer"
    label_coarsened: bool = False

    @property
    def total(self):
        return sum(self.ranks.values())

    @property
    def classes(self):
        return sorted({a for a, _ in self.ranks})

    def degrees(self, label):
        """``{degree: rank}`` for one class, sorted by degree."""
        return {k: r for (a, k), r in sorted(self.ranks.items()) if a == label}

    def rank(self, label, degree):
        return self.ranks.get((label, degree), 0)

    def rows(self):
        return [(a, k, r) for (a, k), r in sorted(self.ranks.items())]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("class_label", "degree", "rank"))
        w.writerows(self.rows())
        return buf.getvalue()


def build_e2_page(table):
    """Ranks ``rank(a, k)`` = number of good records with label ``a`` and index ``k``.

    Raises
    ------
    ValidationError
        Some good record has no index.
    """
    missing = [f"{r.simple_id}^{r.iterate}" for r in table.records
               if r.good and r.cz_index is None]
    if missing:
        shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        raise ValidationError(f"{len(missing)} good records lack an index: {shown}")
    ranks = {}
    for r in table.records:
        if r.good:
            key = (r.class_label, r.cz_index)
            ranks[key] = ranks.get(key, 0) + 1
    page = E2Page(float(table.truncation), dict(sorted(ranks.items())),
                  table.grading, table.label_coarsened)
    # independent second pass in reverse order
    if page.total != sum(1 for r in reversed(table.records) if r.good):
        raise ValidationError("page total disagrees with the good-record count")
    return page


@dataclass(frozen=True)
class RankTable:
    class_label: int
    ranks: dict          # {degree: rank}
    coherent: bool = True


@dataclass(frozen=True)
class ClassVerdict:
    class_label: int
    coherent: bool
    parity: object                  # Parity when coherent, else None
    rank_table: object = None       # RankTable when coherent
    orientability_violation: bool = False


def degeneration_check(page, all_orientable=None):
    """Per-class parity coherence of the page.

    A coherent class degenerates, and its rank table equals the page.  When
    ``all_orientable`` is true, class 0 must moreover be coherently Even.

    Returns
    -------
    dict
        ``{class_label: ClassVerdict}``.
    """
    out = {}
    for a in page.classes:
        ranks = page.degrees(a)
        parities = {Parity.of(k) for k in ranks}
        coherent = len(parities) == 1
        parity = next(iter(parities)) if coherent else None
        violation = bool(all_orientable) and a == 0 and parity != Parity.EVEN
        table = RankTable(a, ranks) if coherent else None
        out[a] = ClassVerdict(a, coherent, parity, table, violation)
    return out


@dataclass(frozen=True)
class Finding:
    code: str
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Report:
    analyzer: str
    findings: tuple
    meta: dict = field(default_factory=dict)

    @property
    def codes(self):
        return [f.code for f in self.findings]

    @property
    def obstruction(self):
        return any(c in OBSTRUCTION_CODES for c in self.codes)

    def to_dict(self):
        return {
            "analyzer": self.analyzer,
            "obstruction": self.obstruction,
            "findings": [{"code": f.code, **f.detail} for f in self.findings],
            **self.meta,
        }

    def to_json(self):
        return dumps(self.to_dict()) + "\n"


def sphere_target(max_degree):
    """Ranks of the ball: one generator in each odd degree from 3 to ``max_degree``."""
    return {k: 1 for k in range(MIN_SPHERE_DEGREE, max_degree + 1, 2)}


def _is_prime(n):
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def iterate_is_good(simple_index, j):
    """Goodness of the ``j``-th iterate of a hyperbolic orbit (index ``j mu``)."""
    return not (j % 2 == 0 and Parity.of(j * simple_index) != Parity.of(simple_index))


def _simple_hyperbolic(table):
    return [r for r in table.records
            if r.iterate == 1 and r.orbit_type == "hyperbolic"]


def sphere_obstruction_analyzer(page, max_degree, census=None):
    """Compare a single-class page with the ranks of the ball up to ``max_degree``.

    Findings: ``MATCH`` or ``MISMATCH`` against the target; ``PARITY_CONTRADICTION``
    when the page is coherently Even; ``MULTIPLICITY_CONFLICT`` for each pair of
    simple hyperbolic orbits (taken from ``census``) with distinct prime indices
    ``p, q >= 3`` whose iterates put rank at least 2 in degree ``p q``.

    Raises
    ------
    ValidationError
        The page has a class other than 0.
    """
    if max_degree < MIN_SPHERE_DEGREE:
        raise ValidationError(f"max degree must be at least {MIN_SPHERE_DEGREE}")
    if any(a != 0 for a in page.classes):
        raise ValidationError(f"sphere analyzer needs a single class 0, got {page.classes}")
    ranks = page.degrees(0)
    target = sphere_target(max_degree)
    observed = {k: r for k, r in ranks.items() if k <= max_degree}
    findings = []
    if observed == target:
        findings.append(Finding(MATCH, {"max_degree": max_degree}))
    else:
        diff = sorted(k for k in set(observed) | set(target)
                      if observed.get(k, 0) != target.get(k, 0))
        findings.append(Finding(MISMATCH, {
            "max_degree": max_degree,
            "degrees": diff[:20],
            "observed": [observed.get(k, 0) for k in diff[:20]],
            "target": [target.get(k, 0) for k in diff[:20]],
        }))

    verdict = degeneration_check(page).get(0)
    if verdict is not None and verdict.coherent and verdict.parity == Parity.EVEN:
        findings.append(Finding(PARITY_CONTRADICTION, {
            "parity": str(Parity.EVEN),
            "target_parity": str(Parity.ODD),
        }))

    if census is not None:
        primes = {}
        for r in _simple_hyperbolic(census):
            if r.cz_index is not None and r.cz_index >= 3 and _is_prime(r.cz_index):
                primes.setdefault(r.cz_index, r)
        for p in sorted(primes):
            for q in sorted(primes):
                if q <= p:
                    continue
                degree = p * q
                # gamma_p^q and gamma_q^p both land in degree p q
                predicted = sum(iterate_is_good(mu, j) for mu, j in ((p, q), (q, p)))
                rank = max(page.rank(0, degree), predicted)
                if rank >= 2:
                    findings.append(Finding(MULTIPLICITY_CONFLICT, {
                        "orbits": [primes[p].simple_id, primes[q].simple_id],
                        "indices": [p, q],
                        "degree": degree,
                        "rank": rank,
                        "target_rank": 1 if degree % 2 else 0,
                    }))
    return Report("sphere", tuple(findings), {"truncation": page.truncation})


def bounded_homology_analyzer(table, bound):
    """Test a uniform bound ``C`` on the rank in every degree.

    The ``C + 1`` simple hyperbolic orbits of smallest period are selected and
    ``k`` is the lcm of their indices.  Each one contributes its iterate of
    index ``k``; the count of good generators in degree ``k`` (over every simple
    hyperbolic orbit of the census) is compared with ``C + 1``.

    Raises
    ------
    ValidationError
        A selected orbit has a missing or non-positive index.
    """
    bound = int(bound)
    if bound < 0:
        raise ValidationError(f"bound must be non-negative, got {bound}")
    simple = sorted(_simple_hyperbolic(table), key=lambda r: r.sort_key())
    meta = {"bound": bound, "available": len(simple)}
    if len(simple) < bound + 1:
        return Report("bounded", (Finding(INSUFFICIENT_DATA, {
            "needed": bound + 1, "available": len(simple),
        }),), meta)
    selected = simple[:bound + 1]
    bad = [r.simple_id for r in selected if r.cz_index is None or r.cz_index <= 0]
    if bad:
        raise ValidationError(f"selected orbits need positive indices: {bad}")
    k = math.lcm(*(r.cz_index for r in selected))
    contributors = []
    for r in simple:
        mu = r.cz_index
        if mu is not None and mu > 0 and k % mu == 0 and iterate_is_good(mu, k // mu):
            contributors.append(r.simple_id)
    detail = {
        "selected": [r.simple_id for r in selected],
        "indices": [r.cz_index for r in selected],
        "degree": k,
        "count": len(contributors),
        "needed": bound + 1,
    }
    code = OBSTRUCTION_CONFIRMED if len(contributors) >= bound + 1 else INSUFFICIENT_DATA
    return Report("bounded", (Finding(code, detail),), meta)
