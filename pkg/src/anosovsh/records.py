"""Census record types shared by the model builders and the analyzers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ValidationError
from .symplin import Parity

ORBIT_TYPES = ("hyperbolic", "elliptic", "other")


@dataclass(frozen=True)
class OrbitRecord:
    simple_id: str
    iterate: int
    period: float
    class_label: int
    cz_parity: Parity
    cz_index: Optional[int] = None
    good: bool = True
    orbit_type: str = "other"
    holonomy_sign: Optional[int] = None

    def __post_init__(self):
        if self.iterate < 1:
            raise ValidationError(f"iterate must be positive, got {self.iterate}")
        if not self.period > 0:
            raise ValidationError(f"period must be positive, got {self.period}")
        if self.orbit_type not in ORBIT_TYPES:
            raise ValidationError(f"unknown orbit type {self.orbit_type!r}")
        if self.holonomy_sign not in (None, 1, -1):
            raise ValidationError(f"holonomy sign must be +1 or -1, got {self.holonomy_sign}")
        if self.cz_index is not None and Parity.of(self.cz_index) != self.cz_parity:
            raise ValidationError(
                f"{self.simple_id}^{self.iterate}: index {self.cz_index} "
                f"contradicts parity {self.cz_parity}"
            )

    def sort_key(self):
        return (self.period, self.class_label, self.simple_id, self.iterate)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class CensusTable:
    """All orbit records of a model with period at most ``truncation``.

    ``grading`` is ``"integer"`` when indices are genuine CZ indices and
    ``"parity-level"`` when they are the 0/1 lift of the parity.
    """

    model: dict
    truncation: float
    records: tuple
    grading: str = "integer"
    label_coarsened: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        recs = tuple(sorted(self.records, key=OrbitRecord.sort_key))
        object.__setattr__(self, "records", recs)
        P, Pg = self.counts
        if not P <= 2 * Pg <= 2 * P:
            raise ValidationError(f"good/bad counts violate P <= 2 Pg <= 2P: P={P}, Pg={Pg}")

    @property
    def counts(self):
        return len(self.records), sum(1 for r in self.records if r.good)

    def by_simple(self):
        groups = {}
        for r in self.records:
            groups.setdefault(r.simple_id, []).append(r)
        return groups


def classify_good_bad(records):
    """Mark iterate ``k`` of one simple orbit bad iff ``k`` is even and its
    parity differs from the parity of the simple orbit.

    The result is sorted by iterate, so the operation is idempotent and does
    not depend on the input order.
    """
    records = sorted(records, key=lambda r: r.iterate)
    if not records:
        return []
    ids = {r.simple_id for r in records}
    if len(ids) != 1:
        raise ValidationError(f"records span several simple orbits: {sorted(ids)}")
    first = [r for r in records if r.iterate == 1]
    if not first:
        raise ValidationError(f"simple orbit {records[0].simple_id} has no iterate 1")
    base = first[0].cz_parity
    return [
        r.with_(good=not (r.iterate % 2 == 0 and r.cz_parity != base))
        for r in records
    ]


def classify_all(records):
    out = []
    groups = {}
    for r in records:
        groups.setdefault(r.simple_id, []).append(r)
    for key in sorted(groups):
        out.extend(classify_good_bad(groups[key]))
    return out
