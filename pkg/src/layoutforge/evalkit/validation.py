"""Layout soundness checks: overlap, boundary containment, object counts.

A layout is *usable* when every pairwise footprint overlap and every
boundary violation stays within the configured slack, and (optionally)
the object counts match the task.  The report keeps the raw measurements
so loosening thresholds can only ever keep a usable layout usable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .. import geometry
from ..errors import EmptyLayoutError
from ..scene import Layout, TaskSpec


@dataclass(frozen=True)
class ValidationThresholds:
    max_pair_overlap: float = 0.01  # m² allowed between any two footprints
    max_boundary_violation: float = 0.01  # m² of a footprint allowed outside the floor
    require_counts_match: bool = False

    def __post_init__(self):
        if self.max_pair_overlap < 0 or self.max_boundary_violation < 0:
            raise ValueError("thresholds must be nonnegative")


#: Zero-tolerance profile used when synthesizing preference pairs: any
#: overlap or spill above 1e-6 m² makes a layout unusable, so negatives
#: are unambiguous.
FORGE_THRESHOLDS = ValidationThresholds(
    max_pair_overlap=1e-6, max_boundary_violation=1e-6
)


@dataclass(frozen=True)
class ValidationReport:
    oor: float
    pair_overlaps: tuple[tuple[str, str, float], ...]
    boundary_violations: tuple[tuple[str, float], ...]
    count_match: bool
    usable: bool

    def to_dict(self) -> dict:
        return {
            "oor": self.oor,
            "pair_overlaps": [
                {"first": a, "second": b, "area": area}
                for a, b, area in self.pair_overlaps
            ],
            "boundary_violations": [
                {"instance_id": i, "area": area}
                for i, area in self.boundary_violations
            ],
            "count_match": self.count_match,
            "usable": self.usable,
        }


def _counts_match(layout: Layout, task: TaskSpec) -> bool:
    want: Counter[str] = Counter()
    for spec in task.objects:
        want[spec.description] += spec.quantity
    have = Counter(obj.description for obj in layout.objects)
    return have == want


def validate(
    layout: Layout,
    thresholds: ValidationThresholds | None = None,
    *,
    task: TaskSpec | None = None,
) -> ValidationReport:
    """Measure the layout and judge it against the thresholds.

    An empty layout is trivially usable with OOR 0.  Counts are compared
    only when a task is supplied; without one, count_match is True and
    require_counts_match cannot fail.
    """
    t = thresholds or ValidationThresholds()
    try:
        oor_value = geometry.oor(layout)
    except EmptyLayoutError:
        oor_value = 0.0

    overlaps = tuple(geometry.pairwise_overlaps(layout))
    boundary = tuple(geometry.boundary_violations(layout))
    count_match = True if task is None else _counts_match(layout, task)

    usable = (
        all(area <= t.max_pair_overlap for _, _, area in overlaps)
        and all(area <= t.max_boundary_violation for _, area in boundary)
        and (count_match or not t.require_counts_match)
    )
    return ValidationReport(
        oor=oor_value,
        pair_overlaps=overlaps,
        boundary_violations=boundary,
        count_match=count_match,
        usable=usable,
    )
