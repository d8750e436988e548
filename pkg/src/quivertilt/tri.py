"""Three-valued verdicts for bounded or semi-decidable checks.

UNKNOWN means the search caps were exhausted without a certificate either
way; it is never silently coerced to a boolean.
"""

from __future__ import annotations

from enum import Enum


class Tri(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @staticmethod
    def of(flag: bool) -> "Tri":
        return Tri.YES if flag else Tri.NO

    @property
    def decided(self) -> bool:
        return self is not Tri.UNKNOWN

    def __bool__(self):
        raise TypeError("Tri verdicts must be compared explicitly, not used as booleans")


def tri_all(items) -> Tri:
    """YES if all YES; NO if any NO; otherwise UNKNOWN."""
    saw_unknown = False
    for t in items:
        if t is Tri.NO:
            return Tri.NO
        if t is Tri.UNKNOWN:
            saw_unknown = True
    return Tri.UNKNOWN if saw_unknown else Tri.YES
