from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from src.core.arith import format_rat


@dataclass(frozen=True)
class EpsInterval:
    """Convex subset of ℚ; a missing endpoint means infinity and is always open."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    lo_open: bool = True
    hi_open: bool = True
    empty: bool = False

    def __post_init__(self) -> None:
        if self.lo is None and not self.lo_open:
            object.__setattr__(self, "lo_open", True)
        if self.hi is None and not self.hi_open:
            object.__setattr__(self, "hi_open", True)

    @classmethod
    def nothing(cls) -> "EpsInterval":
        return cls(lo=None, hi=None, empty=True)

    @classmethod
    def everything(cls) -> "EpsInterval":
        return cls(lo=None, hi=None)

    @classmethod
    def point(cls, p: Fraction) -> "EpsInterval":
        return cls(lo=p, hi=p, lo_open=False, hi_open=False)

    @classmethod
    def make(
        cls,
        lo: Optional[Fraction],
        hi: Optional[Fraction],
        lo_open: bool = True,
        hi_open: bool = True,
    ) -> "EpsInterval":
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and (lo_open or hi_open)):
                return cls.nothing()
        return cls(lo=lo, hi=hi, lo_open=lo_open, hi_open=hi_open)

    @property
    def kind(self) -> str:
        if self.empty:
            return "empty"
        if self.lo is not None and self.lo == self.hi:
            return "point"
        if self.lo_open and self.hi_open:
            return "open"
        if not self.lo_open and not self.hi_open:
            return "closed"
        return "half_open"

    @property
    def is_point(self) -> bool:
        return self.kind == "point"

    def contains(self, eps: Fraction) -> bool:
        if self.empty:
            return False
        if self.lo is not None and (eps < self.lo or (self.lo_open and eps == self.lo)):
            return False
        if self.hi is not None and (eps > self.hi or (self.hi_open and eps == self.hi)):
            return False
        return True

    def intersect(self, other: "EpsInterval") -> "EpsInterval":
        if self.empty or other.empty:
            return EpsInterval.nothing()
        lo, lo_open = self.lo, self.lo_open
        if other.lo is not None and (lo is None or other.lo > lo or (other.lo == lo and other.lo_open)):
            lo, lo_open = other.lo, other.lo_open
        hi, hi_open = self.hi, self.hi_open
        if other.hi is not None and (hi is None or other.hi < hi or (other.hi == hi and other.hi_open)):
            hi, hi_open = other.hi, other.hi_open
        return EpsInterval.make(lo, hi, lo_open, hi_open)

    def interior(self) -> "EpsInterval":
        if self.empty or self.is_point:
            return EpsInterval.nothing()
        return EpsInterval.make(self.lo, self.hi, True, True)

    def closure(self) -> "EpsInterval":
        if self.empty:
            return self
        return EpsInterval.make(self.lo, self.hi, self.lo is None, self.hi is None)

    def sample(self) -> Fraction:
        """A point of the interval: the midpoint when both ends are finite."""
        if self.empty:
            raise ValueError("Invalid sample request on an empty interval")
        if self.lo is not None and self.hi is not None:
            return (self.lo + self.hi) / 2
        if self.hi is not None:
            return self.hi - 1
        if self.lo is not None:
            return self.lo + 1
        return Fraction(0)

    def mirrored(self) -> "EpsInterval":
        if self.empty:
            return self
        return EpsInterval.make(
            None if self.hi is None else -self.hi,
            None if self.lo is None else -self.lo,
            self.hi_open,
            self.lo_open,
        )

    def __str__(self) -> str:
        if self.empty:
            return "{}"
        if self.is_point:
            return "{" + format_rat(self.lo) + "}"
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        lo = "-inf" if self.lo is None else format_rat(self.lo)
        hi = "+inf" if self.hi is None else format_rat(self.hi)
        return f"{left}{lo},{hi}{right}"
