from enum import Enum


__all__ = ("NodeStrategy", "Verdict", "ZeroFlag")


class Verdict(Enum):
    CERTIFIED = "certified"  # every upper bound is <= C
    REFUTED = "refuted"  # some lower bound is > C
    INCONCLUSIVE = "inconclusive"  # an enclosure straddles C


class NodeStrategy(Enum):
    CHEBYSHEV = "chebyshev"
    UNIFORM = "uniform"
    EXPLICIT = "explicit-list"
    INVALID = "invalid"

    @classmethod
    def from_value(cls, value: str) -> "NodeStrategy":
        try:
            return cls(value)
        except ValueError:
            # "explicit" is accepted as a short form.
            if value == "explicit":
                return cls.EXPLICIT
            return cls.INVALID


class ZeroFlag(Enum):
    CLEAN = "clean"
    NEAR_TANGENCY = "near_tangency"
    ENDPOINT = "endpoint"
