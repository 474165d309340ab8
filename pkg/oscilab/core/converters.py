import argparse
import math

from typing import List

from .enums import NodeStrategy
from .errors import InvalidArgument
from .utils import parse_float_list


__all__ = (
    "NoExitParser",
    "finite_float",
    "float_list",
    "node_strategy",
    "positive_int",
)


class NoExitParser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgument(f"Failed to parse, {message}.")


def finite_float(argument: str) -> float:
    try:
        value = float(argument)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{argument!r} is not a number")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{argument!r} is not finite")
    return value


def positive_int(argument: str) -> int:
    try:
        value = int(argument, base=10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{argument!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be ≥ 1, got {value}")
    return value


def float_list(argument: str) -> List[float]:
    try:
        values = parse_float_list(argument)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not values:
        raise argparse.ArgumentTypeError("expected a comma separated list of numbers")
    return values


def node_strategy(argument: str) -> NodeStrategy:
    strategy = NodeStrategy.from_value(argument.lower())
    if strategy is NodeStrategy.INVALID:
        choices = ", ".join(s.value for s in NodeStrategy if s is not NodeStrategy.INVALID)
        raise argparse.ArgumentTypeError(f"unknown strategy {argument!r} (choose from {choices})")
    return strategy
