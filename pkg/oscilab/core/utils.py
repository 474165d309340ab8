from __future__ import annotations

import math

from typing import List, Sequence


__all__ = (
    "format_float",
    "human_join",
    "parse_float_list",
    "plural",
)


def format_float(value: float) -> str:
    """
    Shortest decimal representation that parses back to the same float.
    """
    return repr(float(value))


def parse_float_list(text: str) -> List[float]:
    """
    Parses a comma separated list of finite reals, e.g. `-0.5,0,0.5`.

    Raises
    ------
    ValueError
        An item is not a number or is not finite.
    """
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        value = float(item)
        if not math.isfinite(value):
            raise ValueError(f"{item!r} is not a finite number.")
        values.append(value)
    return values


def human_join(sequence: Sequence[str], delim: str = ", ", final: str = "and") -> str:
    """
    Get comma-separated list, with the last element joined with *and*.

    Parameters
    ----------
    sequence : Sequence[str]
        The items of the list to join together.
    delim : str
        The delimiter to join the sequence with. Defaults to ", ".
    final : str
        The final delimiter to format the string with. Defaults to "and".
    """
    size = len(sequence)
    if size == 0:
        return ""
    if size == 1:
        return sequence[0]
    if size == 2:
        return f"{sequence[0]} {final} {sequence[1]}"
    return delim.join(sequence[:-1]) + f" {final} {sequence[-1]}"


class plural:
    """
    Formats a string to singular or plural based on the value it refers to.

    Examples
    --------
    - f"{plural(count):zero}"
    - f"{plural(cells):cell|cells}"
    """

    def __init__(self, value):
        self.value = value

    def __format__(self, format_spec) -> str:
        v = self.value
        singular, _, plural = format_spec.partition("|")
        plural = plural or f"{singular}s"
        if abs(v) != 1:
            return f"{v} {plural}"
        return f"{v} {singular}"
