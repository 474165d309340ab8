from __future__ import annotations

from typing import List, Optional, TypedDict


# Ascending powers; each entry is a shortest round-trip decimal or "num/den".
PolynomialPayload = List[str]


class EnclosurePayload(TypedDict):
    lower: float
    upper: float


class DiskCertificatePayload(TypedDict):
    epsilon: float
    delta: float
    radius: float
    bound: float


class SystemPayload(TypedDict):
    dim: int
    domain: List[float]
    entries: List[List[PolynomialPayload]]


# "lambda" is a keyword, hence the functional form.
SpecPayload = TypedDict(
    "SpecPayload",
    {
        "nodes": List[float],
        "margin": float,
        "lambda": float,
        "p": PolynomialPayload,
        "a": PolynomialPayload,
        "certificate": EnclosurePayload,
        "complex": Optional[DiskCertificatePayload],
    },
)


class ZeroCountPayload(TypedDict):
    component: Optional[int]
    normal: Optional[List[float]]
    interval: List[float]
    count: int
    locations: List[float]
    flags: List[str]
    tangencies: List[float]
    vanishes: bool
