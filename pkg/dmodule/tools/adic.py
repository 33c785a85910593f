from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Any, Dict, Iterator, Mapping, Sequence, Tuple, Union

from .common.results import AlgebraError
from .common.scalars import Scalar, is_big, normalize, sadd, scalar_from_payload, scalar_payload, smul, to_big
from .poly import Poly

INF = math.inf


@total_ordering
@dataclass(frozen=True)
class Valuation:
    """Order of vanishing; exact=False means only the lower bound `value` is certified."""

    value: Union[int, float]
    exact: bool = True

    @property
    def is_infinite(self) -> bool:
        return self.value == INF

    def at_least(self, bound: int) -> bool:
        return self.value >= bound

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Valuation):
            return self.value < other.value
        if isinstance(other, (int, float)):
            return self.value < other
        return NotImplemented

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        return str(self.value) if self.exact else f">={self.value}"

    def to_json(self) -> Union[int, str]:
        return self.value if self.exact and not self.is_infinite else str(self)


class AdicSeries:
    """Truncated series sum c_k g^k known exactly below `precision` (INF for a polynomial)."""

    __slots__ = ("generator", "coeffs", "precision")

    def __init__(
        self,
        coeffs: Union[Mapping[int, Any], Sequence[Any]] = (),
        precision: Union[int, float] = INF,
        generator: str = "X",
    ):
        if precision != INF and precision < 0:
            raise AlgebraError("invalid_input", "negative series precision")
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        kept: Dict[int, Scalar] = {}
        for power, coeff in items:
            if power < 0:
                raise AlgebraError("invalid_input", "negative series power")
            coeff = normalize(coeff)
            if power < precision and coeff != 0:
                kept[power] = coeff
        if any(is_big(c) for c in kept.values()):
            kept = {k: to_big(c) for k, c in kept.items()}
        self.generator = generator
        self.coeffs = kept
        self.precision = precision

    @classmethod
    def from_poly(cls, p: Poly, precision: Union[int, float] = INF) -> "AdicSeries":
        return cls(dict(p.items()), precision, p.var)

    def to_poly(self) -> Poly:
        top = max(self.coeffs, default=-1)
        return Poly([self.coeffs.get(k, 0) for k in range(top + 1)], self.generator)

    def coefficient(self, power: int) -> Scalar:
        if power >= self.precision:
            raise AlgebraError("invalid_input", f"coefficient {power} lies beyond precision {self.precision}")
        return self.coeffs.get(power, Fraction(0))

    def items(self) -> Iterator[Tuple[int, Scalar]]:
        for power in sorted(self.coeffs):
            yield power, self.coeffs[power]

    def valuation(self) -> Valuation:
        if self.coeffs:
            return Valuation(min(self.coeffs))
        if self.precision == INF:
            return Valuation(INF)
        return Valuation(self.precision, exact=False)

    def _check(self, other: "AdicSeries") -> None:
        if other.generator != self.generator:
            raise AlgebraError("pair_mismatch", f"series in {self.generator} and {other.generator}")

    def __add__(self, other: "AdicSeries") -> "AdicSeries":
        self._check(other)
        out: Dict[int, Any] = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = sadd(out.get(k, 0), c)
        return AdicSeries(out, min(self.precision, other.precision), self.generator)

    def __neg__(self) -> "AdicSeries":
        return AdicSeries({k: -c for k, c in self.coeffs.items()}, self.precision, self.generator)

    def __sub__(self, other: "AdicSeries") -> "AdicSeries":
        return self + (-other)

    def scale(self, factor: Any) -> "AdicSeries":
        return AdicSeries({k: smul(factor, c) for k, c in self.coeffs.items()}, self.precision, self.generator)

    def __mul__(self, other: "AdicSeries") -> "AdicSeries":
        self._check(other)
        # (f + O(g^p))(h + O(g^q)) = fh + O(g^min(p + v(h), q + v(f)))
        precision = min(self.precision + other.valuation().value, other.precision + self.valuation().value)
        out: Dict[int, Any] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                if i + j < precision:
                    out[i + j] = sadd(out.get(i + j, 0), smul(a, b))
        return AdicSeries(out, precision, self.generator)

    def truncate(self, size: Union[int, float]) -> "AdicSeries":
        return AdicSeries(self.coeffs, min(self.precision, size), self.generator)

    def shift(self, power: int) -> "AdicSeries":
        return AdicSeries({k + power: c for k, c in self.coeffs.items()}, self.precision + power, self.generator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdicSeries):
            return NotImplemented
        return (
            self.generator == other.generator
            and self.precision == other.precision
            and self.coeffs == other.coeffs
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        tail = "" if self.precision == INF else f" + O({self.generator}^{self.precision})"
        return f"AdicSeries({self.to_poly().format()}{tail})"


def valuation(f: Union[Poly, AdicSeries]) -> Valuation:
    if isinstance(f, AdicSeries):
        return f.valuation()
    return Valuation(f.valuation())


def distance_valuation(a: Union[Poly, AdicSeries], b: Union[Poly, AdicSeries]) -> Valuation:
    """u(a, b) = v(a - b); larger means closer."""
    if isinstance(a, AdicSeries) or isinstance(b, AdicSeries):
        a = a if isinstance(a, AdicSeries) else AdicSeries.from_poly(a)
        b = b if isinstance(b, AdicSeries) else AdicSeries.from_poly(b)
        return (a - b).valuation()
    return Valuation((a - b).valuation())


def ultrametric_check(x: Poly, y: Poly, z: Poly) -> bool:
    """Strong triangle inequality u(x, z) >= min(u(x, y), u(y, z))."""
    return distance_valuation(x, z).value >= min(distance_valuation(x, y).value, distance_valuation(y, z).value)


def series_payload(series: AdicSeries, prefactor: str | None = None, digits: int | None = None) -> Dict[str, Any]:
    """JSON form with exact rationals as numerator/denominator strings."""
    coefficients = []
    for power, coeff in series.items():
        coefficients.append({"power": power, **scalar_payload(coeff, digits)})
    return {
        "generator": series.generator,
        "prefactor": prefactor,
        "coefficients": coefficients,
        "precision": None if series.precision == INF else series.precision,
    }


def series_from_payload(payload: Mapping[str, Any]) -> AdicSeries:
    precision = payload.get("precision")
    coeffs = {int(item["power"]): scalar_from_payload(item) for item in payload.get("coefficients", [])}
    return AdicSeries(coeffs, INF if precision is None else int(precision), payload.get("generator", "X"))
