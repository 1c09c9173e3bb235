"""Prime-field arithmetic and the short Weierstrass group law in affine form.

Points carry plain ``int`` coordinates; :class:`FieldElement` is provided for
callers that want explicit field values, but the group law works on raw
residues for speed.  Nothing here is constant time.
"""
from dataclasses import dataclass
from typing import Optional

from . import metering
from .errors import InversionOfZero, PointNotOnCurve, UnsupportedCurveForSampling
from .primes import is_probable_prime


@dataclass(frozen=True, slots=True)
class FieldElement:
    value: int
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("field elements from different fields")
            return other.value
        return other % self.modulus

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __truediv__(self, other):
        return self * field_inverse(FieldElement(self._coerce(other), self.modulus))

    def __pow__(self, k: int):
        if k < 0:
            return field_inverse(self) ** (-k)
        return FieldElement(pow(self.value, k, self.modulus), self.modulus)

    def inverse(self) -> "FieldElement":
        return field_inverse(self)


def field_inverse(e: FieldElement) -> FieldElement:
    if e.value == 0:
        raise InversionOfZero(f"0 has no inverse mod {e.modulus}")
    return FieldElement(pow(e.value, -1, e.modulus), e.modulus)


def _inv(x: int, p: int) -> int:
    x %= p
    if x == 0:
        raise InversionOfZero(f"0 has no inverse mod {p}")
    return pow(x, -1, p)


@dataclass(frozen=True)
class CurveParams:
    """y^2 = x^3 + a x + b over F_p."""

    p: int
    a: int = 0
    b: int = 1

    def __post_init__(self):
        if self.p <= 3 or not is_probable_prime(self.p):
            raise ValueError(f"modulus {self.p} is not a prime > 3")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise ValueError("singular curve: 4a^3 + 27b^2 = 0 mod p")


def supersingular_curve(p: int) -> CurveParams:
    """The curve y^2 = x^3 + 1 used by the cryptosystem (needs p = 2 mod 3)."""
    if p % 3 != 2:
        raise ValueError(f"p = {p} is not 2 mod 3")
    return CurveParams(p, 0, 1)


@dataclass(frozen=True, slots=True)
class CurvePoint:
    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        return "O" if self.x is None else f"({self.x}, {self.y})"


INFINITY = CurvePoint()


def is_on_curve(P: CurvePoint, curve: CurveParams) -> bool:
    if P.is_infinity:
        return True
    p = curve.p
    if not (0 <= P.x < p and 0 <= P.y < p):
        return False
    return (P.y * P.y - (P.x * P.x * P.x + curve.a * P.x + curve.b)) % p == 0


def _require_on_curve(P: CurvePoint, curve: CurveParams) -> None:
    if not is_on_curve(P, curve):
        raise PointNotOnCurve(f"{P!r} is not on y^2 = x^3 + {curve.a}x + {curve.b} mod {curve.p}")


def point_neg(P: CurvePoint, curve: CurveParams) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, (-P.y) % curve.p)


def _add(P: CurvePoint, Q: CurvePoint, curve: CurveParams) -> CurvePoint:
    metering.count("group_add")
    if P.x is None:
        return Q
    if Q.x is None:
        return P
    p = curve.p
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if (y1 + y2) % p == 0:
            # covers both Q = -P and doubling a 2-torsion point (y = 0)
            return INFINITY
        lam = (3 * x1 * x1 + curve.a) * _inv(2 * y1, p) % p
    else:
        lam = (y2 - y1) * _inv(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return CurvePoint(x3, y3)


def point_add(P: CurvePoint, Q: CurvePoint, curve: CurveParams) -> CurvePoint:
    _require_on_curve(P, curve)
    _require_on_curve(Q, curve)
    return _add(P, Q, curve)


def _mul(k: int, P: CurvePoint, curve: CurveParams) -> CurvePoint:
    if k < 0:
        k, P = -k, point_neg(P, curve)
    result = INFINITY
    for bit in bin(k)[2:]:
        result = _add(result, result, curve)
        if bit == "1":
            result = _add(result, P, curve)
    return result


def scalar_mul(k: int, P: CurvePoint, curve: CurveParams) -> CurvePoint:
    """k*P by left-to-right double-and-add; negative k multiplies -P."""
    _require_on_curve(P, curve)
    return _mul(k, P, curve)


def sample_point(curve: CurveParams, rng) -> CurvePoint:
    """Random affine point on y^2 = x^3 + 1 with p = 2 mod 3.

    Cubing is a bijection on F_p when p = 2 mod 3, so every y gives exactly one
    x and a uniform y yields a uniform non-infinity point.
    """
    return point_from_y(rng.randrange(curve.p), curve)


def point_from_y(y: int, curve: CurveParams) -> CurvePoint:
    p = curve.p
    if curve.a != 0 or curve.b != 1 or p % 3 != 2:
        raise UnsupportedCurveForSampling("cube-root sampling needs y^2 = x^3 + 1 with p = 2 mod 3")
    y %= p
    x = pow((y * y - 1) % p, (2 * p - 1) // 3, p)
    return CurvePoint(x, y)


def point_to_json(P: CurvePoint, width: int = 0) -> dict:
    """Serialize as decimal strings, zero-padded to ``width`` digits if given."""
    if P.is_infinity:
        return {"infinity": True}
    return {"x": str(P.x).zfill(width), "y": str(P.y).zfill(width)}


def point_from_json(obj, curve: Optional[CurveParams] = None) -> CurvePoint:
    if not isinstance(obj, dict):
        raise ValueError("point must be a JSON object")
    if obj.get("infinity") is True and set(obj) == {"infinity"}:
        return INFINITY
    if set(obj) != {"x", "y"}:
        raise ValueError(f"bad point object keys: {sorted(obj)}")
    xs, ys = obj["x"], obj["y"]
    if not (isinstance(xs, str) and isinstance(ys, str) and xs.isdigit() and ys.isdigit()):
        raise ValueError("point coordinates must be decimal strings")
    P = CurvePoint(int(xs), int(ys))
    if curve is not None:
        _require_on_curve(P, curve)
    return P
