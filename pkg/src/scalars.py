"""
Exact arithmetic in the field Q(g, h, ...) of rational functions in the
deformation parameters of a presentation.

Numerators and denominators are sparse sympy polynomials over QQ, ordered
lexicographically in parameter declaration order. A Scalar is always kept
in canonical form: gcd(num, den) = 1, den has leading coefficient +1 and
constants have den = 1, so equality is plain comparison of the two parts.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import GeneratorsError
from sympy.polys.rings import PolyElement, PolyRing

from src.config import CANCEL_CACHE_SIZE
from src.errors import DivisionByZero, FieldMismatch, MissingParameter, PoleAtPoint, ZeroDenominator

logger = logging.getLogger(__name__)

# exponent vector -> nonzero rational coefficient
ParamPoly = PolyElement
Rational = QQ.dtype
RationalLike = Union[int, Fraction, str, Rational]


def to_rational(value: RationalLike) -> Rational:
    """Convert an int, Fraction, decimal string or QQ element to QQ"""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Rational):
        return value
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


class ScalarField:
    """The field Q(params); one shared instance per parameter tuple"""

    _cache: Dict[Tuple[str, ...], "ScalarField"] = {}

    def __new__(cls, params: Iterable[str] = ()):
        params = tuple(params)
        field = cls._cache.get(params)
        if field is None:
            if len(set(params)) != len(params):
                raise ValueError(f"duplicate parameter names in {params}")
            field = super().__new__(cls)
            field.params = params
            field.ring = PolyRing(",".join(params), QQ, lex)
            field.zero = Scalar(field, field.ring.zero, field.ring.one)
            field.one = Scalar(field, field.ring.one, field.ring.one)
            cls._cache[params] = field
        return field

    def __repr__(self) -> str:
        return f"ScalarField({', '.join(self.params) or '-'})"

    def __reduce__(self):
        return (ScalarField, (self.params,))

    def param(self, name: str) -> "Scalar":
        try:
            i = self.params.index(name)
        except ValueError:
            raise MissingParameter(f"parameter '{name}' is not declared in {self!r}") from None
        return Scalar(self, self.ring.gens[i], self.ring.one)

    def from_rational(self, value: RationalLike) -> "Scalar":
        return Scalar(self, self.ring.ground_new(to_rational(value)), self.ring.one)

    def union(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.params + tuple(p for p in other.params if p not in self.params))

    def coerce(self, value: Union["Scalar", RationalLike]) -> "Scalar":
        """Re-embed a scalar of a smaller field (or a rational) into this one"""
        if not isinstance(value, Scalar):
            return self.from_rational(value)
        if value.field is self:
            return value
        try:
            num = value.num.set_ring(self.ring)
            den = value.den.set_ring(self.ring)
        except GeneratorsError:
            raise FieldMismatch(f"cannot embed a scalar of {value.field!r} into {self!r}") from None
        return scalar_normalize(num, den)


class Scalar:
    """An element of Q(params) in canonical form; immutable"""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: ScalarField, num: ParamPoly, den: ParamPoly):
        self.field = field
        self.num = num
        self.den = den

    # predicates
    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_one(self) -> bool:
        return self.den.is_ground and self.num == self.field.ring.one

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_ground

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Rational:
        """The rational value of a constant scalar"""
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self.num.get(self.field.ring.zero_monom, QQ.zero)

    def used_params(self) -> Tuple[str, ...]:
        used = set()
        for poly in (self.num, self.den):
            for monom in poly:
                used.update(i for i, e in enumerate(monom) if e)
        return tuple(p for i, p in enumerate(self.field.params) if i in used)

    # arithmetic
    def _operand(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise FieldMismatch(f"{self.field!r} and {other.field!r} differ")
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._operand(other)
        if other is NotImplemented:
            return other
        if self.den.is_ground and other.den.is_ground:
            return Scalar(self.field, self.num + other.num, self.den)
        return scalar_normalize(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.field, -self.num, self.den)

    def __sub__(self, other):
        other = self._operand(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._operand(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.field.zero
        if self.den.is_ground and other.den.is_ground:
            return Scalar(self.field, self.num * other.num, self.den)
        return scalar_normalize(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._operand(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise DivisionByZero(f"division of {self} by zero")
        if other.is_constant:
            c = other.constant_value()
            return Scalar(self.field, self.num.quo_ground(c), self.den)
        return scalar_normalize(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._operand(other)
        if other is NotImplemented:
            return other
        return other / self

    def inverse(self) -> "Scalar":
        return self.field.one / self

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        # coprime parts stay coprime and den**n keeps leading coefficient 1
        return Scalar(self.field, self.num**n, self.den**n)

    # comparison
    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.field is other.field and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return self.is_constant and self.constant_value() == to_rational(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_constant:
            # agrees with == against int, Fraction and QQ
            value = self.constant_value()
            return hash(Fraction(int(value.numerator), int(value.denominator)))
        return hash((self.field.params, self.num, self.den))

    def __bool__(self) -> bool:
        return bool(self.num)

    # evaluation and substitution
    def evaluate(self, assignment: Mapping[str, RationalLike]) -> Rational:
        values = self._point(assignment)
        den = _evaluate_poly(self.den, values)
        if not den:
            raise PoleAtPoint(f"denominator of {self} vanishes at {_format_point(assignment)}")
        return _evaluate_poly(self.num, values) / den

    def _point(self, assignment: Mapping[str, RationalLike]) -> List[Rational]:
        used = self.used_params()
        values = []
        for name in self.field.params:
            if name in assignment:
                values.append(to_rational(assignment[name]))
            elif name in used:
                raise MissingParameter(f"no value for parameter '{name}'")
            else:
                values.append(QQ.zero)
        return values

    def substitute(self, mapping: Mapping[str, "Scalar"], field: ScalarField) -> "Scalar":
        """Replace parameters by scalars of ``field``; unmapped ones must exist there"""
        if field is self.field and not mapping:
            return self
        if self.is_constant:
            return field.from_rational(self.constant_value())
        used = set(self.used_params())
        images = []
        for name in self.field.params:
            if name in mapping:
                images.append(field.coerce(mapping[name]))
            elif name in field.params:
                images.append(field.param(name))
            elif name in used:
                raise MissingParameter(f"no substitution for parameter '{name}'")
            else:
                images.append(field.zero)
        num = _substitute_poly(self.num, images, field)
        den = _substitute_poly(self.den, images, field)
        if den.is_zero:
            raise PoleAtPoint(f"denominator of {self} vanishes under the substitution")
        return num / den

    # printing
    def __str__(self) -> str:
        if self.den.is_ground:
            return _poly_str(self.num)
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    @property
    def is_atomic(self) -> bool:
        """True when the printed form needs no parentheses as a factor"""
        if self.is_constant:
            return True
        return self.den.is_ground and len(self.num) == 1 and self.num.LC == QQ.one


def scalar_normalize(num: ParamPoly, den: ParamPoly) -> Scalar:
    """Canonical reduced form of num/den"""
    if not den:
        raise ZeroDenominator("denominator is zero")
    if num.ring != den.ring:
        raise FieldMismatch("numerator and denominator live in different rings")
    field = ScalarField(tuple(str(s) for s in num.ring.symbols))
    if not num:
        return field.zero
    ring = field.ring
    if den.is_ground:
        c = den.LC
        return Scalar(field, num.quo_ground(c) if c != QQ.one else num, ring.one)
    num, den = _cancel(num, den)
    return Scalar(field, num, den)


@lru_cache(maxsize=CANCEL_CACHE_SIZE)
def _cancel(num: ParamPoly, den: ParamPoly) -> Tuple[ParamPoly, ParamPoly]:
    """Coprime num, den with den monic"""
    _, num, den = num.cofactors(den)
    c = den.LC
    if c != QQ.one:
        num = num.quo_ground(c)
        den = den.quo_ground(c)
    return num, den


def scalar_arith(op: str, x: Scalar, y: Union[Scalar, RationalLike]) -> Scalar:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown scalar operation '{op}'")


def scalar_eval(x: Scalar, assignment: Mapping[str, RationalLike]) -> Rational:
    return x.evaluate(assignment)


def _evaluate_poly(poly: ParamPoly, values: List[Rational]) -> Rational:
    ring = poly.ring
    if not poly:
        return QQ.zero
    if not ring.ngens:
        return poly.get(ring.zero_monom, QQ.zero)
    return poly.evaluate(list(zip(ring.gens, values)))


def _substitute_poly(poly: ParamPoly, images: List[Scalar], field: ScalarField) -> Scalar:
    total = field.zero
    for monom, coeff in poly.terms():
        term = field.from_rational(coeff)
        for image, e in zip(images, monom):
            if e:
                term = term * image**e
        total = total + term
    return total


def _poly_str(poly: ParamPoly) -> str:
    return str(poly).replace("**", "^")


def _format_point(assignment: Mapping[str, RationalLike]) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in assignment.items()) + "}"
