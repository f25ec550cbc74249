"""
Free associative algebra over Q(params) on a finite ordered alphabet.

Words are tuples of letter indices; the index order is the alphabet order,
so deglex comparison is comparison of (length, word). Tensor powers are free
algebras on tagged copies of a base alphabet: in the k-fold alphabet the
factor-1 letters come first, then factor-2, and so on.
"""
import logging
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from src.errors import AlphabetMismatch, BadFactorIndex, FieldMismatch, MissingImage, PresentationError
from src.scalars import Rational, RationalLike, Scalar, ScalarField

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]


def word_key(word: Word) -> Tuple[int, Word]:
    return (len(word), word)


class Alphabet:
    """Ordered generator names, optionally as ``arity`` tagged copies"""

    __slots__ = ("letters", "arity", "names", "_index")

    def __init__(self, letters: Sequence[str], arity: int = 0):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            raise ValueError(f"letter names must be distinct: {letters}")
        if arity < 0:
            raise BadFactorIndex(f"arity must be non-negative, got {arity}")
        self.letters = letters
        self.arity = arity
        if arity:
            self.names = tuple(f"{x}({k})" for k in range(1, arity + 1) for x in letters)
        else:
            self.names = letters
        self._index = {name: i for i, name in enumerate(self.names)}

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def is_tensor(self) -> bool:
        return self.arity > 0

    def name(self, i: int) -> str:
        return self.names[i]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MissingImage(f"'{name}' is not a letter of {self!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def tag(self, i: int) -> Optional[int]:
        """Tensor factor (1-based) of letter ``i``; None for a plain alphabet"""
        if not self.arity:
            return None
        return i // len(self.letters) + 1

    def base_index(self, i: int) -> int:
        return i % len(self.letters)

    def tagged(self, base_index: int, factor: int) -> int:
        return (factor - 1) * len(self.letters) + base_index

    def tensor(self, arity: int) -> "Alphabet":
        if self.arity:
            raise BadFactorIndex("tensor powers are formed from a plain alphabet")
        if arity < 1:
            raise BadFactorIndex(f"tensor arity must be at least 1, got {arity}")
        return Alphabet(self.letters, arity)

    @property
    def base(self) -> "Alphabet":
        return Alphabet(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.letters == other.letters and self.arity == other.arity

    def __hash__(self) -> int:
        return hash((self.letters, self.arity))

    def __repr__(self) -> str:
        if self.arity:
            return f"Alphabet({','.join(self.letters)})^{self.arity}"
        return f"Alphabet({','.join(self.letters)})"


def word_compare(u: Word, v: Word, alphabet: Optional[Alphabet] = None) -> int:
    """Deglex comparison: -1, 0 or 1"""
    if alphabet is not None:
        for w in (u, v):
            if any(not 0 <= i < alphabet.size for i in w):
                raise AlphabetMismatch(f"word {w} is not over {alphabet!r}")
    ku, kv = word_key(u), word_key(v)
    return (ku > kv) - (ku < kv)


class FreeElement:
    """Finite linear combination of words with Scalar coefficients; immutable"""

    __slots__ = ("alphabet", "field", "terms", "_hash")

    def __init__(self, alphabet: Alphabet, field: ScalarField, terms: Optional[Mapping[Word, Scalar]] = None):
        self.alphabet = alphabet
        self.field = field
        self.terms: Dict[Word, Scalar] = {w: c for w, c in (terms or {}).items() if not c.is_zero}
        self._hash = None

    @classmethod
    def _trusted(cls, alphabet: Alphabet, field: ScalarField, terms: Dict[Word, Scalar]) -> "FreeElement":
        obj = cls.__new__(cls)
        obj.alphabet = alphabet
        obj.field = field
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, alphabet: Alphabet, field: ScalarField) -> "FreeElement":
        return cls._trusted(alphabet, field, {})

    @classmethod
    def scalar(cls, alphabet: Alphabet, field: ScalarField, value: Union[Scalar, RationalLike]) -> "FreeElement":
        return cls(alphabet, field, {(): field.coerce(value)})

    @classmethod
    def one(cls, alphabet: Alphabet, field: ScalarField) -> "FreeElement":
        return cls._trusted(alphabet, field, {(): field.one})

    @classmethod
    def monomial(cls, alphabet: Alphabet, field: ScalarField, word: Word, coeff=None) -> "FreeElement":
        return cls(alphabet, field, {tuple(word): field.one if coeff is None else field.coerce(coeff)})

    @classmethod
    def letter(cls, alphabet: Alphabet, field: ScalarField, name: str) -> "FreeElement":
        return cls._trusted(alphabet, field, {(alphabet.index(name),): field.one})

    # inspection
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_scalar(self) -> bool:
        return all(not w for w in self.terms)

    @property
    def degree(self) -> int:
        """Length of the longest word; -1 for zero"""
        return max((len(w) for w in self.terms), default=-1)

    def constant_term(self) -> Scalar:
        return self.terms.get((), self.field.zero)

    def leading_word(self) -> Word:
        if not self.terms:
            raise ValueError("the zero element has no leading word")
        return max(self.terms, key=word_key)

    def leading_coefficient(self) -> Scalar:
        return self.terms[self.leading_word()]

    def sorted_terms(self, descending: bool = False) -> List[Tuple[Word, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]), reverse=descending)

    def is_homogeneous(self, key: Callable[[Word], object] = len) -> bool:
        return len({key(w) for w in self.terms}) <= 1

    def monic(self) -> "FreeElement":
        """Scaled so the deglex-largest word has coefficient 1"""
        if not self.terms:
            return self
        return self.scale(self.leading_coefficient().inverse())

    def evaluate(self, point: Mapping[str, RationalLike]) -> Dict[Word, Rational]:
        values = {}
        for w, c in self.terms.items():
            v = c.evaluate(point)
            if v:
                values[w] = v
        return values

    def used_params(self) -> Tuple[str, ...]:
        used = set()
        for c in self.terms.values():
            used.update(c.used_params())
        return tuple(p for p in self.field.params if p in used)

    # arithmetic
    def _check(self, other: "FreeElement") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"{self.alphabet!r} and {other.alphabet!r} differ")
        if self.field is not other.field:
            raise FieldMismatch(f"{self.field!r} and {other.field!r} differ")

    def _lift(self, other) -> "FreeElement":
        if isinstance(other, FreeElement):
            self._check(other)
            return other
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise FieldMismatch(f"{self.field!r} and {other.field!r} differ")
            return FreeElement(self.alphabet, self.field, {(): other})
        if isinstance(other, int) and not isinstance(other, bool):
            return FreeElement.scalar(self.alphabet, self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        _accumulate(terms, other.terms)
        return FreeElement._trusted(self.alphabet, self.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return FreeElement._trusted(self.alphabet, self.field, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        _accumulate(terms, other.terms, -self.field.one)
        return FreeElement._trusted(self.alphabet, self.field, terms)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms: Dict[Word, Scalar] = {}
        for u, c in self.terms.items():
            for v, d in other.terms.items():
                w = u + v
                cd = c * d
                prev = terms.get(w)
                terms[w] = cd if prev is None else prev + cd
        return FreeElement(self.alphabet, self.field, terms)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "FreeElement":
        if n < 0:
            raise ValueError("negative powers are not defined in a free algebra")
        result = FreeElement.one(self.alphabet, self.field)
        for _ in range(n):
            result = result * self
        return result

    def scale(self, c: Union[Scalar, RationalLike]) -> "FreeElement":
        c = self.field.coerce(c)
        if c.is_zero:
            return FreeElement.zero(self.alphabet, self.field)
        if c.is_one:
            return self
        return FreeElement._trusted(self.alphabet, self.field, {w: c * d for w, d in self.terms.items()})

    def left_right(self, left: Word, right: Word) -> "FreeElement":
        """left * self * right for words left, right"""
        if not left and not right:
            return self
        return FreeElement._trusted(self.alphabet, self.field, {left + w + right: c for w, c in self.terms.items()})

    # re-expression
    def with_field(self, field: ScalarField) -> "FreeElement":
        if field is self.field:
            return self
        return FreeElement(self.alphabet, field, {w: field.coerce(c) for w, c in self.terms.items()})

    def relabel(self, alphabet: Alphabet) -> "FreeElement":
        """Same element over an alphabet holding the same letters in another order"""
        if alphabet == self.alphabet:
            return self
        if sorted(alphabet.names) != sorted(self.alphabet.names):
            raise AlphabetMismatch(f"{alphabet!r} does not hold the letters of {self.alphabet!r}")
        perm = [alphabet.index(name) for name in self.alphabet.names]
        return FreeElement._trusted(alphabet, self.field, {tuple(perm[i] for i in w): c for w, c in self.terms.items()})

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.alphabet == other.alphabet and self.field is other.field and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet, self.field.params, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"FreeElement({format_element(self)})"


def _accumulate(terms: Dict[Word, Scalar], other: Mapping[Word, Scalar], factor: Optional[Scalar] = None) -> None:
    for w, c in other.items():
        if factor is not None:
            c = c * factor
        prev = terms.get(w)
        if prev is None:
            if not c.is_zero:
                terms[w] = c
        else:
            s = prev + c
            if s.is_zero:
                del terms[w]
            else:
                terms[w] = s


def elem_arith(op: str, x: FreeElement, y: Union[FreeElement, Scalar]) -> FreeElement:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        if not isinstance(y, FreeElement):
            raise TypeError("mul expects a FreeElement; use scale for scalars")
        return x * y
    if op == "scale":
        return x.scale(y)
    raise ValueError(f"unknown element operation '{op}'")


def commutator(x: FreeElement, y: FreeElement) -> FreeElement:
    return x * y - y * x


@dataclass(frozen=True)
class Substitution:
    """Generator images in a target algebra plus a parameter substitution"""

    alphabet: Alphabet
    field: ScalarField
    gen_images: Mapping[str, FreeElement]
    param_subst: Mapping[str, Scalar] = dc_field(default_factory=dict)

    @classmethod
    def identity(cls, alphabet: Alphabet, field: ScalarField) -> "Substitution":
        return cls(alphabet, field, {name: FreeElement.letter(alphabet, field, name) for name in alphabet.names})

    def image(self, name: str) -> FreeElement:
        try:
            return self.gen_images[name]
        except KeyError:
            raise MissingImage(f"no image for generator '{name}'") from None

    def map_scalar(self, c: Scalar) -> Scalar:
        if c.field is self.field and not self.param_subst:
            return c
        return c.substitute(self.param_subst, self.field)

    def tensor(self, arity: int) -> "Substitution":
        """The map applied factorwise on ``arity`` tagged copies"""
        target = self.alphabet.tensor(arity)
        images = {}
        for k in range(1, arity + 1):
            for name, img in self.gen_images.items():
                images[f"{name}({k})"] = tensor_embed(img, k, arity)
        return Substitution(target, self.field, images, self.param_subst)


def apply_gen_map(mapping: Substitution, x: FreeElement) -> FreeElement:
    """Algebra homomorphism extension of generator images to ``x``"""
    images: Dict[int, FreeElement] = {}
    terms: Dict[Word, Scalar] = {}
    one = FreeElement.one(mapping.alphabet, mapping.field)
    for word, c in x.sorted_terms():
        product = one
        for i in word:
            img = images.get(i)
            if img is None:
                img = mapping.image(x.alphabet.name(i))
                if img.alphabet != mapping.alphabet:
                    raise AlphabetMismatch(f"image of '{x.alphabet.name(i)}' is not over {mapping.alphabet!r}")
                img = img.with_field(mapping.field)
                images[i] = img
            product = product * img
        _accumulate(terms, product.terms, mapping.map_scalar(c))
    return FreeElement._trusted(mapping.alphabet, mapping.field, terms)


def tensor_embed(x: FreeElement, factor: int, arity: int) -> FreeElement:
    """Rewrite every letter of a plain element into its factor-tagged copy"""
    if x.alphabet.is_tensor:
        raise BadFactorIndex("only elements over a plain alphabet can be embedded")
    if not 1 <= factor <= arity:
        raise BadFactorIndex(f"factor {factor} outside 1..{arity}")
    target = x.alphabet.tensor(arity)
    shift = (factor - 1) * len(x.alphabet.letters)
    return FreeElement._trusted(target, x.field, {tuple(i + shift for i in w): c for w, c in x.terms.items()})


def tensor_sort(x: FreeElement) -> FreeElement:
    """Cross-factor commutation normal form: letters stably sorted by factor"""
    if not x.alphabet.is_tensor:
        return x
    terms: Dict[Word, Scalar] = {}
    tag = x.alphabet.tag
    for w, c in x.terms.items():
        _accumulate(terms, {tuple(sorted(w, key=tag)): c})
    return FreeElement._trusted(x.alphabet, x.field, terms)


@dataclass(frozen=True)
class CoproductTable:
    """Generator -> image over the 2-copy alphabet, matrix-comultiplication shaped"""

    alphabet: Alphabet
    images: Mapping[str, FreeElement]

    def __post_init__(self):
        square = self.alphabet.tensor(2)
        for name, img in self.images.items():
            if name not in self.alphabet:
                raise PresentationError(f"coproduct given for unknown generator '{name}'")
            if img.alphabet != square:
                raise PresentationError(f"coproduct of '{name}' is not over the tensor square")
            for w in img.terms:
                tags = sorted(square.tag(i) for i in w)
                if tags != [1, 2]:
                    raise PresentationError(
                        f"coproduct of '{name}' has term {format_word(w, square)} of the wrong shape; "
                        "every term needs one letter from each tensor factor"
                    )

    @property
    def field(self) -> Optional[ScalarField]:
        for img in self.images.values():
            return img.field
        return None

    def image(self, name: str) -> FreeElement:
        try:
            return self.images[name]
        except KeyError:
            raise MissingImage(f"no coproduct image for generator '{name}'") from None

    def with_field(self, field: ScalarField) -> "CoproductTable":
        return CoproductTable(self.alphabet, {k: v.with_field(field) for k, v in self.images.items()})

    def relabel(self, alphabet: Alphabet) -> "CoproductTable":
        square = alphabet.tensor(2)
        return CoproductTable(alphabet, {k: v.relabel(square) for k, v in self.images.items()})

    def substitution(self, field: ScalarField) -> Substitution:
        images = {name: img.with_field(field) for name, img in self.images.items()}
        return Substitution(self.alphabet.tensor(2), field, images)


def coproduct_extend(table: CoproductTable, x: FreeElement) -> FreeElement:
    """Multiplicative extension of the coproduct; the raw free tensor element"""
    if x.alphabet != table.alphabet:
        raise AlphabetMismatch(f"{x.alphabet!r} does not match the coproduct table")
    return apply_gen_map(table.substitution(x.field), x)


# printing

def _juxtapose(alphabet: Alphabet) -> bool:
    return alphabet.is_tensor or all(len(name) == 1 for name in alphabet.letters)


def format_word(word: Word, alphabet: Alphabet, juxtapose: Optional[bool] = None) -> str:
    if not word:
        return "1"
    if juxtapose is None:
        juxtapose = _juxtapose(alphabet)
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        name = alphabet.name(word[i])
        parts.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return ("" if juxtapose else "*").join(parts)


def format_term(word: Word, coeff: Scalar, alphabet: Alphabet, first: bool, juxtapose: Optional[bool] = None) -> str:
    negative = coeff.is_constant and coeff.constant_value() < 0
    magnitude = -coeff if negative else coeff
    if not word:
        body = str(magnitude) if magnitude.is_atomic else f"({magnitude})"
    elif magnitude.is_one:
        body = format_word(word, alphabet, juxtapose)
    elif magnitude.is_atomic:
        body = f"{magnitude}*{format_word(word, alphabet, juxtapose)}"
    else:
        body = f"({magnitude})*{format_word(word, alphabet, juxtapose)}"
    if first:
        return f"-{body}" if negative else body
    return f" - {body}" if negative else f" + {body}"


def format_element(x: FreeElement, juxtapose: Optional[bool] = None) -> str:
    """Terms in ascending deglex order, e.g. ``ab - b^2``"""
    if x.is_zero:
        return "0"
    pieces = [format_term(w, c, x.alphabet, i == 0, juxtapose) for i, (w, c) in enumerate(x.sorted_terms())]
    return "".join(pieces)


def format_tensor(x: FreeElement, juxtapose: Optional[bool] = None) -> str:
    """A 2-fold tensor element in DSL form, ``a(x)a + b(x)c``; words must be factor-sorted"""
    alphabet = x.alphabet
    if alphabet.arity != 2:
        raise BadFactorIndex("format_tensor expects an element of the tensor square")
    base = alphabet.base
    if juxtapose is None:
        juxtapose = _juxtapose(base)
    if x.is_zero:
        return "0"
    pieces = []
    for n, (w, c) in enumerate(x.sorted_terms()):
        tags = [alphabet.tag(i) for i in w]
        if tags != sorted(tags):
            raise BadFactorIndex(f"term {format_word(w, alphabet)} is not factor-sorted")
        left = tuple(alphabet.base_index(i) for i in w if alphabet.tag(i) == 1)
        right = tuple(alphabet.base_index(i) for i in w if alphabet.tag(i) == 2)
        text = f"{format_word(left, base, juxtapose)}(x){format_word(right, base, juxtapose)}"
        negative = c.is_constant and c.constant_value() < 0
        magnitude = -c if negative else c
        if not magnitude.is_one:
            text = f"{magnitude}*{text}" if magnitude.is_atomic else f"({magnitude})*{text}"
        if n == 0:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces)
