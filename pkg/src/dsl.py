"""
The .hopf presentation language: parser and printer.

    presentation illy {
        gens a, b, c, d
        rel [a,b] = b^2
        coproduct a -> a(x)a + b(x)c
        counit a -> 1
    }
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from src.errors import DuplicateGenerator, HopfcheckError, ParseError, UndeclaredSymbol
from src.freealg import Alphabet, CoproductTable, FreeElement, commutator, format_element, format_tensor, tensor_embed, tensor_sort
from src.scalars import ScalarField

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    presentation: "presentation" NAME "{" decl* "}"
    expr: sum

    decl: "params" name_list          -> params
        | "gens" name_list            -> gens
        | "rel" sum ("=" sum)?        -> rel
        | "coproduct" NAME "->" sum   -> coproduct
        | "counit" NAME "->" sum      -> counit

    name_list: NAME ("," NAME)*

    ?sum: term
        | sum "+" term               -> add
        | sum "-" term               -> sub
    ?term: tensor
        | "-" term                   -> neg
    ?tensor: product
        | product TENSOR product     -> tensor
    ?product: power
        | product "*" power          -> mul
        | product "/" power          -> div
        | product power              -> juxt
    ?power: atom
        | atom "^" INT               -> pow
    ?atom: NAME                      -> symbol
        | INT                        -> number
        | "(" sum ")"
        | "[" sum "," sum "]"        -> bracket

    TENSOR: "(x)"
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    INT: /[0-9]+/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

# "(x)" always lexes as the tensor separator, so no symbol may be called x
RESERVED_NAME = "x"

_parser = Lark(GRAMMAR, start=["presentation", "expr"], parser="lalr", propagate_positions=True)


class _Symbols(list):
    """Pieces of a juxtaposed identifier; a power applies to the last one"""


@v_args(meta=True)
class _ExpressionBuilder(Transformer):
    def __init__(self, alphabet: Alphabet, field: ScalarField, source: str):
        super().__init__()
        self.alphabet = alphabet
        self.square = alphabet.tensor(2)
        self.field = field
        self.source = source
        self.symbols = {name: FreeElement.letter(alphabet, field, name) for name in alphabet.names}
        for p in field.params:
            self.symbols[p] = FreeElement.scalar(alphabet, field, field.param(p))

    def _error(self, meta, message: str) -> ParseError:
        line = getattr(meta, "line", 0) or 0
        column = getattr(meta, "column", 0) or 0
        return ParseError(message, line, column, self.source)

    def _value(self, v) -> FreeElement:
        if isinstance(v, _Symbols):
            result = v[0]
            for piece in v[1:]:
                result = result * piece
            return result
        return v

    def _pair(self, meta, x, y) -> Tuple[FreeElement, FreeElement]:
        x, y = self._value(x), self._value(y)
        if x.alphabet == y.alphabet:
            return x, y
        # only scalars cross between the algebra and its tensor square
        if x.alphabet != self.square and x.is_scalar:
            return FreeElement.scalar(self.square, self.field, x.constant_term()), y
        if y.alphabet != self.square and y.is_scalar:
            return x, FreeElement.scalar(self.square, self.field, y.constant_term())
        raise self._error(meta, "cannot combine a tensor expression with a non-scalar algebra element")

    def symbol(self, meta, children):
        (token,) = children
        text = str(token)
        pieces = _Symbols()
        i = 0
        while i < len(text):
            match = max((s for s in self.symbols if text.startswith(s, i)), key=len, default=None)
            if match is None:
                raise UndeclaredSymbol(
                    f"undeclared symbol in '{text}' at '{text[i:]}'", token.line, token.column + i, self.source
                )
            pieces.append(self.symbols[match])
            i += len(match)
        return pieces

    def number(self, meta, children):
        (token,) = children
        return FreeElement.scalar(self.alphabet, self.field, int(token))

    def pow(self, meta, children):
        base, exponent = children
        n = int(exponent)
        if isinstance(base, _Symbols):
            head = self._value(_Symbols(base[:-1])) if len(base) > 1 else None
            tail = base[-1] ** n
            return tail if head is None else head * tail
        return self._value(base) ** n

    def juxt(self, meta, children):
        x, y = self._pair(meta, *children)
        return x * y

    mul = juxt

    def div(self, meta, children):
        x, y = self._pair(meta, *children)
        if not y.is_scalar:
            raise self._error(meta, "only division by a scalar is allowed")
        if y.is_zero:
            raise self._error(meta, "division by zero")
        return x.scale(y.constant_term().inverse())

    def tensor(self, meta, children):
        left, _, right = children
        left, right = self._value(left), self._value(right)
        if left.alphabet.is_tensor or right.alphabet.is_tensor:
            raise self._error(meta, "nested (x) in a tensor expression")
        return tensor_embed(left, 1, 2) * tensor_embed(right, 2, 2)

    def add(self, meta, children):
        x, y = self._pair(meta, *children)
        return x + y

    def sub(self, meta, children):
        x, y = self._pair(meta, *children)
        return x - y

    def neg(self, meta, children):
        return -self._value(children[0])

    def bracket(self, meta, children):
        x, y = self._pair(meta, *children)
        return commutator(x, y)

    def expr(self, meta, children):
        return self._value(children[0])


def _syntax_error(exc: UnexpectedInput, source: str) -> ParseError:
    line = max(getattr(exc, "line", 0) or 0, 0)
    column = max(getattr(exc, "column", 0) or 0, 0)
    if isinstance(exc, UnexpectedToken):
        expected = ", ".join(sorted(exc.expected))
        message = f"unexpected '{exc.token}'; expected one of {expected}"
    elif isinstance(exc, UnexpectedCharacters):
        message = f"unexpected character '{exc.char}'"
    elif isinstance(exc, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        message = str(exc).splitlines()[0]
    return ParseError(message, line, column, source)


def _parse(text: str, start: str, source: str) -> Tree:
    try:
        return _parser.parse(text, start=start)
    except UnexpectedInput as exc:
        raise _syntax_error(exc, source) from None


def _evaluate(builder: _ExpressionBuilder, tree) -> FreeElement:
    try:
        return builder._value(builder.transform(tree))
    except VisitError as exc:
        if isinstance(exc.orig_exc, HopfcheckError):
            raise exc.orig_exc from None
        raise


def _names(tree: Tree) -> List[Token]:
    return list(tree.children[0].children)


def parse_presentation(text: str, source: str = "<string>"):
    """Parse one ``presentation`` block into a Presentation"""
    from src.bialgebra import Presentation

    tree = _parse(text, "presentation", source)
    name_token, *decls = tree.children
    params: List[str] = []
    gens: List[str] = []
    builder: Optional[_ExpressionBuilder] = None
    relations: List[FreeElement] = []
    coproduct: Dict[str, FreeElement] = {}
    counit: Dict[str, object] = {}

    def declare(token: Token, into: List[str]) -> None:
        name = str(token)
        if builder is not None:
            raise ParseError("params and gens must come before relations", token.line, token.column, source)
        if name == RESERVED_NAME:
            raise ParseError(f"'{name}' is reserved: (x) separates tensor factors", token.line, token.column, source)
        if name in params or name in gens:
            raise DuplicateGenerator(f"'{name}' is declared twice", token.line, token.column, source)
        into.append(name)

    def generator(token: Token, table: Dict[str, object], what: str) -> str:
        name = str(token)
        if name not in gens:
            raise UndeclaredSymbol(f"{what} given for unknown generator '{name}'", token.line, token.column, source)
        if name in table:
            raise DuplicateGenerator(f"{what} of '{name}' given twice", token.line, token.column, source)
        return name

    for decl in decls:
        if decl.data == "params":
            for token in _names(decl):
                declare(token, params)
            continue
        if decl.data == "gens":
            for token in _names(decl):
                declare(token, gens)
            continue
        if builder is None:
            if not gens:
                raise ParseError("no generators declared", decl.meta.line, decl.meta.column, source)
            builder = _ExpressionBuilder(Alphabet(gens), ScalarField(params), source)
        if decl.data == "rel":
            sides = [_evaluate(builder, child) for child in decl.children]
            if any(side.alphabet.is_tensor for side in sides):
                raise ParseError("relations cannot contain (x)", decl.meta.line, decl.meta.column, source)
            rel = sides[0] - sides[1] if len(sides) == 2 else sides[0]
            if rel.is_zero:
                raise ParseError("relation is identically zero", decl.meta.line, decl.meta.column, source)
            relations.append(rel)
        elif decl.data == "coproduct":
            token, body = decl.children
            name = generator(token, coproduct, "coproduct")
            image = _evaluate(builder, body)
            if not image.alphabet.is_tensor:
                raise ParseError(f"coproduct of '{name}' needs a (x) tensor expression", token.line, token.column, source)
            coproduct[name] = tensor_sort(image)
        elif decl.data == "counit":
            token, body = decl.children
            name = generator(token, counit, "counit")
            value = _evaluate(builder, body)
            if value.alphabet.is_tensor or not value.is_scalar:
                raise ParseError(f"counit of '{name}' must be a scalar", token.line, token.column, source)
            counit[name] = value.constant_term()
    if builder is None:
        if not gens:
            raise ParseError("no generators declared", tree.meta.line, tree.meta.column, source)
        builder = _ExpressionBuilder(Alphabet(gens), ScalarField(params), source)
    alphabet = builder.alphabet
    logger.debug("parsed %s: %d generators, %d relations", name_token, len(gens), len(relations))
    return Presentation(
        str(name_token), tuple(params), alphabet, tuple(relations), CoproductTable(alphabet, coproduct), counit
    )


def parse_element(text: str, alphabet: Alphabet, field: ScalarField, source: str = "<expr>") -> FreeElement:
    """Parse a single algebra expression over a known alphabet and field"""
    tree = _parse(text, "expr", source)
    value = _evaluate(_ExpressionBuilder(alphabet, field, source), tree)
    if value.alphabet.is_tensor:
        raise ParseError("expected an algebra element, got a tensor expression", 1, 1, source)
    return value


def print_presentation(p) -> str:
    """DSL text that parses back to ``p``"""
    lines = []
    if p.specialized_at:
        lines.append("# specialized at " + ", ".join(f"{k}={v}" for k, v in p.specialized_at))
    lines.append(f"presentation {p.name} {{")
    if p.params:
        lines.append(f"    params {', '.join(p.params)}")
    lines.append(f"    gens {', '.join(p.alphabet.names)}")
    for rel in p.relations:
        lines.append(f"    rel {format_element(rel)}")
    for name in p.alphabet.names:
        lines.append(f"    coproduct {name} -> {format_tensor(p.coproduct.image(name))}")
    for name in p.alphabet.names:
        lines.append(f"    counit {name} -> {p.counit[name]}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_assignment(items: Sequence[str]) -> Dict[str, str]:
    """``g=0`` style settings; values are kept as text for to_rational"""
    assignment: Dict[str, str] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ParseError(f"expected NAME=VALUE, got '{item}'", source="--set")
        assignment[name.strip()] = value.strip()
    return assignment
