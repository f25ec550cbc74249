"""
Presentations of bialgebras and the checks run against them.

A Presentation is generators, parameters, relations, a coproduct table and a
counit. The Verifier owns completed rewriting systems and membership oracles
per presentation and turns every check into a CheckReport of per-item
verdicts.
"""
import logging
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from src.config import EngineSettings
from src.errors import AlphabetMismatch, DegreeOverflow, MissingImage, MissingParameter, NonInvertibleMap, PresentationError
from src.freealg import (
    Alphabet,
    CoproductTable,
    FreeElement,
    Substitution,
    apply_gen_map,
    coproduct_extend,
    format_element,
    format_tensor,
    tensor_sort,
)
from src.oracle import MembershipOracle, OracleOutcome, OracleResult
from src.rewrite import (
    RewriteSystem,
    Verdict,
    complete,
    format_trace,
    ideal_membership,
    orient,
    replay_trace,
    tensor_quotient,
    tensor_relations,
)
from src.scalars import RationalLike, Scalar, ScalarField, to_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Presentation:
    name: str
    params: Tuple[str, ...]
    alphabet: Alphabet
    relations: Tuple[FreeElement, ...]
    coproduct: CoproductTable
    counit: Mapping[str, Scalar]
    specialized_at: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        field = ScalarField(self.params)
        object.__setattr__(self, "params", tuple(self.params))
        relations = []
        seen = set()
        for n, rel in enumerate(self.relations, 1):
            if rel.alphabet != self.alphabet:
                raise PresentationError(f"{self.name}: relation {n} is not over {self.alphabet!r}")
            rel = rel.with_field(field)
            if rel.is_zero:
                raise PresentationError(f"{self.name}: relation {n} is zero")
            canonical = rel.monic()
            if canonical in seen:
                raise PresentationError(f"{self.name}: relation {n} repeats an earlier relation")
            seen.add(canonical)
            relations.append(rel)
        object.__setattr__(self, "relations", tuple(relations))
        if self.coproduct.alphabet != self.alphabet:
            raise PresentationError(f"{self.name}: coproduct table is over {self.coproduct.alphabet!r}")
        for name in self.alphabet.names:
            if name not in self.coproduct.images:
                raise PresentationError(f"{self.name}: no coproduct for generator '{name}'")
            if name not in self.counit:
                raise PresentationError(f"{self.name}: no counit for generator '{name}'")
        object.__setattr__(self, "coproduct", self.coproduct.with_field(field))
        object.__setattr__(self, "counit", {name: field.coerce(self.counit[name]) for name in self.alphabet.names})

    @property
    def field(self) -> ScalarField:
        return ScalarField(self.params)

    @property
    def generators(self) -> Tuple[str, ...]:
        return self.alphabet.names

    def canonical_relations(self) -> FrozenSet[FreeElement]:
        return frozenset(r.monic() for r in self.relations)

    def letter(self, name: str) -> FreeElement:
        return FreeElement.letter(self.alphabet, self.field, name)

    def with_params(self, params: Sequence[str]) -> "Presentation":
        """Same presentation over a field with more parameters"""
        missing = [p for p in self.params if p not in params]
        if missing:
            raise MissingParameter(f"parameters {missing} of {self.name} would be lost")
        return Presentation(
            self.name, tuple(params), self.alphabet, self.relations, self.coproduct, self.counit, self.specialized_at
        )

    def with_order(self, order: Sequence[str]) -> "Presentation":
        """Same presentation with the generator order (hence the word order) changed"""
        order = tuple(order)
        if sorted(order) != sorted(self.alphabet.names):
            raise AlphabetMismatch(f"order {','.join(order)} is not a permutation of {','.join(self.alphabet.names)}")
        alphabet = Alphabet(order)
        return Presentation(
            self.name,
            self.params,
            alphabet,
            tuple(r.relabel(alphabet) for r in self.relations),
            self.coproduct.relabel(alphabet),
            self.counit,
            self.specialized_at,
        )

    def renamed(self, name: str) -> "Presentation":
        return Presentation(
            name, self.params, self.alphabet, self.relations, self.coproduct, self.counit, self.specialized_at
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Presentation):
            return NotImplemented
        return (
            self.name == other.name
            and self.params == other.params
            and self.alphabet == other.alphabet
            and self.relations == other.relations
            and dict(self.coproduct.images) == dict(other.coproduct.images)
            and dict(self.counit) == dict(other.counit)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.params, self.alphabet, self.relations))

    def __repr__(self) -> str:
        return f"Presentation({self.name}: {len(self.relations)} relations over {self.alphabet!r})"


@dataclass(frozen=True)
class GenMap:
    """Generator images in the target plus a parameter substitution"""

    source: Presentation
    target: Presentation
    gen_images: Mapping[str, FreeElement]
    param_subst: Mapping[str, Scalar] = dc_field(default_factory=dict)
    name: str = "map"

    def __post_init__(self):
        target = self.target
        symbolic = [p for p in self.source.params if p not in self.param_subst and p not in target.params]
        if symbolic:
            # unmapped source parameters stay symbolic in the target
            target = target.with_params(target.params + tuple(symbolic))
            object.__setattr__(self, "target", target)
        images = {}
        for name in self.source.alphabet.names:
            if name not in self.gen_images:
                raise MissingImage(f"map '{self.name}' gives no image for generator '{name}'")
            img = self.gen_images[name]
            if img.alphabet != target.alphabet:
                raise AlphabetMismatch(f"image of '{name}' under '{self.name}' is not over {target.alphabet!r}")
            images[name] = img.with_field(target.field)
        object.__setattr__(self, "gen_images", images)
        object.__setattr__(self, "param_subst", {k: target.field.coerce(v) for k, v in self.param_subst.items()})

    @property
    def substitution(self) -> Substitution:
        return Substitution(self.target.alphabet, self.target.field, self.gen_images, self.param_subst)

    def apply(self, x: FreeElement) -> FreeElement:
        return apply_gen_map(self.substitution, x)

    def apply_tensor(self, x: FreeElement) -> FreeElement:
        return apply_gen_map(self.substitution.tensor(x.alphabet.arity), x)

    def describe(self) -> str:
        return ";".join(f"{k}={format_element(v)}" for k, v in self.gen_images.items())


def letter_map(source: Presentation, target: Presentation, pairs: Mapping[str, str], name: str = "map") -> GenMap:
    """A GenMap sending each generator to a single target generator"""
    images = {}
    for src, dst in pairs.items():
        if dst not in target.alphabet:
            raise MissingImage(f"'{dst}' is not a generator of {target.name}")
        images[src] = FreeElement.letter(target.alphabet, target.field, dst)
    return GenMap(source, target, images, name=name)


def invert_gen_map(m: GenMap) -> GenMap:
    """Inverse of a permutation of generators; anything else is NonInvertibleMap"""
    for param, value in m.param_subst.items():
        if param not in m.target.params or value != m.target.field.param(param):
            raise NonInvertibleMap(f"map '{m.name}' substitutes parameter '{param}'")
    inverse: Dict[str, str] = {}
    for name, img in m.gen_images.items():
        terms = list(img.terms.items())
        if len(terms) != 1 or len(terms[0][0]) != 1 or not terms[0][1].is_one:
            raise NonInvertibleMap(f"image of '{name}' under '{m.name}' is not a single generator")
        letter = img.alphabet.name(terms[0][0][0])
        if letter in inverse:
            raise NonInvertibleMap(f"map '{m.name}' sends two generators to '{letter}'")
        inverse[letter] = name
    if len(inverse) != m.target.alphabet.size:
        raise NonInvertibleMap(f"map '{m.name}' does not reach every generator of {m.target.name}")
    source = m.source if m.source.params == m.target.params else m.source.with_params(m.target.params)
    return letter_map(m.target, source, inverse, name=f"{m.name}^-1")


def specialize(p: Presentation, assignment: Mapping[str, RationalLike], name: Optional[str] = None) -> Presentation:
    """Evaluate some or all parameters at rationals; zero and repeated relations are dropped"""
    for param in assignment:
        if param not in p.params:
            raise MissingParameter(f"{p.name} has no parameter '{param}'")
    values = {k: to_rational(v) for k, v in assignment.items()}
    remaining = tuple(q for q in p.params if q not in values)
    field = ScalarField(remaining)
    sub = Substitution.identity(p.alphabet, field)
    sub = Substitution(sub.alphabet, field, sub.gen_images, {k: field.from_rational(v) for k, v in values.items()})
    relations = []
    seen = set()
    for n, rel in enumerate(p.relations, 1):
        image = apply_gen_map(sub, rel)
        if image.is_zero:
            logger.info("%s: relation %d vanishes at %s", p.name, n, _point_text(values))
            continue
        canonical = image.monic()
        if canonical in seen:
            logger.info("%s: relation %d repeats an earlier one at %s", p.name, n, _point_text(values))
            continue
        seen.add(canonical)
        relations.append(image)
    square = sub.tensor(2)
    coproduct = CoproductTable(p.alphabet, {k: apply_gen_map(square, v) for k, v in p.coproduct.images.items()})
    counit = {k: v.substitute(sub.param_subst, field) for k, v in p.counit.items()}
    point = p.specialized_at + tuple((k, str(v)) for k, v in values.items())
    return Presentation(name or f"{p.name}_specialized", remaining, p.alphabet, tuple(relations), coproduct, counit, point)


def transport(p: Presentation, m: GenMap, name: Optional[str] = None) -> Presentation:
    """The presentation p rewritten through an invertible generator map out of it"""
    if m.source.alphabet != p.alphabet:
        raise AlphabetMismatch(f"map '{m.name}' does not start at {p.name}")
    back = invert_gen_map(m)
    square = m.substitution.tensor(2)
    coproduct = {}
    counit = {}
    for y in m.target.alphabet.names:
        (word,) = back.gen_images[y].terms
        x = p.alphabet.name(word[0])
        coproduct[y] = tensor_sort(apply_gen_map(square, p.coproduct.image(x)))
        counit[y] = m.substitution.map_scalar(p.counit[x])
    return Presentation(
        name or f"{m.name}({p.name})",
        m.target.params,
        m.target.alphabet,
        tuple(m.apply(r) for r in p.relations),
        CoproductTable(m.target.alphabet, coproduct),
        counit,
        p.specialized_at,
    )


def _point_text(values: Mapping[str, object]) -> str:
    return ",".join(f"{k}={v}" for k, v in values.items())


class ItemVerdict(str, Enum):
    MEMBER = "member"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Overall(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "inconclusive": 2}[self.value]


@dataclass(frozen=True)
class CheckItem:
    label: str
    verdict: ItemVerdict
    remainder: str = ""
    steps: int = 0
    oracle: Optional[str] = None
    note: str = ""
    trace: Tuple[str, ...] = ()
    oracle_trials: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    presentations: Tuple[str, ...]
    items: Tuple[CheckItem, ...] = ()
    metadata: Mapping[str, object] = dc_field(default_factory=dict)
    parts: Tuple["CheckReport", ...] = ()

    def all_items(self) -> List[CheckItem]:
        items = list(self.items)
        for part in self.parts:
            items.extend(part.all_items())
        return items

    @property
    def overall(self) -> Overall:
        verdicts = [item.verdict for item in self.all_items()]
        if all(v is ItemVerdict.MEMBER for v in verdicts):
            return Overall.PASS
        if any(v is ItemVerdict.FAIL for v in verdicts):
            return Overall.FAIL
        return Overall.INCONCLUSIVE

    @property
    def exit_code(self) -> int:
        return self.overall.exit_code

    def counts(self) -> Tuple[int, int]:
        items = self.all_items()
        return sum(1 for i in items if i.verdict is ItemVerdict.MEMBER), len(items)


def _retag(x: FreeElement, target: Alphabet, tags: Sequence[int]) -> FreeElement:
    """Move factor k of a tensor element to factor tags[k-1] of ``target``"""
    source = x.alphabet
    terms = {}
    for w, c in x.terms.items():
        terms[tuple(target.tagged(source.base_index(i), tags[source.tag(i) - 1]) for i in w)] = c
    return FreeElement._trusted(target, x.field, terms)


class Verifier:
    """Runs checks; completed systems and oracles are cached per presentation"""

    def __init__(self, settings: Optional[EngineSettings] = None):
        self.settings = settings or EngineSettings()
        self._systems: Dict[tuple, RewriteSystem] = {}
        self._oracles: Dict[tuple, MembershipOracle] = {}

    @staticmethod
    def _key(p: Presentation, arity: int) -> tuple:
        return (p.params, p.alphabet, p.relations, arity)

    # systems and oracles
    def system(self, p: Presentation) -> RewriteSystem:
        key = self._key(p, 0)
        system = self._systems.get(key)
        if system is None:
            sources = [f"{p.name} relation {n}" for n in range(1, len(p.relations) + 1)]
            rules = orient(list(p.relations), sources)
            system = complete(rules, self.settings.degree_bound, alphabet=p.alphabet, field=p.field)
            self._systems[key] = system
        return system

    def tensor_system(self, p: Presentation, arity: int) -> RewriteSystem:
        key = self._key(p, arity)
        system = self._systems.get(key)
        if system is None:
            system = tensor_quotient(p, arity, self.settings.degree_bound, base=self.system(p))
            self._systems[key] = system
        return system

    def oracle(self, p: Presentation, arity: int = 0) -> MembershipOracle:
        key = self._key(p, arity)
        oracle = self._oracles.get(key)
        if oracle is None:
            if arity:
                relations, _ = tensor_relations(p, arity)
                alphabet = p.alphabet.tensor(arity)
            else:
                relations, alphabet = list(p.relations), p.alphabet
            extra = [dict(p.specialized_at)] if p.specialized_at else []
            s = self.settings
            oracle = MembershipOracle(
                relations, s.oracle_cap, s.trials, s.seed, extra, alphabet=alphabet, field=p.field
            )
            self._oracles[key] = oracle
        return oracle

    # items
    def _membership_item(
        self,
        label: str,
        x: FreeElement,
        system: RewriteSystem,
        oracle: Callable[[], MembershipOracle],
    ) -> CheckItem:
        if x.is_zero:
            return CheckItem(label, ItemVerdict.MEMBER, note="zero before reduction")
        result = ideal_membership(x, system)
        steps = len(result.trace or ())
        trace = tuple(format_trace(result, system)) if self.settings.trace else ()
        note = ""
        if result.verdict is Verdict.MEMBER:
            verdict = ItemVerdict.MEMBER
            remainder = ""
            if replay_trace(result, system) != result.element:
                verdict, note = ItemVerdict.FAIL, "trace replay mismatch"
        else:
            verdict = ItemVerdict.FAIL if result.verdict is Verdict.NON_MEMBER else ItemVerdict.INCONCLUSIVE
            remainder = _print_remainder(result.remainder)
        outcome, trials = None, ()
        if self.settings.oracle and verdict is not ItemVerdict.INCONCLUSIVE and not note:
            try:
                checked = oracle().check(x)
            except DegreeOverflow as exc:
                logger.info("%s: oracle skipped: %s", label, exc)
                note = "oracle skipped: degree above cap"
            else:
                outcome = checked.outcome.value
                trials = tuple(t.describe() for t in checked.trials)
                if checked.outcome is OracleOutcome.INCONCLUSIVE:
                    note = "oracle inconclusive" if checked.rank_stable else "oracle inconclusive: unstable ranks"
                elif _disagrees(result.verdict, checked, x, self.settings.oracle_cap):
                    logger.warning("%s: rewriting says %s, oracle says %s", label, result.verdict.value, outcome)
                    verdict, note = ItemVerdict.FAIL, "oracle disagreement"
        return CheckItem(label, verdict, remainder, steps, outcome, note, trace, trials)

    def _metadata(self, system: Optional[RewriteSystem] = None) -> Dict[str, object]:
        s = self.settings
        meta: Dict[str, object] = {"degree_bound": s.degree_bound, "seed": s.seed, "trials": s.trials, "oracle": s.oracle}
        if system is not None:
            meta["rules"] = len(system.rules)
            meta["status"] = system.status.value
        return meta

    # checks
    def check_delta_hom(self, p: Presentation) -> CheckReport:
        system = self.tensor_system(p, 2)
        items = []
        for n, rel in enumerate(p.relations, 1):
            image = coproduct_extend(p.coproduct, rel)
            items.append(self._membership_item(f"REL {n}", image, system, lambda: self.oracle(p, 2)))
        return CheckReport("delta_hom", (p.name,), tuple(items), self._metadata(system))

    def check_coassoc(self, p: Presentation) -> CheckReport:
        cube = p.alphabet.tensor(3)
        field = p.field
        left_images, right_images = {}, {}
        for k, name in enumerate(p.alphabet.names):
            delta = p.coproduct.image(name)
            left_images[f"{name}(1)"] = _retag(delta, cube, (1, 2))
            left_images[f"{name}(2)"] = FreeElement.monomial(cube, field, (cube.tagged(k, 3),))
            right_images[f"{name}(1)"] = FreeElement.monomial(cube, field, (cube.tagged(k, 1),))
            right_images[f"{name}(2)"] = _retag(delta, cube, (2, 3))
        left = Substitution(cube, field, left_images)
        right = Substitution(cube, field, right_images)
        items = []
        system = None
        for name in p.alphabet.names:
            delta = p.coproduct.image(name)
            diff = apply_gen_map(left, delta) - apply_gen_map(right, delta)
            if diff.is_zero:
                items.append(CheckItem(f"GEN {name}", ItemVerdict.MEMBER, note="zero before reduction"))
                continue
            system = self.tensor_system(p, 3)
            items.append(self._membership_item(f"GEN {name}", diff, system, lambda: self.oracle(p, 3)))
        return CheckReport("coassoc", (p.name,), tuple(items), self._metadata(system))

    def check_counit(self, p: Presentation) -> CheckReport:
        base = p.alphabet
        field = p.field
        eps = {name: FreeElement.scalar(base, field, p.counit[name]) for name in base.names}
        left = Substitution(base, field, {**{f"{n}(1)": eps[n] for n in base.names}, **{f"{n}(2)": p.letter(n) for n in base.names}})
        right = Substitution(base, field, {**{f"{n}(1)": p.letter(n) for n in base.names}, **{f"{n}(2)": eps[n] for n in base.names}})
        system = self.system(p)
        items = []
        for name in base.names:
            delta = p.coproduct.image(name)
            for side, sub in (("LEFT", left), ("RIGHT", right)):
                diff = apply_gen_map(sub, delta) - p.letter(name)
                items.append(self._membership_item(f"{side} {name}", diff, system, lambda: self.oracle(p)))
        counit_map = Substitution(base, field, eps)
        for n, rel in enumerate(p.relations, 1):
            value = apply_gen_map(counit_map, rel)
            if value.is_zero:
                items.append(CheckItem(f"EPS REL {n}", ItemVerdict.MEMBER))
            else:
                items.append(CheckItem(f"EPS REL {n}", ItemVerdict.FAIL, format_element(value)))
        return CheckReport("counit", (p.name,), tuple(items), self._metadata(system))

    def check_bialgebra(self, p: Presentation) -> CheckReport:
        parts = (self.check_delta_hom(p), self.check_coassoc(p), self.check_counit(p))
        return CheckReport("bialgebra", (p.name,), (), self._metadata(), parts)

    def check_algebra_morphism(self, m: GenMap) -> CheckReport:
        target = m.target
        system = self.system(target)
        items = []
        for n, rel in enumerate(m.source.relations, 1):
            items.append(self._membership_item(f"REL {n}", m.apply(rel), system, lambda: self.oracle(target)))
        return CheckReport(f"algebra_morphism {m.name}", (m.source.name, target.name), tuple(items), self._metadata(system))

    def check_coalgebra_morphism(self, m: GenMap) -> CheckReport:
        source, target = m.source, m.target
        system = self.tensor_system(target, 2)
        items = []
        for name in source.alphabet.names:
            mapped = m.apply_tensor(source.coproduct.image(name))
            diff = tensor_sort(mapped - coproduct_extend(target.coproduct, m.gen_images[name]))
            items.append(self._membership_item(f"GEN {name}", diff, system, lambda: self.oracle(target, 2)))
        return CheckReport(
            f"coalgebra_morphism {m.name}", (source.name, target.name), tuple(items), self._metadata(system)
        )

    def check_equivalence(self, p: Presentation, q: Presentation, m: GenMap) -> CheckReport:
        if m.source.alphabet != p.alphabet or m.target.alphabet != q.alphabet:
            raise AlphabetMismatch(f"map '{m.name}' does not go from {p.name} to {q.name}")
        inverse = invert_gen_map(m)
        parts = (
            self.check_algebra_morphism(m),
            self.check_algebra_morphism(inverse),
            self.check_coalgebra_morphism(m),
            self.check_coalgebra_morphism(inverse),
        )
        return CheckReport("equivalence", (p.name, q.name), (), {**self._metadata(), "map": m.name}, parts)

    def check_relation_sets(self, p: Presentation, q: Presentation) -> CheckReport:
        """Equality of the canonical (monic) relation sets of p and q"""
        params = p.params + tuple(x for x in q.params if x not in p.params)
        left = p.with_params(params)
        right = q.with_params(params)
        if sorted(left.alphabet.names) != sorted(right.alphabet.names):
            raise AlphabetMismatch(f"{p.name} and {q.name} have different generators")
        right = right.with_order(left.alphabet.names)
        ours, theirs = left.canonical_relations(), right.canonical_relations()
        items = []
        for label, pres, other, other_name in ((p.name, left, theirs, q.name), (q.name, right, ours, p.name)):
            for n, rel in enumerate(pres.relations, 1):
                canonical = rel.monic()
                if canonical in other:
                    items.append(CheckItem(f"{label} REL {n}", ItemVerdict.MEMBER))
                else:
                    items.append(
                        CheckItem(f"{label} REL {n}", ItemVerdict.FAIL, format_element(canonical), note=f"not a relation of {other_name}")
                    )
        return CheckReport("relation_sets", (p.name, q.name), tuple(items), {"relations": [len(ours), len(theirs)]})


def _disagrees(verdict: Verdict, checked: OracleResult, x: FreeElement, cap: int) -> bool:
    if verdict is Verdict.MEMBER:
        return checked.outcome is not OracleOutcome.MEMBER and (checked.graded or x.degree + 2 <= cap)
    if verdict is Verdict.NON_MEMBER:
        return checked.outcome is not OracleOutcome.WITNESS and (checked.graded or x.degree + 2 <= cap)
    return False


def _print_remainder(x: FreeElement) -> str:
    if x.alphabet.arity == 2:
        return format_tensor(tensor_sort(x))
    return format_element(x)
