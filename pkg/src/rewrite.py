"""
Noncommutative rewriting: orientation of relations, degree-bounded
completion of overlap ambiguities, normal forms and ideal membership.
"""
import heapq
import logging
import random
from collections import deque
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import TYPE_CHECKING, Deque, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.config import DEFAULT_DEGREE_BOUND, MAX_RULES, NON_MEMBER_SLACK, STEP_BUDGET
from src.errors import AlphabetMismatch, BadFactorIndex, BoundTooSmall, NonOrientable, StepBudgetExceeded
from src.freealg import Alphabet, FreeElement, Word, format_word, tensor_embed, word_key
from src.scalars import Scalar, ScalarField

if TYPE_CHECKING:
    from src.bialgebra import Presentation

logger = logging.getLogger(__name__)


class SystemStatus(str, Enum):
    CONFLUENT = "confluent_up_to_bound"
    INCONCLUSIVE = "inconclusive"
    SATURATED = "saturated"


class Verdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member_up_to_bound"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RewriteRule:
    """lhs -> rhs, encoding the monic relation lhs - rhs = 0"""

    lhs: Word
    rhs: FreeElement
    source: str = ""

    @property
    def degree(self) -> int:
        return len(self.lhs)

    def element(self) -> FreeElement:
        return FreeElement.monomial(self.rhs.alphabet, self.rhs.field, self.lhs) - self.rhs

    def describe(self) -> str:
        return f"{format_word(self.lhs, self.rhs.alphabet)} -> {self.rhs}"


@dataclass(frozen=True)
class TraceStep:
    rule: int
    word: Word
    position: int
    coeff: Scalar


class _Matcher:
    """Leftmost, then longest, left-hand side occurring in a word"""

    def __init__(self):
        self.index: Dict[Word, int] = {}
        self.lengths: List[int] = []

    def add(self, lhs: Word, rid: int) -> None:
        self.index[lhs] = rid
        self._refresh()

    def remove(self, lhs: Word) -> None:
        del self.index[lhs]
        self._refresh()

    def _refresh(self) -> None:
        self.lengths = sorted({len(w) for w in self.index}, reverse=True)

    def find(self, word: Word) -> Optional[Tuple[int, int]]:
        n = len(word)
        for p in range(n + 1):
            for length in self.lengths:
                if p + length <= n:
                    rid = self.index.get(word[p:p + length])
                    if rid is not None:
                        return p, rid
        return None

    def find_all(self, word: Word) -> List[Tuple[int, int]]:
        n = len(word)
        found = []
        for p in range(n + 1):
            for length in self.lengths:
                if p + length <= n:
                    rid = self.index.get(word[p:p + length])
                    if rid is not None:
                        found.append((p, rid))
        return found


def _heap_key(word: Word):
    # largest deglex word first
    return (-len(word), tuple(-i for i in word), word)


def _reduce(
    terms: Mapping[Word, Scalar],
    rules: Mapping[int, RewriteRule],
    matcher: _Matcher,
    budget: int = STEP_BUDGET,
    steps: Optional[List[TraceStep]] = None,
) -> Dict[Word, Scalar]:
    work = dict(terms)
    heap = [_heap_key(w) for w in work]
    heapq.heapify(heap)
    result: Dict[Word, Scalar] = {}
    count = 0
    while heap:
        word = heapq.heappop(heap)[2]
        c = work.pop(word, None)
        if c is None:
            continue
        match = matcher.find(word)
        if match is None:
            result[word] = c
            continue
        count += 1
        if count > budget:
            raise StepBudgetExceeded(f"normal form needed more than {budget} rewrite steps")
        p, rid = match
        rule = rules[rid]
        if steps is not None:
            steps.append(TraceStep(rid, word, p, c))
        left, right = word[:p], word[p + len(rule.lhs):]
        for v, d in rule.rhs.terms.items():
            u = left + v + right
            cd = c * d
            prev = work.get(u)
            if prev is None:
                work[u] = cd
                heapq.heappush(heap, _heap_key(u))
            else:
                s = prev + cd
                if s.is_zero:
                    del work[u]
                else:
                    work[u] = s
    return result


@dataclass(frozen=True)
class RewriteSystem:
    alphabet: Alphabet
    field: ScalarField
    rules: Tuple[RewriteRule, ...]
    degree_bound: int
    status: SystemStatus
    homogeneous: bool = True
    overlaps_checked: int = 0
    overlaps_skipped: int = 0
    _matcher: _Matcher = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        matcher = _Matcher()
        for i, rule in enumerate(self.rules):
            matcher.index[rule.lhs] = i
        matcher._refresh()
        object.__setattr__(self, "_matcher", matcher)

    @property
    def rule_map(self) -> Dict[int, RewriteRule]:
        return dict(enumerate(self.rules))

    def match(self, word: Word) -> Optional[Tuple[int, int]]:
        return self._matcher.find(word)

    def matches(self, word: Word) -> List[Tuple[int, int]]:
        return self._matcher.find_all(word)

    @property
    def max_degree(self) -> int:
        return max((r.degree for r in self.rules), default=0)


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    remainder: FreeElement
    element: FreeElement
    trace: Optional[Tuple[TraceStep, ...]] = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.MEMBER


def orient(relations: Sequence[FreeElement], sources: Optional[Sequence[str]] = None) -> List[RewriteRule]:
    """Monic rules lhs -> lhs - relation, lhs the deglex-largest word"""
    rules: List[RewriteRule] = []
    seen = set()
    for n, rel in enumerate(relations):
        source = sources[n] if sources else f"relation {n + 1}"
        if rel.is_zero:
            logger.debug("skipping zero %s", source)
            continue
        lhs = rel.leading_word()
        lc = rel.terms[lhs]
        if lc.is_zero:
            raise NonOrientable(f"{source} has a zero leading coefficient")
        if not lc.is_constant:
            logger.warning("%s: dividing by parameter-dependent leading coefficient %s", source, lc)
            source = f"{source} [divided by {lc}]"
        rhs = FreeElement.monomial(rel.alphabet, rel.field, lhs) - rel.scale(lc.inverse())
        key = (lhs, rhs)
        if key in seen:
            logger.debug("skipping %s: a constant multiple of an earlier relation", source)
            continue
        seen.add(key)
        rules.append(RewriteRule(lhs, rhs, source))
    return rules


class _RuleLimit(Exception):
    pass


def _contains(word: Word, sub: Word) -> bool:
    n, k = len(word), len(sub)
    return any(word[p:p + k] == sub for p in range(n - k + 1))


def _overlaps(left: Word, right: Word) -> Iterable[int]:
    """Lengths k of proper overlaps: a suffix of ``left`` equal to a prefix of ``right``"""
    for k in range(1, min(len(left), len(right))):
        if left[-k:] == right[:k]:
            yield k


class _Completion:
    def __init__(self, alphabet: Alphabet, field: ScalarField, degree_bound: int, max_rules: int, step_budget: int):
        self.alphabet = alphabet
        self.field = field
        self.degree_bound = degree_bound
        self.max_rules = max_rules
        self.step_budget = step_budget
        self.rules: Dict[int, RewriteRule] = {}
        self.matcher = _Matcher()
        self.pending: Deque[Tuple[Mapping[Word, Scalar], str]] = deque()
        self.pairs: Deque[Tuple[int, int]] = deque()
        self.next_id = 0
        self.checked = 0
        self.skipped = 0
        self.homogeneous = True

    def run(self, rules: Sequence[RewriteRule]) -> RewriteSystem:
        for rule in rules:
            element = rule.element()
            self.homogeneous = self.homogeneous and element.is_homogeneous()
            self.pending.append((element.terms, rule.source))
        status = SystemStatus.SATURATED
        try:
            self._drain()
            while self.pairs:
                i, j = self.pairs.popleft()
                if i in self.rules and j in self.rules:
                    self._resolve(i, j)
            if self.skipped:
                status = SystemStatus.CONFLUENT
        except (StepBudgetExceeded, _RuleLimit) as exc:
            logger.warning("completion stopped early: %s", exc or "rule limit reached")
            status = SystemStatus.INCONCLUSIVE
        return self._finish(status)

    def _resolve(self, i: int, j: int) -> None:
        left, right = self.rules[i], self.rules[j]
        for k in _overlaps(left.lhs, right.lhs):
            size = len(left.lhs) + len(right.lhs) - k
            if size > self.degree_bound:
                self.skipped += 1
                continue
            self.checked += 1
            head = left.lhs[:len(left.lhs) - k]
            tail = right.lhs[k:]
            s = left.rhs.left_right((), tail) - right.rhs.left_right(head, ())
            overlap = format_word(left.lhs + tail, self.alphabet)
            self.pending.append((s.terms, f"overlap {overlap}"))
            self._drain()

    def _drain(self) -> None:
        while self.pending:
            terms, source = self.pending.popleft()
            nf = _reduce(terms, self.rules, self.matcher, self.step_budget)
            if not nf:
                continue
            element = FreeElement._trusted(self.alphabet, self.field, nf)
            (rule,) = orient([element], [source])
            self._insert(rule)

    def _insert(self, rule: RewriteRule) -> None:
        for oid, other in list(self.rules.items()):
            if _contains(other.lhs, rule.lhs):
                del self.rules[oid]
                self.matcher.remove(other.lhs)
                self.pending.append((other.element().terms, other.source))
        rid = self.next_id
        self.next_id += 1
        self.rules[rid] = rule
        self.matcher.add(rule.lhs, rid)
        if len(self.rules) > self.max_rules:
            raise _RuleLimit(f"more than {self.max_rules} rules")
        logger.debug("rule %d: %s (%s)", rid, rule.describe(), rule.source)
        for oid in self.rules:
            self.pairs.append((rid, oid))
            if oid != rid:
                self.pairs.append((oid, rid))

    def _finish(self, status: SystemStatus) -> RewriteSystem:
        final = []
        for rid, rule in sorted(self.rules.items(), key=lambda item: word_key(item[1].lhs)):
            rhs = _reduce(rule.rhs.terms, self.rules, self.matcher, self.step_budget)
            final.append(RewriteRule(rule.lhs, FreeElement._trusted(self.alphabet, self.field, rhs), rule.source))
        logger.info(
            "completion: %d rules, %d overlaps resolved, %d beyond bound %d, status %s",
            len(final), self.checked, self.skipped, self.degree_bound, status.value,
        )
        return RewriteSystem(
            self.alphabet, self.field, tuple(final), self.degree_bound, status,
            self.homogeneous, self.checked, self.skipped,
        )


def complete(
    rules: Sequence[RewriteRule],
    degree_bound: int = DEFAULT_DEGREE_BOUND,
    *,
    alphabet: Optional[Alphabet] = None,
    field: Optional[ScalarField] = None,
    max_rules: int = MAX_RULES,
    step_budget: int = STEP_BUDGET,
) -> RewriteSystem:
    """Resolve every overlap ambiguity whose overlap word has length <= degree_bound"""
    rules = list(rules)
    if rules:
        alphabet = rules[0].rhs.alphabet
        field = rules[0].rhs.field
    elif alphabet is None or field is None:
        raise ValueError("an empty rule list needs an explicit alphabet and field")
    top = max((r.degree for r in rules), default=0)
    if degree_bound < top:
        raise BoundTooSmall(f"degree bound {degree_bound} is below the rule degree {top}")
    return _Completion(alphabet, field, degree_bound, max_rules, step_budget).run(rules)


def _prepare(x: FreeElement, system: RewriteSystem) -> FreeElement:
    if x.alphabet != system.alphabet:
        raise AlphabetMismatch(f"{x.alphabet!r} does not match the system over {system.alphabet!r}")
    return x.with_field(system.field)


def normal_form(
    x: FreeElement,
    system: RewriteSystem,
    rng: Optional[random.Random] = None,
    budget: int = STEP_BUDGET,
    trace: Optional[List[TraceStep]] = None,
) -> FreeElement:
    """Irreducible form of x; with ``rng`` the rewrite order is randomized and no trace is kept"""
    x = _prepare(x, system)
    if rng is None:
        terms = _reduce(x.terms, system.rule_map, system._matcher, budget, trace)
    else:
        terms = _reduce_randomly(x.terms, system, rng, budget)
    return FreeElement._trusted(system.alphabet, system.field, terms)


def _reduce_randomly(terms: Mapping[Word, Scalar], system: RewriteSystem, rng: random.Random, budget: int) -> Dict[Word, Scalar]:
    work = dict(terms)
    for _ in range(budget):
        reducible = sorted((w for w in work if system.match(w) is not None), key=word_key)
        if not reducible:
            return work
        word = rng.choice(reducible)
        p, rid = rng.choice(system.matches(word))
        rule = system.rules[rid]
        c = work.pop(word)
        left, right = word[:p], word[p + len(rule.lhs):]
        for v, d in rule.rhs.terms.items():
            u = left + v + right
            s = work.get(u, system.field.zero) + c * d
            if s.is_zero:
                work.pop(u, None)
            else:
                work[u] = s
    raise StepBudgetExceeded(f"randomized normal form needed more than {budget} rewrite steps")


def ideal_membership(
    x: FreeElement,
    system: RewriteSystem,
    slack: int = NON_MEMBER_SLACK,
    budget: int = STEP_BUDGET,
) -> MembershipVerdict:
    x = _prepare(x, system)
    steps: List[TraceStep] = []
    remainder = normal_form(x, system, budget=budget, trace=steps)
    if remainder.is_zero:
        verdict = Verdict.MEMBER
    elif system.status is SystemStatus.INCONCLUSIVE:
        verdict = Verdict.INCONCLUSIVE
    elif system.status is SystemStatus.SATURATED:
        verdict = Verdict.NON_MEMBER
    elif system.homogeneous and system.degree_bound >= x.degree + slack:
        verdict = Verdict.NON_MEMBER
    else:
        verdict = Verdict.INCONCLUSIVE
    return MembershipVerdict(verdict, remainder, x, tuple(steps))


def replay_trace(verdict: MembershipVerdict, system: RewriteSystem) -> FreeElement:
    """remainder + sum of the recorded ideal elements; equals the input when sound"""
    total = verdict.remainder
    for step in verdict.trace or ():
        rule = system.rules[step.rule]
        left = step.word[:step.position]
        right = step.word[step.position + len(rule.lhs):]
        total = total + rule.element().left_right(left, right).scale(step.coeff)
    return total


def format_trace(verdict: MembershipVerdict, system: RewriteSystem) -> List[str]:
    current = verdict.element
    lines = []
    for n, step in enumerate(verdict.trace or (), 1):
        rule = system.rules[step.rule]
        left = step.word[:step.position]
        right = step.word[step.position + len(rule.lhs):]
        current = current - rule.element().left_right(left, right).scale(step.coeff)
        word = format_word(step.word, system.alphabet)
        lines.append(f"step {n}: rule {step.rule + 1} at {step.position} in {word} -> {current}")
    return lines


def _commutations(base: Alphabet, arity: int, field: ScalarField) -> Tuple[List[FreeElement], List[str]]:
    tensor = base.tensor(arity)
    elements, sources = [], []
    n = len(base.letters)
    for j in range(2, arity + 1):
        for i in range(1, j):
            for x in range(n):
                for y in range(n):
                    hi, lo = tensor.tagged(x, j), tensor.tagged(y, i)
                    elements.append(
                        FreeElement.monomial(tensor, field, (hi, lo)) - FreeElement.monomial(tensor, field, (lo, hi))
                    )
                    sources.append(f"commute {tensor.name(hi)} past {tensor.name(lo)}")
    return elements, sources


def tensor_relations(presentation: "Presentation", arity: int) -> Tuple[List[FreeElement], List[str]]:
    """Relations in every factor followed by the cross-factor commutations"""
    if arity not in (2, 3):
        raise BadFactorIndex(f"tensor quotients are built for arity 2 or 3, not {arity}")
    elements, sources = [], []
    for k in range(1, arity + 1):
        for n, rel in enumerate(presentation.relations, 1):
            elements.append(tensor_embed(rel, k, arity))
            sources.append(f"relation {n} in factor {k}")
    comm, comm_sources = _commutations(presentation.alphabet, arity, presentation.field)
    return elements + comm, sources + comm_sources


def tensor_quotient(
    presentation: "Presentation",
    arity: int,
    degree_bound: int = DEFAULT_DEGREE_BOUND,
    base: Optional[RewriteSystem] = None,
) -> RewriteSystem:
    """Completed system of the ``arity``-fold tensor power; ``base`` seeds each factor with completed rules"""
    if base is None:
        elements, sources = tensor_relations(presentation, arity)
    else:
        if arity not in (2, 3):
            raise BadFactorIndex(f"tensor quotients are built for arity 2 or 3, not {arity}")
        elements, sources = [], []
        for k in range(1, arity + 1):
            for n, rule in enumerate(base.rules, 1):
                elements.append(tensor_embed(rule.element(), k, arity))
                sources.append(f"rule {n} in factor {k}")
        comm, comm_sources = _commutations(presentation.alphabet, arity, presentation.field)
        elements += comm
        sources += comm_sources
    rules = orient(elements, sources)
    return complete(rules, degree_bound, alphabet=presentation.alphabet.tensor(arity), field=presentation.field)
