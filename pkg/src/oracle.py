"""
Degree-bounded linear-algebra ideal membership at rational parameter points.

Independent of the rewriting engine: at each point the two-sided ideal is
truncated to words of length <= cap, spanned by the products u*r*v, put in
reduced row echelon form over QQ, and the query vector is reduced against the
pivot rows.
"""
import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from src.config import DEFAULT_SEED, DEFAULT_TRIALS, ORACLE_DEGREE_CAP, POINT_RETRIES, RANDOM_POINT_RANGE, RANK_AGREEMENT
from src.errors import AlphabetMismatch, DegreeOverflow, PoleAtPoint
from src.freealg import Alphabet, FreeElement, Word
from src.scalars import Rational, RationalLike, ScalarField, to_rational

logger = logging.getLogger(__name__)

Point = Dict[str, Rational]
GradeKey = Tuple[int, Tuple[int, ...]]


class GradedBasis:
    """All words of length <= cap in deglex order"""

    def __init__(self, alphabet: Alphabet, cap: int):
        self.alphabet = alphabet
        self.degree_cap = cap
        self.words: List[Word] = []
        for k in range(cap + 1):
            self.words.extend(itertools.product(range(alphabet.size), repeat=k))
        self.index: Dict[Word, int] = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)


class OracleOutcome(str, Enum):
    MEMBER = "member_at_all_points"
    WITNESS = "non_member_witness"
    MIXED = "mixed"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OracleTrial:
    point: Tuple[Tuple[str, str], ...]
    rows: int
    cols: int
    rank: int
    member: bool

    def describe(self) -> str:
        where = ", ".join(f"{k}={v}" for k, v in self.point) or "no parameters"
        verdict = "member" if self.member else "non-member"
        return f"{where}: {self.rows}x{self.cols}, rank {self.rank}, {verdict}"


@dataclass(frozen=True)
class OracleResult:
    outcome: OracleOutcome
    trials: Tuple[OracleTrial, ...]
    graded: bool
    rank_stable: bool = True

    @property
    def witness(self) -> Optional[Tuple[Tuple[str, str], ...]]:
        for trial in self.trials:
            if not trial.member:
                return trial.point
        return None


def grade(word: Word, alphabet: Alphabet) -> GradeKey:
    """(length, letters per tensor factor); plain alphabets grade by length only"""
    if not alphabet.is_tensor:
        return (len(word), ())
    counts = Counter(alphabet.tag(i) for i in word)
    return (len(word), tuple(counts.get(k, 0) for k in range(1, alphabet.arity + 1)))


def _sub_grade(total: GradeKey, part: GradeKey) -> Optional[GradeKey]:
    length = total[0] - part[0]
    counts = tuple(a - b for a, b in zip(total[1], part[1]))
    if length < 0 or any(c < 0 for c in counts):
        return None
    return (length, counts)


class _Echelon:
    """Pivot rows of one span; query vectors are reduced against them"""

    def __init__(self, rows: List[Dict[int, Rational]], ncols: int):
        self.nrows = len(rows)
        self.ncols = ncols
        self.pivots: List[Tuple[int, Dict[int, Rational]]] = []
        if rows and ncols:
            matrix = DomainMatrix({i: r for i, r in enumerate(rows)}, (len(rows), ncols), QQ)
            reduced, _ = matrix.rref()
            for row in reduced.to_sdm().values():
                if row:
                    self.pivots.append((min(row), row))
        self.rank = len(self.pivots)

    def reduce(self, vector: Dict[int, Rational]) -> Dict[int, Rational]:
        v = dict(vector)
        for col, row in self.pivots:
            c = v.get(col)
            if not c:
                continue
            for j, val in row.items():
                s = v.get(j, QQ.zero) - c * val
                if s:
                    v[j] = s
                else:
                    v.pop(j, None)
        return v


class MembershipOracle:
    """Oracle over one relation list; points and echelon forms are reused across queries"""

    def __init__(
        self,
        relations: Sequence[FreeElement],
        cap: int = ORACLE_DEGREE_CAP,
        trials: int = DEFAULT_TRIALS,
        seed: int = DEFAULT_SEED,
        extra_points: Sequence[Mapping[str, RationalLike]] = (),
        alphabet: Optional[Alphabet] = None,
        field: Optional[ScalarField] = None,
    ):
        relations = [r for r in relations if not r.is_zero]
        if not relations and (alphabet is None or field is None):
            raise ValueError("an empty relation list needs an explicit alphabet and field")
        self.alphabet = alphabet or relations[0].alphabet
        self.field = field or relations[0].field
        for r in relations:
            if r.alphabet != self.alphabet:
                raise AlphabetMismatch(f"relation over {r.alphabet!r} in an oracle over {self.alphabet!r}")
            if r.degree > cap:
                raise DegreeOverflow(f"relation of degree {r.degree} exceeds the oracle cap {cap}")
        self.relations = [r.with_field(self.field) for r in relations]
        self.cap = cap
        self.graded = all(len({grade(w, self.alphabet) for w in r.terms}) == 1 for r in self.relations)
        self.points = self._choose_points(trials, seed, extra_points)
        self._evaluated: Dict[int, List[Dict[Word, Rational]]] = {}
        self._spans: Dict[Tuple[int, Optional[GradeKey]], Tuple[Dict[Word, int], _Echelon]] = {}
        self._basis: Optional[GradedBasis] = None

    def _choose_points(self, trials: int, seed: int, extra: Sequence[Mapping[str, RationalLike]]) -> List[Point]:
        params = self.field.params
        points: List[Point] = []
        for fixed in extra:
            point = {k: to_rational(v) for k, v in fixed.items() if k in params}
            if self._admissible(point):
                points.append(point)
            else:
                logger.warning("dropping fixed point %s: a relation has a pole there", point)
        if not params:
            return points or [{}]
        rng = random.Random(seed)
        drawn = 0
        for _ in range(trials):
            for _attempt in range(POINT_RETRIES):
                point = {p: self._random_rational(rng) for p in params}
                if self._admissible(point):
                    points.append(point)
                    drawn += 1
                    break
                logger.warning("rejecting pole point %s", point)
        if drawn < trials:
            logger.warning("only %d of %d random points avoid every pole of the relations", drawn, trials)
        return points

    @staticmethod
    def _random_rational(rng: random.Random) -> Rational:
        num = rng.randint(-RANDOM_POINT_RANGE, RANDOM_POINT_RANGE)
        den = 0
        while den == 0:
            den = rng.randint(-RANDOM_POINT_RANGE, RANDOM_POINT_RANGE)
        return QQ(num, den)

    def _admissible(self, point: Point) -> bool:
        try:
            for r in self.relations:
                r.evaluate(point)
        except PoleAtPoint:
            return False
        return True

    def _relations_at(self, n: int) -> List[Dict[Word, Rational]]:
        values = self._evaluated.get(n)
        if values is None:
            point = self.points[n]
            values = [v for v in (r.evaluate(point) for r in self.relations) if v]
            self._evaluated[n] = values
        return values

    def _span(self, n: int, component: Optional[GradeKey]) -> Tuple[Dict[Word, int], _Echelon]:
        key = (n, component)
        cached = self._spans.get(key)
        if cached is not None:
            return cached
        size = self.alphabet.size
        if component is None:
            if self._basis is None:
                self._basis = GradedBasis(self.alphabet, self.cap)
            columns = self._basis.index
        else:
            words = [w for w in itertools.product(range(size), repeat=component[0]) if grade(w, self.alphabet) == component]
            columns = {w: i for i, w in enumerate(words)}
        rows: List[Dict[int, Rational]] = []
        for values in self._relations_at(n):
            rdeg = max(len(w) for w in values)
            if component is None:
                spare = range(self.cap - rdeg + 1)
            else:
                rest = _sub_grade(component, grade(next(iter(values)), self.alphabet))
                if rest is None:
                    continue
                spare = [rest[0]]
            for total in spare:
                for split in range(total + 1):
                    for u in itertools.product(range(size), repeat=split):
                        for v in itertools.product(range(size), repeat=total - split):
                            if component is not None and grade(u + v, self.alphabet) != rest:
                                continue
                            rows.append({columns[u + w + v]: c for w, c in values.items()})
        echelon = _Echelon(rows, len(columns))
        logger.debug("oracle span at point %d, component %s: %dx%d, rank %d", n, component, len(rows), len(columns), echelon.rank)
        self._spans[key] = (columns, echelon)
        return columns, echelon

    def _member_at(self, x: FreeElement, n: int) -> Tuple[bool, int, int, int]:
        values = x.evaluate(self.points[n])
        if not values:
            return True, 0, 0, 0
        if self.graded:
            parts: Dict[GradeKey, Dict[Word, Rational]] = {}
            for w, c in values.items():
                parts.setdefault(grade(w, self.alphabet), {})[w] = c
            member, rows, cols, rank = True, 0, 0, 0
            for component in sorted(parts):
                columns, echelon = self._span(n, component)
                rest = echelon.reduce({columns[w]: c for w, c in parts[component].items()})
                member = member and not rest
                rows, cols, rank = rows + echelon.nrows, cols + echelon.ncols, rank + echelon.rank
            return member, rows, cols, rank
        columns, echelon = self._span(n, None)
        rest = echelon.reduce({columns[w]: c for w, c in values.items()})
        return not rest, echelon.nrows, echelon.ncols, echelon.rank

    def check(self, x: FreeElement) -> OracleResult:
        if x.alphabet != self.alphabet:
            raise AlphabetMismatch(f"{x.alphabet!r} does not match the oracle over {self.alphabet!r}")
        if x.degree > self.cap:
            raise DegreeOverflow(f"element of degree {x.degree} exceeds the oracle cap {self.cap}")
        x = x.with_field(self.field)
        trials = []
        for n, point in enumerate(self.points):
            try:
                member, rows, cols, rank = self._member_at(x, n)
            except PoleAtPoint:
                logger.warning("skipping point %s: the query element has a pole there", point)
                continue
            label = tuple((k, str(v)) for k, v in point.items())
            trials.append(OracleTrial(label, rows, cols, rank, member))
        stable = rank_stable(trials)
        if not trials:
            logger.warning("no point could be evaluated; the oracle has no verdict")
            outcome = OracleOutcome.INCONCLUSIVE
        elif not stable:
            logger.warning("ranks %s differ across points", [t.rank for t in trials])
            outcome = OracleOutcome.INCONCLUSIVE
        elif all(t.member for t in trials):
            outcome = OracleOutcome.MEMBER
        elif not any(t.member for t in trials):
            outcome = OracleOutcome.WITNESS
        else:
            outcome = OracleOutcome.MIXED
        return OracleResult(outcome, tuple(trials), self.graded, stable)


def rank_stable(trials: Sequence[OracleTrial]) -> bool:
    """The most common rank holds at no fewer than 4 of every 5 points that built a matrix"""
    ranks = [t.rank for t in trials if t.cols]
    if not ranks:
        return True
    agree, out_of = RANK_AGREEMENT
    most = Counter(ranks).most_common(1)[0][1]
    return most * out_of >= agree * len(ranks)


def oracle_membership(
    x: FreeElement,
    relations: Sequence[FreeElement],
    degree_cap: int = ORACLE_DEGREE_CAP,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    extra_points: Sequence[Mapping[str, RationalLike]] = (),
) -> OracleResult:
    field = x.field
    for r in relations:
        field = field.union(r.field)
    oracle = MembershipOracle(relations, degree_cap, trials, seed, extra_points, alphabet=x.alphabet, field=field)
    return oracle.check(x)
