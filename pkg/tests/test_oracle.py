import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import AlphabetMismatch, DegreeOverflow
from src.freealg import Alphabet, FreeElement
from src.oracle import GradedBasis, MembershipOracle, OracleOutcome, OracleTrial, grade, oracle_membership, rank_stable
from src.rewrite import Verdict, ideal_membership
from src.scalars import ScalarField

XY = Alphabet("xy")
Q = ScalarField(())
x = FreeElement.letter(XY, Q, "x")
y = FreeElement.letter(XY, Q, "y")


def test_graded_basis_lists_words_in_deglex_order():
    basis = GradedBasis(Alphabet("abcd"), 2)
    assert len(basis) == 21
    assert basis.words[:6] == [(), (0,), (1,), (2,), (3,), (0, 0)]
    assert basis.index[(3, 3)] == 20


def test_grade_counts_letters_per_factor():
    square = Alphabet("abcd").tensor(2)
    assert grade((0, 5), square) == (2, (1, 1))
    assert grade((0, 1, 2), Alphabet("abcd")) == (3, ())


def test_commutative_membership():
    oracle = MembershipOracle([y * x - x * y], cap=3)
    assert oracle.graded
    assert oracle.points == [{}]
    result = oracle.check(x * y * x - x * x * y)
    assert result.outcome is OracleOutcome.MEMBER
    assert result.witness is None
    assert result.trials[0].describe().startswith("no parameters:")


def test_non_member_has_a_witness():
    result = MembershipOracle([y * x - x * y], cap=3).check(x * y)
    assert result.outcome is OracleOutcome.WITNESS
    assert result.witness == ()


def test_zero_is_always_a_member():
    result = MembershipOracle([y * x - x * y], cap=2).check(FreeElement.zero(XY, Q))
    assert result.outcome is OracleOutcome.MEMBER


def test_inhomogeneous_relations_use_the_full_truncation():
    oracle = MembershipOracle([x * x - y], cap=3)
    assert not oracle.graded
    assert oracle.check(y * x - x * y).outcome is OracleOutcome.MEMBER
    assert oracle.check(x).outcome is OracleOutcome.WITNESS


def test_degree_cap():
    with pytest.raises(DegreeOverflow):
        MembershipOracle([x * x * x - y], cap=2)
    oracle = MembershipOracle([y * x - x * y], cap=2)
    with pytest.raises(DegreeOverflow):
        oracle.check(x * x * y)


def test_alphabet_mismatch():
    oracle = MembershipOracle([y * x - x * y], cap=2)
    with pytest.raises(AlphabetMismatch):
        oracle.check(FreeElement.letter(Alphabet("ab"), Q, "a"))


def test_parametric_relation_at_fixed_and_random_points():
    field = ScalarField(("g",))
    g = field.param("g")
    u = FreeElement.letter(XY, field, "x")
    v = FreeElement.letter(XY, field, "y")
    oracle = MembershipOracle([v * u - (u * v).scale(g)], cap=2, trials=3, seed=7, extra_points=[{"g": 1}])
    assert oracle.points[0] == {"g": 1}
    assert len(oracle.points) == 4
    result = oracle.check(v * u - u * v)
    assert result.trials[0].member
    assert result.outcome in (OracleOutcome.MIXED, OracleOutcome.MEMBER)
    assert oracle.check(v * u - (u * v).scale(g)).outcome is OracleOutcome.MEMBER


def test_points_are_reproducible_from_the_seed():
    field = ScalarField(("g",))
    u = FreeElement.letter(XY, field, "x")
    rel = u * u - u.scale(field.param("g"))
    first = MembershipOracle([rel], cap=2, trials=4, seed=11).points
    second = MembershipOracle([rel], cap=2, trials=4, seed=11).points
    assert first == second


def test_pole_points_are_rejected():
    field = ScalarField(("g",))
    g = field.param("g")
    u = FreeElement.letter(XY, field, "x")
    oracle = MembershipOracle([u * u - u.scale((g - 1).inverse())], cap=2, trials=2, extra_points=[{"g": 1}])
    assert {"g": 1} not in oracle.points
    assert len(oracle.points) == 2


def test_oracle_membership_uses_the_union_field():
    field = ScalarField(("g",))
    u = FreeElement.letter(XY, field, "x")
    v = FreeElement.letter(XY, field, "y")
    result = oracle_membership(y * x - x * y, [v * u - u * v], degree_cap=2, trials=2)
    assert result.outcome is OracleOutcome.MEMBER
    assert len(result.trials) == 2


def test_illy_delta_image_is_a_tensor_member(verifier, illy):
    from src.freealg import coproduct_extend

    oracle = verifier.oracle(illy, 2)
    image = coproduct_extend(illy.coproduct, illy.relations[0])
    assert oracle.check(image).outcome is OracleOutcome.MEMBER


def test_no_evaluable_point_gives_no_verdict():
    field = ScalarField(("g",))
    g = field.param("g")
    u = FreeElement.letter(XY, field, "x")
    v = FreeElement.letter(XY, field, "y")
    oracle = MembershipOracle([v * u - u * v], cap=2, trials=0, extra_points=[{"g": 1}])
    assert oracle.points == [{"g": 1}]
    result = oracle.check(u.scale((g - 1).inverse()))
    assert result.trials == ()
    assert result.outcome is OracleOutcome.INCONCLUSIVE


def test_rank_stability():
    def trials(*ranks):
        return [OracleTrial((), 4, 4, r, True) for r in ranks]

    assert rank_stable(trials(3, 3, 3, 3, 2))
    assert not rank_stable(trials(3, 3, 3, 2, 2))
    assert rank_stable([])
    assert rank_stable(trials(3) + [OracleTrial((), 0, 0, 0, True)])


def test_unstable_ranks_withhold_the_verdict(monkeypatch):
    field = ScalarField(("g",))
    u = FreeElement.letter(XY, field, "x")
    v = FreeElement.letter(XY, field, "y")
    oracle = MembershipOracle([v * u - u * v], cap=2, trials=2, seed=3)
    ranks = iter([1, 2])
    real = oracle._member_at

    def shifted(x, n):
        member, rows, cols, _ = real(x, n)
        return member, rows, cols, next(ranks)

    monkeypatch.setattr(oracle, "_member_at", shifted)
    result = oracle.check(v * u - u * v)
    assert not result.rank_stable
    assert result.outcome is OracleOutcome.INCONCLUSIVE


def test_point_shortfall_is_logged(monkeypatch, caplog):
    field = ScalarField(("g",))
    u = FreeElement.letter(XY, field, "x")
    monkeypatch.setattr(MembershipOracle, "_admissible", lambda self, point: False)
    oracle = MembershipOracle([u * u - u.scale(field.param("g"))], cap=2, trials=2, seed=5)
    assert oracle.points == []
    assert "only 0 of 2 random points" in caplog.text
    assert oracle.check(u).outcome is OracleOutcome.INCONCLUSIVE


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_random_ideal_members_agree_with_rewriting(verifier, illy, data):
    size = illy.alphabet.size
    word = st.lists(st.integers(0, size - 1), max_size=2).map(tuple)
    rel = data.draw(st.sampled_from(illy.relations))
    u = data.draw(word)
    v = data.draw(word.filter(lambda w: len(u) + len(w) <= 2))
    coeff = data.draw(st.integers(-5, 5).filter(bool))
    left = FreeElement.monomial(illy.alphabet, illy.field, u, coeff)
    member = left * rel * FreeElement.monomial(illy.alphabet, illy.field, v)
    assert ideal_membership(member, verifier.system(illy)).verdict is Verdict.MEMBER
    assert verifier.oracle(illy).check(member).outcome is OracleOutcome.MEMBER


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_rewriting_and_oracle_agree_on_random_elements(verifier, illy, data):
    size = illy.alphabet.size
    word = st.lists(st.integers(0, size - 1), max_size=3).map(tuple)
    terms = data.draw(st.dictionaries(word, st.integers(-3, 3).filter(bool), max_size=4))
    x = FreeElement.zero(illy.alphabet, illy.field)
    for w, c in terms.items():
        x = x + FreeElement.monomial(illy.alphabet, illy.field, w, c)
    rewritten = ideal_membership(x, verifier.system(illy)).verdict is Verdict.MEMBER
    assert rewritten == (verifier.oracle(illy).check(x).outcome is OracleOutcome.MEMBER)
