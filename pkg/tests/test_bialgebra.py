import time

import pytest

import src.bialgebra as bialgebra
from src.bialgebra import (
    CheckReport,
    CheckItem,
    GenMap,
    ItemVerdict,
    Overall,
    Presentation,
    Verifier,
    invert_gen_map,
    letter_map,
    specialize,
    transport,
)
from src.config import EngineSettings
from src.dsl import parse_presentation
from src.errors import AlphabetMismatch, MissingImage, MissingParameter, NonInvertibleMap, PoleAtPoint, PresentationError
from src.freealg import CoproductTable, FreeElement, format_element
from src.library import BUILTIN_MAPS
from src.oracle import MembershipOracle, OracleOutcome, OracleResult
from src.rewrite import MembershipVerdict, SystemStatus, Verdict


def _exchange(p, q):
    return letter_map(p, q, BUILTIN_MAPS["exchange"], name="exchange")


# presentations

def test_presentation_rejects_zero_relation(illy):
    zero = FreeElement.zero(illy.alphabet, illy.field)
    with pytest.raises(PresentationError):
        Presentation("z", (), illy.alphabet, (zero,), illy.coproduct, illy.counit)


def test_presentation_rejects_repeated_relation(illy):
    rel = illy.relations[0]
    with pytest.raises(PresentationError):
        Presentation("z", (), illy.alphabet, (rel, rel.scale(3)), illy.coproduct, illy.counit)


def test_presentation_needs_a_total_coproduct_and_counit(illy):
    partial = CoproductTable(illy.alphabet, {k: v for k, v in illy.coproduct.images.items() if k != "d"})
    with pytest.raises(PresentationError):
        Presentation("z", (), illy.alphabet, illy.relations, partial, illy.counit)
    counit = {k: v for k, v in illy.counit.items() if k != "d"}
    with pytest.raises(PresentationError):
        Presentation("z", (), illy.alphabet, illy.relations, illy.coproduct, counit)


def test_with_order_relabels_everything(illy):
    reordered = illy.with_order("dcba")
    assert reordered.generators == ("d", "c", "b", "a")
    assert reordered.counit["d"] == 1
    with pytest.raises(AlphabetMismatch):
        illy.with_order("abce")


def test_with_params_keeps_existing_parameters(glgh):
    assert glgh.with_params(("g", "h", "q")).field.params == ("g", "h", "q")
    with pytest.raises(MissingParameter):
        glgh.with_params(("g",))


# maps

def test_exchange_on_generators(illy):
    sigma = _exchange(illy, illy)
    b, c, d = illy.letter("b"), illy.letter("c"), illy.letter("d")
    a = illy.letter("a")
    assert sigma.apply(b * c - c * b - a * c) == c * b - b * c - d * b
    assert sigma.apply(a * d - d * a + a * c) == d * a - a * d + d * b
    assert sigma.describe() == "a=d;b=c;c=b;d=a"


def test_exchange_is_an_involution(illy):
    sigma = _exchange(illy, illy)
    for rel in illy.relations:
        assert sigma.apply(sigma.apply(rel)) == rel


def test_gen_map_needs_every_image(illy):
    with pytest.raises(MissingImage):
        GenMap(illy, illy, {"a": illy.letter("a")})


def test_gen_map_keeps_unmapped_parameters_symbolic(glgh, illy):
    m = _exchange(glgh, illy)
    assert m.target.params == ("g", "h")
    assert m.target.name == "illy"


def test_invert_permutation(illy):
    inverse = invert_gen_map(_exchange(illy, illy))
    assert inverse.name == "exchange^-1"
    assert {k: format_element(v) for k, v in inverse.gen_images.items()} == {"a": "d", "b": "c", "c": "b", "d": "a"}


def test_invert_rejects_non_permutations(illy):
    images = {name: illy.letter(name) for name in "abcd"}
    images["a"] = illy.letter("a") + illy.letter("b")
    with pytest.raises(NonInvertibleMap):
        invert_gen_map(GenMap(illy, illy, images))
    collapsed = letter_map(illy, illy, {"a": "a", "b": "a", "c": "c", "d": "d"})
    with pytest.raises(NonInvertibleMap):
        invert_gen_map(collapsed)


# specialization and transport

def test_specialization_matches_the_hand_written_presentation(special, glgh01):
    assert special.params == ()
    assert special.specialized_at == (("g", "0"), ("h", "1"))
    assert special.generators == ("c", "a", "d", "b")
    assert special.with_order(glgh01.generators).canonical_relations() == glgh01.canonical_relations()


def test_specialization_leaves_no_zero_coefficients(glgh, special):
    assert format_element(special.relations[1]) == "db - bd"
    for rel in special.relations + specialize(glgh, {"g": 0}).relations:
        assert all(not c.is_zero for c in rel.terms.values())
        assert rel.monic().leading_coefficient().is_one


def test_partial_specialization_keeps_the_other_parameter(glgh):
    half = specialize(glgh, {"g": 0})
    assert half.name == "glgh_specialized"
    assert half.params == ("h",)
    assert len(half.relations) == 6


def test_specialize_unknown_parameter(glgh):
    with pytest.raises(MissingParameter):
        specialize(glgh, {"q": 1})


def test_specialize_drops_vanishing_relations():
    p = parse_presentation(
        """
        presentation t {
            params g
            gens x
            rel g x^2
            rel x^3
            coproduct x -> x(x)x
            counit x -> 1
        }
        """
    )
    q = specialize(p, {"g": 0})
    assert len(q.relations) == 1


def test_specialize_at_a_pole():
    p = parse_presentation(
        """
        presentation t {
            params g
            gens x, y
            rel xy = yx/g
            coproduct x -> x(x)x
            coproduct y -> y(x)y
            counit x -> 1
            counit y -> 1
        }
        """
    )
    with pytest.raises(PoleAtPoint):
        specialize(p, {"g": 0})


def test_transport_of_glgh01_is_glghb(glgh01, glghb, illy):
    exchanged = transport(glgh01, _exchange(glgh01, glgh01))
    assert exchanged.canonical_relations() == glghb.canonical_relations()
    assert exchanged.canonical_relations() == illy.canonical_relations()
    assert exchanged.coproduct.images == illy.coproduct.images


# reports

def test_overall_and_exit_codes():
    member = CheckItem("A", ItemVerdict.MEMBER)
    fail = CheckItem("B", ItemVerdict.FAIL)
    unsure = CheckItem("C", ItemVerdict.INCONCLUSIVE)
    assert CheckReport("x", ("p",), (member,)).overall is Overall.PASS
    assert CheckReport("x", ("p",), (member, unsure)).exit_code == 2
    nested = CheckReport("x", ("p",), (), {}, (CheckReport("y", ("p",), (unsure, fail)),))
    assert nested.overall is Overall.FAIL
    assert nested.exit_code == 1
    assert nested.counts() == (0, 2)


# checks

def test_illy_is_a_bialgebra(verifier, illy):
    report = verifier.check_bialgebra(illy)
    delta, coassoc, counit = report.parts
    assert [i.label for i in delta.items] == [f"REL {n}" for n in range(1, 7)]
    assert all(i.verdict is ItemVerdict.MEMBER for i in delta.items)
    assert all(i.oracle == "member_at_all_points" for i in delta.items)
    assert len(coassoc.items) == 4
    assert all(i.note == "zero before reduction" for i in coassoc.items)
    assert len(counit.items) == 14
    assert report.overall is Overall.PASS
    assert report.counts() == (24, 24)


def test_glgh01_is_a_bialgebra(verifier, glgh01):
    assert verifier.check_bialgebra(glgh01).overall is Overall.PASS


def test_bad_counit_fails_on_the_counit_items(verifier, bad_counit):
    report = verifier.check_counit(bad_counit)
    failed = {i.label: i for i in report.items if i.verdict is ItemVerdict.FAIL}
    assert sorted(failed) == ["EPS REL 6", "LEFT c", "LEFT d", "RIGHT b", "RIGHT d"]
    assert failed["LEFT c"].remainder == "c"
    assert failed["EPS REL 6"].remainder == "-2"
    assert report.exit_code == 1


def test_perturbed_presentation_fails_delta_hom(verifier, perturbed):
    report = verifier.check_delta_hom(perturbed)
    assert report.overall is Overall.FAIL
    assert any(i.verdict is ItemVerdict.FAIL and i.remainder for i in report.items)


def test_exchange_is_an_equivalence_onto_illy(verifier, special, illy):
    report = verifier.check_equivalence(special, illy, _exchange(special, illy))
    names = [part.check_name for part in report.parts]
    assert names == [
        "algebra_morphism exchange",
        "algebra_morphism exchange^-1",
        "coalgebra_morphism exchange",
        "coalgebra_morphism exchange^-1",
    ]
    assert report.overall is Overall.PASS
    assert report.counts() == (20, 20)
    for item in report.parts[0].items + report.parts[1].items:
        assert item.steps > 0


def test_identity_is_not_an_algebra_map_onto_illy(verifier, special, illy):
    m = letter_map(special, illy, {x: x for x in "abcd"}, name="identity")
    report = verifier.check_algebra_morphism(m)
    assert report.overall is Overall.FAIL


def test_relation_sets(verifier, special, glgh01, illy):
    same = verifier.check_relation_sets(special, glgh01)
    assert same.overall is Overall.PASS
    assert len(same.items) == 12
    differ = verifier.check_relation_sets(special, illy)
    assert differ.overall is Overall.FAIL
    assert any("not a relation of illy" in i.note for i in differ.items)


def test_trace_is_kept_when_asked(special, illy):
    verifier = Verifier(EngineSettings(degree_bound=6, trials=1, trace=True, oracle=False))
    report = verifier.check_algebra_morphism(_exchange(special, illy))
    item = report.items[0]
    assert item.oracle is None
    assert item.trace
    assert item.trace[0].startswith("step 1: rule ")


def test_oracle_disagreement_fails_the_item(monkeypatch, illy):
    verifier = Verifier(EngineSettings(degree_bound=6, trials=1))

    def wrong(x, system, *args, **kwargs):
        return MembershipVerdict(Verdict.NON_MEMBER, x, x, ())

    monkeypatch.setattr(bialgebra, "ideal_membership", wrong)
    item = verifier._membership_item("REL 1", illy.relations[0], verifier.system(illy), lambda: verifier.oracle(illy))
    assert item.verdict is ItemVerdict.FAIL
    assert item.note == "oracle disagreement"


def test_replay_mismatch_fails_the_item(monkeypatch, illy):
    verifier = Verifier(EngineSettings(degree_bound=6, trials=1, oracle=False))
    monkeypatch.setattr(bialgebra, "replay_trace", lambda verdict, system: FreeElement.zero(illy.alphabet, illy.field))
    item = verifier._membership_item("REL 1", illy.relations[0], verifier.system(illy), lambda: verifier.oracle(illy))
    assert item.verdict is ItemVerdict.FAIL
    assert item.note == "trace replay mismatch"


def test_oracle_skipped_above_cap(illy):
    verifier = Verifier(EngineSettings(degree_bound=6, trials=1, oracle_cap=2))
    x = illy.relations[0] * illy.letter("a")
    item = verifier._membership_item("X", x, verifier.system(illy), lambda: verifier.oracle(illy))
    assert item.verdict is ItemVerdict.MEMBER
    assert item.note == "oracle skipped: degree above cap"


def test_inconclusive_oracle_is_noted_without_failing(monkeypatch, illy):
    verifier = Verifier(EngineSettings(degree_bound=6, trials=1))
    monkeypatch.setattr(MembershipOracle, "check", lambda self, x: OracleResult(OracleOutcome.INCONCLUSIVE, (), True, False))
    item = verifier._membership_item("REL 1", illy.relations[0], verifier.system(illy), lambda: verifier.oracle(illy))
    assert item.verdict is ItemVerdict.MEMBER
    assert item.oracle == "inconclusive"
    assert item.note == "oracle inconclusive: unstable ranks"


def test_glgh_completes_to_a_finite_quadratic_system(verifier, glgh):
    system = verifier.system(glgh)
    assert system.status is SystemStatus.SATURATED
    assert len(system.rules) == 6
    assert max(rule.degree for rule in system.rules) == 2


def test_systems_are_cached(verifier, illy):
    assert verifier.system(illy) is verifier.system(illy)
    assert verifier.tensor_system(illy, 2) is verifier.tensor_system(illy, 2)


@pytest.mark.slow
def test_glgh_is_a_bialgebra_with_symbolic_parameters(verifier, glgh):
    report = verifier.check_bialgebra(glgh)
    delta, coassoc, _ = report.parts
    assert delta.counts() == (6, 6)
    assert coassoc.counts() == (4, 4)
    assert report.overall is Overall.PASS


@pytest.mark.slow
def test_symbolic_glgh_is_not_equivalent_to_illy(verifier, glgh, illy):
    report = verifier.check_equivalence(glgh, illy, _exchange(glgh, illy))
    assert report.exit_code == 1


@pytest.mark.slow
def test_glgh_bialgebra_check_runs_within_two_minutes(glgh):
    started = time.perf_counter()
    report = Verifier(EngineSettings()).check_bialgebra(glgh)
    assert report.overall is Overall.PASS
    assert time.perf_counter() - started < 120
