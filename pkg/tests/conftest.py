import pytest

from src.bialgebra import Verifier, specialize
from src.config import EngineSettings
from src.dsl import parse_presentation
from src.freealg import Alphabet, FreeElement
from src.library import PresentationLibrary
from src.scalars import ScalarField

ILLY_BAD_COUNIT = """
presentation illy_bad_counit {
    gens a, b, c, d
    rel [a,b] = b^2
    rel [a,c] = 0
    rel [b,c] = -db
    rel [b,d] = 0
    rel [a,d] = db
    rel [c,d] = d^2 - ad + cb
    coproduct a -> a(x)a + b(x)c
    coproduct b -> a(x)b + b(x)d
    coproduct c -> c(x)a + d(x)c
    coproduct d -> c(x)b + d(x)d
    counit a -> 1
    counit b -> 0
    counit c -> 0
    counit d -> 2
}
"""


@pytest.fixture(scope="session")
def library():
    return PresentationLibrary()


@pytest.fixture(scope="session")
def verifier():
    return Verifier(EngineSettings(degree_bound=8, trials=2))


@pytest.fixture(scope="session")
def illy(library):
    return library.get("illy")


@pytest.fixture(scope="session")
def glgh(library):
    return library.get("glgh")


@pytest.fixture(scope="session")
def glgh01(library):
    return library.get("glgh01")


@pytest.fixture(scope="session")
def glghb(library):
    return library.get("glghb")


@pytest.fixture(scope="session")
def special(glgh):
    return specialize(glgh, {"g": 0, "h": 1}, name="glgh_specialized")


@pytest.fixture(scope="session")
def plain():
    return ScalarField(())


@pytest.fixture(scope="session")
def gh():
    return ScalarField(("g", "h"))


@pytest.fixture(scope="session")
def abcd():
    return Alphabet("abcd")


@pytest.fixture
def letters(abcd, plain):
    return {name: FreeElement.letter(abcd, plain, name) for name in abcd.names}


@pytest.fixture(scope="session")
def bad_counit():
    return parse_presentation(ILLY_BAD_COUNIT, source="bad_counit.hopf")


@pytest.fixture(scope="session")
def perturbed():
    text = ILLY_BAD_COUNIT.replace("illy_bad_counit", "illy_perturbed")
    text = text.replace("counit d -> 2", "counit d -> 1").replace("rel [a,c] = 0", "rel [a,c] = b^2")
    return parse_presentation(text, source="perturbed.hopf")


@pytest.fixture
def bad_counit_text():
    return ILLY_BAD_COUNIT
