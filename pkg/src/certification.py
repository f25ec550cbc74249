"""
The end-to-end chain behind ``hopfcheck paper``: both deformations are
bialgebras, glgh at g = 0, h = 1 is the hand-written glgh01, the exchange
turns it into glghb, and the exchange is a bialgebra isomorphism onto illy.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

from src.bialgebra import CheckReport, Overall, Verifier, specialize, transport
from src.library import PresentationLibrary

logger = logging.getLogger(__name__)

SPECIALIZATION = {"g": 0, "h": 1}
CONCLUSION = {
    Overall.PASS: "CONFIRMED",
    Overall.FAIL: "REFUTED",
    Overall.INCONCLUSIVE: "INCONCLUSIVE",
}


@dataclass(frozen=True)
class Certification:
    report: CheckReport
    summary: Tuple[str, ...]

    @property
    def exit_code(self) -> int:
        return self.report.exit_code


def certify(verifier: Verifier, library: PresentationLibrary) -> Certification:
    glgh = library.get("glgh")
    illy = library.get("illy")
    special = specialize(glgh, SPECIALIZATION, name="glgh_specialized")
    exchange = library.map("exchange", special, illy)
    exchanged = transport(special, library.map("exchange", special, special), name="glgh_exchanged")

    steps = (
        ("glgh is a bialgebra", lambda: verifier.check_bialgebra(glgh)),
        ("illy is a bialgebra", lambda: verifier.check_bialgebra(illy)),
        ("glgh at g=0, h=1 matches glgh01", lambda: verifier.check_relation_sets(special, library.get("glgh01"))),
        ("exchanged specialization matches glghb", lambda: verifier.check_relation_sets(exchanged, library.get("glghb"))),
        ("exchange is a bialgebra isomorphism onto illy", lambda: verifier.check_equivalence(special, illy, exchange)),
    )
    parts = []
    summary = []
    for title, run in steps:
        logger.info("certification step: %s", title)
        part = run()
        parts.append(part)
        passed, total = part.counts()
        summary.append(f"{title}: {part.overall.value} ({passed}/{total})")

    s = verifier.settings
    report = CheckReport(
        "paper",
        (glgh.name, illy.name),
        (),
        {"degree_bound": s.degree_bound, "seed": s.seed, "trials": s.trials, "oracle": s.oracle},
        tuple(parts),
    )
    summary.append(f"no new deformation: {CONCLUSION[report.overall]}")
    summary.append(
        f"note: bialgebra presentations certified up to degree bound {s.degree_bound}; "
        "antipode and quantum determinant are not modeled"
    )
    return Certification(report, tuple(summary))
