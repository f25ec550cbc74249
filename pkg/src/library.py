import logging
import os
from typing import Dict, List, Optional, Sequence

from src.bialgebra import GenMap, Presentation, letter_map
from src.config import DSL_EXTENSION
from src.dsl import parse_element, parse_presentation
from src.errors import ParseError, UnknownBuiltin

logger = logging.getLogger(__name__)

PRESENTATIONS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "presentations")

BUILTIN_MAPS: Dict[str, Dict[str, str]] = {
    "exchange": {"a": "d", "b": "c", "c": "b", "d": "a"},
}


class PresentationLibrary:
    """Built-in .hopf presentations and named maps; files are parsed on first use"""

    def __init__(self, directory: str = PRESENTATIONS_DIR, order: Optional[Sequence[str]] = None):
        self.directory = directory
        self.order = tuple(order) if order else None
        self._cache: Dict[str, Presentation] = {}

    def names(self) -> List[str]:
        if not os.path.isdir(self.directory):
            return []
        return sorted(f[: -len(DSL_EXTENSION)] for f in os.listdir(self.directory) if f.endswith(DSL_EXTENSION))

    def get(self, name: str) -> Presentation:
        p = self._cache.get(name)
        if p is None:
            if name not in self.names():
                raise UnknownBuiltin(f"no built-in presentation '{name}' (have: {', '.join(self.names())})")
            path = os.path.join(self.directory, name + DSL_EXTENSION)
            p = self._ordered(self.read(path))
            self._cache[name] = p
        return p

    def _ordered(self, p: Presentation) -> Presentation:
        return p.with_order(self.order) if self.order else p

    @staticmethod
    def read(path: str) -> Presentation:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        logger.debug("parsing %s", path)
        return parse_presentation(text, source=os.path.basename(path))

    def load(self, ref: str) -> Presentation:
        """A built-in name or a path to a .hopf file"""
        if ref in self.names():
            return self.get(ref)
        if os.path.isfile(ref):
            return self._ordered(self.read(ref))
        raise UnknownBuiltin(f"'{ref}' is neither a built-in presentation nor a readable file")

    def map(self, ref: str, source: Presentation, target: Presentation) -> GenMap:
        """``exchange``, ``identity`` or an inline map such as ``a=d;b=c;c=b;d=a``"""
        if ref == "identity":
            return letter_map(source, target, {x: x for x in source.alphabet.names}, name="identity")
        if ref in BUILTIN_MAPS:
            return letter_map(source, target, BUILTIN_MAPS[ref], name=ref)
        if "=" not in ref:
            raise UnknownBuiltin(f"no built-in map '{ref}' (have: identity, {', '.join(BUILTIN_MAPS)})")
        images = {}
        for part in filter(None, (s.strip() for s in ref.split(";"))):
            name, _, text = part.partition("=")
            name = name.strip()
            if not name or not text.strip():
                raise ParseError(f"expected GEN=EXPR, got '{part}'", source="--map")
            images[name] = parse_element(text, target.alphabet, target.field, source="--map")
        return GenMap(source, target, images, name=ref)


def builtin_library() -> PresentationLibrary:
    return PresentationLibrary()
