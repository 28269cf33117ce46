"""Scene graphs as tuple multisets plus their canonical text serialization.

A scene graph is three multisets: object names, (object, attribute) pairs,
and (subject, predicate, object) triples. The wire format used both as the
seq2seq target and as the evaluator input is::

    ( retriever ) ( snow ) ( retriever , golden ) ( retriever , standing in , snow )

i.e. one parenthesized group per tuple, arity 1/2/3 distinguishing the
kind, sections ordered objects, attributes, relations, lexicographic
within each section.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from collections import Counter
from typing import Iterable, Sequence, Union

# bumped when the wire grammar changes
GRAMMAR_VERSION = "1"

_ARTICLES = {"a", "an", "the"}
_WS_RE = re.compile(r"\s+")


class SgError(ValueError):
    pass


class EmptyAfterNormalization(SgError):
    pass


class BadArity(SgError):
    pass


class UnbalancedParentheses(SgError):
    pass


def normalize(term: str) -> str:
    """Lowercase, collapse whitespace, strip leading articles."""
    words = _WS_RE.sub(" ", term.strip().lower()).split()
    while words and words[0] in _ARTICLES:
        words.pop(0)
    if not words:
        raise EmptyAfterNormalization(f"nothing left of {term!r} after normalization")
    return " ".join(words)


@dataclass(frozen=True, order=True)
class ObjectTuple:
    name: str

    def fields(self) -> tuple[str, ...]:
        return (self.name,)


@dataclass(frozen=True, order=True)
class AttributeTuple:
    object: str
    attribute: str

    def fields(self) -> tuple[str, ...]:
        return (self.object, self.attribute)


@dataclass(frozen=True, order=True)
class RelationTuple:
    subject: str
    predicate: str
    object: str

    def fields(self) -> tuple[str, ...]:
        return (self.subject, self.predicate, self.object)


SgTuple = Union[ObjectTuple, AttributeTuple, RelationTuple]


class SceneGraph:
    """Multisets of object/attribute/relation tuples.

    Objects referenced by attributes or relations but absent from the object
    multiset are auto-inserted once at construction. Equality is multiset
    equality per section; insertion order is otherwise irrelevant.
    """

    def __init__(
        self,
        objects: Iterable[str | ObjectTuple] = (),
        attributes: Iterable[Sequence[str] | AttributeTuple] = (),
        relations: Iterable[Sequence[str] | RelationTuple] = (),
    ):
        objs = [o if isinstance(o, ObjectTuple) else ObjectTuple(str(o)) for o in objects]
        attrs = [a if isinstance(a, AttributeTuple) else AttributeTuple(*a) for a in attributes]
        rels = [r if isinstance(r, RelationTuple) else RelationTuple(*r) for r in relations]
        for t in objs + attrs + rels:
            for f in t.fields():
                if not f:
                    raise SgError(f"empty field in tuple {t}")
        present = {o.name for o in objs}
        for name in _referenced(attrs, rels):
            if name not in present:
                objs.append(ObjectTuple(name))
                present.add(name)
        self.objects: tuple[ObjectTuple, ...] = tuple(objs)
        self.attributes: tuple[AttributeTuple, ...] = tuple(attrs)
        self.relations: tuple[RelationTuple, ...] = tuple(rels)

    def is_empty(self) -> bool:
        return not (self.objects or self.attributes or self.relations)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SceneGraph):
            return NotImplemented
        return (
            Counter(self.objects) == Counter(other.objects)
            and Counter(self.attributes) == Counter(other.attributes)
            and Counter(self.relations) == Counter(other.relations)
        )

    def __hash__(self):
        return hash(
            (
                frozenset(Counter(self.objects).items()),
                frozenset(Counter(self.attributes).items()),
                frozenset(Counter(self.relations).items()),
            )
        )

    def __repr__(self) -> str:
        return (
            f"SceneGraph(objects={[o.name for o in self.objects]}, "
            f"attributes={[a.fields() for a in self.attributes]}, "
            f"relations={[r.fields() for r in self.relations]})"
        )


def _referenced(attrs: list[AttributeTuple], rels: list[RelationTuple]) -> list[str]:
    seen: list[str] = []
    for a in attrs:
        if a.object not in seen:
            seen.append(a.object)
    for r in rels:
        for name in (r.subject, r.object):
            if name not in seen:
                seen.append(name)
    return seen


def to_tuples(sg: SceneGraph) -> list[SgTuple]:
    """Flat multiset union of the three sections."""
    return list(sg.objects) + list(sg.attributes) + list(sg.relations)


def serialize_sg(sg: SceneGraph) -> str:
    """Render the canonical target string (sections sorted lexicographically)."""
    groups = []
    for t in sorted(sg.objects) + sorted(sg.attributes) + sorted(sg.relations):
        groups.append("( " + " , ".join(t.fields()) + " )")
    return " ".join(groups)


def parse_sg_text(text: str) -> SceneGraph:
    """Inverse of serialize_sg up to ordering; arity dispatches tuple kind."""
    objects: list[ObjectTuple] = []
    attributes: list[AttributeTuple] = []
    relations: list[RelationTuple] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c != "(":
            raise UnbalancedParentheses(f"unexpected {c!r} at offset {i}")
        end = text.find(")", i + 1)
        if end == -1:
            raise UnbalancedParentheses(f"unclosed group at offset {i}")
        inner = text[i + 1 : end]
        if "(" in inner:
            raise UnbalancedParentheses(f"nested group at offset {i}")
        fields = [f.strip() for f in inner.split(",")]
        if any(not f for f in fields):
            raise BadArity(f"empty field in group at offset {i}")
        if len(fields) == 1:
            objects.append(ObjectTuple(fields[0]))
        elif len(fields) == 2:
            attributes.append(AttributeTuple(*fields))
        elif len(fields) == 3:
            relations.append(RelationTuple(*fields))
        else:
            raise BadArity(f"group with {len(fields)} fields at offset {i}")
        i = end + 1
    return SceneGraph(objects, attributes, relations)


# --- JSON rendering --------------------------------------------------------


def sg_to_json(sg: SceneGraph) -> dict:
    """JSON-ready dict: each section an array of arrays of strings."""
    return {
        "objects": [list(t.fields()) for t in sg.objects],
        "attributes": [list(t.fields()) for t in sg.attributes],
        "relations": [list(t.fields()) for t in sg.relations],
    }


def sg_from_json(data: dict) -> SceneGraph:
    objects = [o[0] if isinstance(o, (list, tuple)) else o for o in data.get("objects", [])]
    return SceneGraph(objects, data.get("attributes", []), data.get("relations", []))


def sg_to_json_str(sg: SceneGraph) -> str:
    return json.dumps(sg_to_json(sg))
