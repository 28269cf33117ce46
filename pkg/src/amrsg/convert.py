"""AMR graph -> scene graph conversion.

Two engines: a deterministic rule-based baseline (`convert_rules`) and a
subprocess adapter for an external seq2seq model (`ExternalAdapter` +
`convert_external`). Also exports (linearized AMR, target string) training
pairs for fine-tuning such a model.
"""

from __future__ import annotations

import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .amr import AmrGraph, Constant, frame_lemma, is_frame
from .linearize import LinearizedSequence, Strategy, linearize
from .scenegraph import (
    AttributeTuple,
    EmptyAfterNormalization,
    ObjectTuple,
    RelationTuple,
    SceneGraph,
    SgError,
    normalize,
    parse_sg_text,
    serialize_sg,
)


@dataclass(frozen=True)
class RuleConfig:
    """Knobs for the rule-based baseline.

    attribute_roles: roles whose edges become (object, attribute) pairs.
    core_roles: preference order for picking relation subject/object.
    locative_roles: role -> preposition appended to the frame lemma when the
        relation object arrives on that role. An object reached via :ARG2 on
        a frame with no :ARG0 child is also treated as locative ("in"),
        which covers locative-intransitive frames like stand-01.
    """

    attribute_roles: frozenset[str] = frozenset({":mod"})
    core_roles: tuple[str, ...] = (":ARG0", ":ARG1", ":ARG2")
    locative_roles: Mapping[str, str] = field(default_factory=lambda: {":location": "in"})


DEFAULT_RULES = RuleConfig()


def _surface(graph: AmrGraph, target) -> str | None:
    """Normalized surface form of an edge target or node concept."""
    if isinstance(target, Constant):
        raw = target.value
    else:
        raw = frame_lemma(graph.nodes[target])
    try:
        return normalize(raw)
    except EmptyAfterNormalization:
        return None


def convert_rules(graph: AmrGraph, config: RuleConfig = DEFAULT_RULES) -> SceneGraph:
    """Deterministic rule-based AMR -> scene graph baseline.

    1. every non-frame concept node -> object, except nodes consumed as
       attribute values by rule 2
    2. attribute-role edge to a non-frame concept or constant -> attribute
    3. frame with >= 2 core/locative children -> relation (subject = best
       core child, object = next core or locative child, predicate = frame
       lemma, "+ in" when the object edge was locative)
    4. frame with exactly one core child -> attribute (child, lemma)
    5. frame with no core children -> dropped
    """
    objects: list[ObjectTuple] = []
    attributes: list[AttributeTuple] = []
    relations: list[RelationTuple] = []

    attribute_values = {
        e.target
        for e in graph.edges
        if e.role in config.attribute_roles
        and isinstance(e.target, str)
        and not is_frame(graph.nodes[e.target])
    }

    for var, concept in graph.nodes.items():
        if not is_frame(concept) and var not in attribute_values:
            name = _surface(graph, var)
            if name:
                objects.append(ObjectTuple(name))

    for e in graph.edges:
        if e.role not in config.attribute_roles:
            continue
        if isinstance(e.target, str) and is_frame(graph.nodes[e.target]):
            continue
        obj = _surface(graph, e.source)
        attr = _surface(graph, e.target)
        if obj and attr:
            attributes.append(AttributeTuple(obj, attr))

    for var, concept in graph.nodes.items():
        if not is_frame(concept):
            continue
        try:
            lemma = normalize(frame_lemma(concept))
        except EmptyAfterNormalization:
            continue
        out = [e for _, e in graph.outgoing(var) if isinstance(e.target, str)]
        core: list[tuple[str, str]] = []  # (role, child var) in preference order
        for role in config.core_roles:
            core.extend((e.role, e.target) for e in out if e.role == role)
        locative = [(e.role, e.target) for e in out if e.role in config.locative_roles]
        has_arg0 = any(role == ":ARG0" for role, _ in core)

        if not core:
            continue  # rule 5
        if len(core) >= 2 or locative:
            subj_role, subj_var = core[0]
            if len(core) >= 2:
                obj_role, obj_var = core[1]
            else:
                obj_role, obj_var = locative[0]
            subj = _surface(graph, subj_var)
            obj = _surface(graph, obj_var)
            if subj and obj:
                if obj_role in config.locative_roles:
                    pred = f"{lemma} {config.locative_roles[obj_role]}"
                elif obj_role == ":ARG2" and not has_arg0:
                    pred = f"{lemma} in"
                else:
                    pred = lemma
                relations.append(RelationTuple(subj, pred, obj))
        else:
            child = _surface(graph, core[0][1])
            if child:
                attributes.append(AttributeTuple(child, lemma))

    return SceneGraph(objects, attributes, relations)


# --- external model adapter ------------------------------------------------


class AdapterError(RuntimeError):
    def __init__(self, message: str, raw: str | None = None):
        super().__init__(message)
        self.raw = raw


class AdapterTimeout(AdapterError):
    pass


class AdapterCrashed(AdapterError):
    pass


class MalformedModelOutput(AdapterError):
    pass


class ExternalAdapter:
    """Line-protocol child process: one request line in, one response line out.

    The child is started lazily and reused across requests. Not safe for
    concurrent use from multiple callers; create one adapter per worker.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 30.0):
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue[str | None] = queue.Queue()

    def _start(self) -> None:
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )
        t = threading.Thread(target=self._pump, daemon=True)
        t.start()

    def _pump(self) -> None:
        assert self._proc is not None and self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def request(self, line: str) -> str:
        """Send one line, return the raw response line (newline stripped)."""
        if self._proc is None:
            self._start()
        assert self._proc is not None and self._proc.stdin is not None
        try:
            self._proc.stdin.write(line.rstrip("\n") + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise AdapterCrashed(f"adapter {self.command!r} closed its input")
        try:
            response = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise AdapterTimeout(f"no response within {self.timeout}s from {self.command!r}")
        if response is None:
            code = self._proc.wait()
            raise AdapterCrashed(f"adapter {self.command!r} exited with status {code}")
        return response.rstrip("\n")

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin is not None:
                try:
                    self._proc.stdin.close()
                except OSError:
                    pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None

    def __enter__(self) -> "ExternalAdapter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def convert_external(seq: LinearizedSequence, adapter: ExternalAdapter) -> SceneGraph:
    """One round trip through the external model; response must be one line
    in the scene-graph target grammar."""
    raw = adapter.request(seq.text)
    try:
        return parse_sg_text(raw)
    except SgError as err:
        raise MalformedModelOutput(f"unparseable model output: {err}", raw=raw)


# --- training-pair export --------------------------------------------------


@dataclass(frozen=True)
class TrainingPair:
    input: str
    target: str
    region_id: str
    strategy: str

    def to_json(self) -> dict:
        return {
            "input": self.input,
            "target": self.target,
            "region_id": self.region_id,
            "strategy": self.strategy,
        }


def export_training_pairs(
    records: Iterable,
    strategy: Strategy,
    apply_filter: bool = True,
) -> tuple[list[TrainingPair], int]:
    """Build (linearized AMR, serialized scene graph) pairs from region records.

    Records without a parseable AMR are skipped; returns (pairs, skip count).
    With apply_filter, tuples ungrounded in the description are dropped from
    the target first.
    """
    from .amr import PenmanError, parse_penman
    from .corpus import filter_ungrounded

    pairs: list[TrainingPair] = []
    skipped = 0
    for record in records:
        if not record.amr:
            skipped += 1
            continue
        try:
            graph = parse_penman(record.amr)
        except PenmanError:
            skipped += 1
            continue
        target_record = filter_ungrounded(record) if apply_filter else record
        pairs.append(
            TrainingPair(
                input=linearize(graph, strategy).text,
                target=serialize_sg(target_record.scene_graph),
                region_id=record.region_id,
                strategy=strategy.value,
            )
        )
    return pairs, skipped
