"""SPICE-style F-score over scene-graph tuples with one-to-one matching.

Precision and recall count matched tuples over generated / reference tuple
counts; F1 is their harmonic mean. Matching is maximum-cardinality bipartite
matching (augmenting paths), so a tuple on either side is used at most once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .scenegraph import SceneGraph, SgTuple, to_tuples


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    matches: tuple[tuple[int, int], ...]
    g_size: int
    r_size: int

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "matches": [list(m) for m in self.matches],
            "g_size": self.g_size,
            "r_size": self.r_size,
        }


@dataclass(frozen=True)
class CorpusReport:
    mean_f1: float
    per_region: tuple[tuple[str, EvalReport], ...]
    region_count: int


def _exact_equal(a: SgTuple, b: SgTuple) -> bool:
    return type(a) is type(b) and a == b


def match_tuples(
    g: Sequence[SgTuple],
    r: Sequence[SgTuple],
    compatible: Callable[[SgTuple, SgTuple], bool] = _exact_equal,
) -> list[tuple[int, int]]:
    """Maximum one-to-one matching between generated and reference tuples.

    Kuhn's augmenting-path algorithm, scanning generated tuples in index
    order and reference candidates in index order, so the returned matching
    is deterministic. Tuples of different arity are never compatible.
    """
    adj = [[j for j, rt in enumerate(r) if compatible(gt, rt)] for gt in g]
    match_r = [-1] * len(r)  # reference index -> generated index

    def try_assign(i: int, seen: list[bool]) -> bool:
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_r[j] == -1 or try_assign(match_r[j], seen):
                    match_r[j] = i
                    return True
        return False

    for i in range(len(g)):
        try_assign(i, [False] * len(r))
    pairs = [(gi, j) for j, gi in enumerate(match_r) if gi != -1]
    pairs.sort()
    return pairs


def f_score(
    g: SceneGraph,
    r: SceneGraph,
    compatible: Callable[[SgTuple, SgTuple], bool] = _exact_equal,
) -> EvalReport:
    """F1 between a generated and a reference scene graph.

    Conventions: both empty -> P = R = F1 = 1; exactly one empty -> F1 = 0.
    """
    gt = to_tuples(g)
    rt = to_tuples(r)
    matches = match_tuples(gt, rt, compatible)
    m = len(matches)
    if not gt and not rt:
        p = rec = f1 = 1.0
    else:
        p = m / len(gt) if gt else 0.0
        rec = m / len(rt) if rt else 0.0
        f1 = 2 * p * rec / (p + rec) if p + rec > 0 else 0.0
    return EvalReport(p, rec, f1, tuple(matches), len(gt), len(rt))


def evaluate_corpus(
    pairs: Sequence[tuple[str, SceneGraph, SceneGraph]],
) -> CorpusReport:
    """Per-region f_score plus the arithmetic mean, ordered by region id."""
    if not pairs:
        raise EmptyCorpus("no region pairs to evaluate")
    per_region = sorted(
        ((region_id, f_score(g, r)) for region_id, g, r in pairs),
        key=lambda item: item[0],
    )
    mean_f1 = sum(rep.f1 for _, rep in per_region) / len(per_region)
    return CorpusReport(mean_f1, tuple(per_region), len(per_region))
