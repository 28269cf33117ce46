"""Shared test utilities: random graph/tuple generators and independent
oracles kept deliberately separate from the implementations they check."""

from __future__ import annotations

import random
import re
from collections import Counter

from amrsg.amr import AmrEdge, AmrGraph, Constant
from amrsg.scenegraph import AttributeTuple, ObjectTuple, RelationTuple, SceneGraph

CONCEPTS = ["dog", "cat", "snow", "tree", "person", "umbrella", "gold", "retriever", "car", "house"]
FRAMES = ["stand-01", "run-02", "want-01", "eat-01", "hold-01", "sit-02"]
ROLES = [":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":domain", ":time"]
CONSTANT_SURFACES = ["-", "3", '"red car"', "42"]


def random_graph(
    rng: random.Random,
    max_nodes: int = 12,
    max_reentrancies: int = 2,
    p_constant: float = 0.08,
) -> AmrGraph:
    """Build a valid AmrGraph with edges in textual attachment order,
    mimicking how a PENMAN parse would have produced it."""
    nodes: dict[str, str] = {}
    edges: list[AmrEdge] = []
    tree: set[int] = set()
    declared: list[str] = []
    counter = [0]
    total = rng.randint(1, max_nodes)
    reent_left = [rng.randint(0, max_reentrancies)]

    def new_var() -> str:
        v = f"z{counter[0]}"
        counter[0] += 1
        nodes[v] = rng.choice(CONCEPTS + FRAMES)
        declared.append(v)
        return v

    def expand(var: str, depth: int) -> None:
        while rng.random() < 0.65 and depth < 6:
            role = rng.choice(ROLES)
            r = rng.random()
            if r < p_constant:
                edges.append(AmrEdge(var, role, Constant(rng.choice(CONSTANT_SURFACES))))
            elif r < p_constant + 0.12 and reent_left[0] > 0 and len(declared) > 1:
                edges.append(AmrEdge(var, role, rng.choice(declared)))
                reent_left[0] -= 1
            elif len(nodes) < total:
                child = new_var()
                tree.add(len(edges))
                edges.append(AmrEdge(var, role, child))
                expand(child, depth + 1)
            else:
                break

    root = new_var()
    expand(root, 0)
    return AmrGraph(root=root, nodes=nodes, edges=tuple(edges), tree_edge_indices=frozenset(tree))


# --- independent oracles -----------------------------------------------------


def multiset_intersection_size(g_tuples, r_tuples) -> int:
    """Matching-size oracle, valid under exact-equality compatibility."""
    gc, rc = Counter(g_tuples), Counter(r_tuples)
    return sum(min(count, rc[t]) for t, count in gc.items())


def normalize_oracle(term: str) -> str:
    """Second normalizer implementation (regex based)."""
    s = re.sub(r"\s+", " ", term.lower()).strip()
    s = re.sub(r"^(?:(?:a|an|the) )*(?:a|an|the)?$|^(?:(?:a|an|the) )+", "", s)
    return s


def random_tuple_multiset(rng: random.Random, max_size: int = 10) -> list:
    """Small vocabulary so duplicates and cross-arity collisions occur."""
    names = ["dog", "cat", "snow"]
    preds = ["on", "in"]
    out = []
    for _ in range(rng.randint(0, max_size)):
        arity = rng.choice([1, 1, 2, 3])
        if arity == 1:
            out.append(ObjectTuple(rng.choice(names)))
        elif arity == 2:
            out.append(AttributeTuple(rng.choice(names), rng.choice(["red", "big"])))
        else:
            out.append(RelationTuple(rng.choice(names), rng.choice(preds), rng.choice(names)))
    return out


def random_scene_graph(rng: random.Random, max_size: int = 8) -> SceneGraph:
    objects, attributes, relations = [], [], []
    for t in random_tuple_multiset(rng, max_size):
        if isinstance(t, ObjectTuple):
            objects.append(t)
        elif isinstance(t, AttributeTuple):
            attributes.append(t)
        else:
            relations.append(t)
    return SceneGraph(objects, attributes, relations)


FIG1_PENMAN = "(z0 / stand-01 :ARG1 (z1 / retriever :mod (z2 / gold)) :ARG2 (z3 / snow))"
WANT_PENMAN = "(z0 / want-01 :ARG0 (z1 / dog) :ARG1 (z2 / eat-01 :ARG0 z1))"
