"""AMR graph parsing, linearization, scene-graph conversion and evaluation."""

__version__ = "0.1.0"

from .amr import AmrEdge, AmrGraph, Constant, parse_penman, serialize_penman, validate
from .convert import ExternalAdapter, RuleConfig, convert_external, convert_rules
from .evaluate import CorpusReport, EvalReport, evaluate_corpus, f_score, match_tuples
from .linearize import (
    LinearizedSequence,
    Strategy,
    linearize,
    linearize_bfs,
    linearize_dfs,
    linearize_inorder,
    tokenize,
)
from .retrieval import RetrievalIndex, aggregate_metrics, rank, score_image
from .scenegraph import (
    AttributeTuple,
    ObjectTuple,
    RelationTuple,
    SceneGraph,
    normalize,
    parse_sg_text,
    serialize_sg,
    to_tuples,
)

__all__ = [
    "AmrEdge",
    "AmrGraph",
    "AttributeTuple",
    "Constant",
    "CorpusReport",
    "EvalReport",
    "ExternalAdapter",
    "LinearizedSequence",
    "ObjectTuple",
    "RelationTuple",
    "RetrievalIndex",
    "RuleConfig",
    "SceneGraph",
    "Strategy",
    "aggregate_metrics",
    "convert_external",
    "convert_rules",
    "evaluate_corpus",
    "f_score",
    "linearize",
    "linearize_bfs",
    "linearize_dfs",
    "linearize_inorder",
    "match_tuples",
    "normalize",
    "parse_penman",
    "parse_sg_text",
    "rank",
    "score_image",
    "serialize_penman",
    "serialize_sg",
    "to_tuples",
    "tokenize",
    "validate",
]
