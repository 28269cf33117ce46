import random

import pytest

from amrsg.scenegraph import (
    AttributeTuple,
    BadArity,
    EmptyAfterNormalization,
    ObjectTuple,
    RelationTuple,
    SceneGraph,
    UnbalancedParentheses,
    normalize,
    parse_sg_text,
    serialize_sg,
    sg_from_json,
    sg_to_json,
    to_tuples,
)
from helpers import normalize_oracle, random_scene_graph


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Golden  Retriever ", "golden retriever"),
        ("the snow", "snow"),
        ("A person", "person"),
        ("AN  Umbrella", "umbrella"),
        ("dog", "dog"),
        ("The Old Oak tree", "old oak tree"),
    ],
)
def test_normalize(raw, expected):
    assert normalize(raw) == expected
    assert normalize(raw) == normalize_oracle(raw)


@pytest.mark.parametrize("raw", ["", "   ", "the", "a  an the"])
def test_normalize_empty(raw):
    with pytest.raises(EmptyAfterNormalization):
        normalize(raw)


def test_serialize_fig1_semantics():
    sg = SceneGraph(
        objects=["retriever", "snow"],
        attributes=[("retriever", "golden")],
        relations=[("retriever", "standing in", "snow")],
    )
    assert serialize_sg(sg) == "( retriever ) ( snow ) ( retriever , golden ) ( retriever , standing in , snow )"


def test_serialize_empty():
    assert serialize_sg(SceneGraph()) == ""


def test_serialize_single_object():
    assert serialize_sg(SceneGraph(objects=["dog"])) == "( dog )"


def test_serialize_is_sorted_within_sections():
    sg = SceneGraph(objects=["zebra", "ant"], attributes=[("zebra", "striped"), ("ant", "small")])
    assert serialize_sg(sg) == "( ant ) ( zebra ) ( ant , small ) ( zebra , striped )"


def test_parse_single_object():
    assert parse_sg_text("( dog )") == SceneGraph(objects=["dog"])


def test_parse_attribute_auto_inserts_object():
    sg = parse_sg_text("( retriever , golden )")
    assert [o.name for o in sg.objects] == ["retriever"]
    assert sg.attributes == (AttributeTuple("retriever", "golden"),)


def test_parse_bad_arity():
    with pytest.raises(BadArity):
        parse_sg_text("( a , b , c , d )")
    with pytest.raises(BadArity):
        parse_sg_text("( )")


def test_parse_unbalanced():
    with pytest.raises(UnbalancedParentheses):
        parse_sg_text("( dog ")
    with pytest.raises(UnbalancedParentheses):
        parse_sg_text("dog )")


def test_roundtrip_property():
    rng = random.Random(3)
    for _ in range(200):
        sg = random_scene_graph(rng)
        assert parse_sg_text(serialize_sg(sg)) == sg


def test_to_tuples_counts():
    sg = SceneGraph(
        objects=["retriever", "snow"],
        attributes=[("retriever", "gold")],
        relations=[("retriever", "stand in", "snow")],
    )
    tuples = to_tuples(sg)
    assert len(tuples) == 4
    assert sum(isinstance(t, ObjectTuple) for t in tuples) == 2
    assert sum(isinstance(t, AttributeTuple) for t in tuples) == 1
    assert sum(isinstance(t, RelationTuple) for t in tuples) == 1


def test_to_tuples_empty():
    assert to_tuples(SceneGraph()) == []


def test_multiset_semantics():
    sg = SceneGraph(objects=["a", "a"])
    assert to_tuples(sg) == [ObjectTuple("a"), ObjectTuple("a")]
    assert sg != SceneGraph(objects=["a"])


def test_tuple_count_invariant():
    rng = random.Random(31)
    for _ in range(50):
        sg = random_scene_graph(rng)
        assert len(to_tuples(sg)) == len(sg.objects) + len(sg.attributes) + len(sg.relations)


def test_closure_invariant():
    rng = random.Random(37)
    for _ in range(50):
        sg = random_scene_graph(rng)
        names = {o.name for o in sg.objects}
        for a in sg.attributes:
            assert a.object in names
        for r in sg.relations:
            assert r.subject in names and r.object in names


def test_relation_endpoints_auto_inserted():
    sg = SceneGraph(relations=[("dog", "on", "mat")])
    assert {o.name for o in sg.objects} == {"dog", "mat"}


def test_json_roundtrip():
    rng = random.Random(41)
    for _ in range(50):
        sg = random_scene_graph(rng)
        assert sg_from_json(sg_to_json(sg)) == sg


def test_json_shape():
    sg = SceneGraph(objects=["dog"], attributes=[("dog", "red")], relations=[("dog", "on", "mat")])
    data = sg_to_json(sg)
    assert data["attributes"] == [["dog", "red"]]
    assert data["relations"] == [["dog", "on", "mat"]]
    assert ["dog"] in data["objects"] and ["mat"] in data["objects"]
