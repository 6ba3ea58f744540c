import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from graphplay.diagram import (
    BoundsError,
    DecodeError,
    Diagram,
    EdgeError,
    MalformedPathError,
    UnknownItemError,
)

from conftest import build_doc, exam_doc, loop_doc
from oracles import matrix_walk, region_count_gf2


# -- numbering ---------------------------------------------------------------


def test_first_insert_gets_number_one():
    d = Diagram()
    assert d.insert_node("process", (1, 1)).number == 1


def test_insert_after_three_gets_four():
    d = Diagram()
    for _ in range(3):
        d.insert_node("process", (1, 1))
    assert d.insert_node("process", (2, 2)).number == 4


def test_last_removed_number_is_what_the_next_insert_gets():
    d = Diagram()
    nodes = [d.insert_node("process", (1, 1)) for _ in range(3)]
    d.delete_item(nodes[2].node_id)  # number 3 removed
    assert d.used_numbers() == {1, 2}
    assert d.insert_node("process", (3, 3)).number == 3


def test_deleting_a_middle_number_keeps_numbering_gapless():
    d = Diagram()
    nodes = [d.insert_node("process", (1, 1)) for _ in range(4)]
    d.delete_item(nodes[1].node_id)  # number 2 removed, 3 and 4 slide down
    assert d.used_numbers() == {1, 2, 3}
    assert d.insert_node("process", (1, 2)).number == 4


def test_insert_takes_smallest_free_number():
    # a gapped set is not reachable through the editing ops, but the insert
    # rule itself is defined for any number set
    d = Diagram()
    for number in (1, 2, 4):
        node = d.insert_node("process", (1, 1))
        node.number = number
    assert d.used_numbers() == {1, 2, 4}
    assert d.insert_node("process", (2, 2)).number == 3


def test_star_nodes_are_unnumbered_and_counted():
    d = Diagram()
    star = d.insert_node("star", (5, 5))
    assert star.number is None
    assert d.metrics().cc_declared == 1
    d.insert_node("star", (6, 6))
    assert d.metrics().cc_declared == 2


def test_insert_out_of_bounds_reports_extent():
    d = Diagram(10, 10)
    with pytest.raises(BoundsError) as err:
        d.insert_node("process", (11, 0))
    assert err.value.extent == (10, 10)
    assert err.value.position == (11, 0)


@st.composite
def edit_scripts(draw):
    return draw(
        st.lists(
            st.tuples(st.sampled_from(["insert", "insert_star", "delete", "reset"]),
                      st.integers(0, 10_000)),
            max_size=60,
        )
    )


@given(edit_scripts())
@settings(max_examples=300, deadline=None)
def test_numbers_always_one_through_n(script):
    d = Diagram()
    for op, pick in script:
        if op == "insert":
            d.insert_node("process", (pick % 41, pick % 61))
        elif op == "insert_star":
            d.insert_node("star", (pick % 41, pick % 61))
        elif op == "delete" and d.nodes:
            d.delete_item(list(d.nodes)[pick % len(d.nodes)])
        elif op == "reset":
            d.reset()
        n = len(d.process_nodes())
        assert d.used_numbers() == set(range(1, n + 1))


def test_reset_clears_and_restarts_numbering():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    d.add_edge(a.node_id, b.node_id)
    d.reset()
    assert not d.nodes and not d.edges
    assert d.insert_node("process", (1, 1)).number == 1
    d.reset()
    d.reset()  # idempotent
    assert not d.nodes


# -- edges --------------------------------------------------------------------


def test_edges_are_directed_ordered_pairs():
    d = Diagram.decode(exam_doc())
    pairs = d.edge_pairs_by_number()
    assert (8, 2) in pairs
    assert (2, 8) not in pairs


def test_opposite_directions_coexist():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    d.add_edge(a.node_id, b.node_id)
    d.add_edge(b.node_id, a.node_id)
    assert d.metrics().e == 2


def test_duplicate_edge_rejected():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    d.add_edge(a.node_id, b.node_id)
    with pytest.raises(EdgeError, match="duplicate"):
        d.add_edge(a.node_id, b.node_id)


def test_self_loop_allowed_once():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    d.add_edge(a.node_id, a.node_id)
    with pytest.raises(EdgeError):
        d.add_edge(a.node_id, a.node_id)
    assert d.validate_path([1, 1, 1]).valid


def test_edge_to_star_rejected():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    s = d.insert_node("star", (2, 2))
    with pytest.raises(EdgeError, match="star"):
        d.add_edge(a.node_id, s.node_id)
    with pytest.raises(EdgeError, match="star"):
        d.add_edge(s.node_id, a.node_id)


def test_curved_edge_needs_exactly_two_control_points():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    with pytest.raises(EdgeError):
        d.add_edge(a.node_id, b.node_id, shape="curved")
    with pytest.raises(EdgeError):
        d.add_edge(a.node_id, b.node_id, shape="curved", control_points=[(1, 1)])
    edge = d.add_edge(a.node_id, b.node_id, shape="curved",
                      control_points=[(1, 1), (2, 3)])
    assert edge.control_points == [(1, 1), (2, 3)]
    with pytest.raises(EdgeError):
        d.add_edge(b.node_id, a.node_id, control_points=[(1, 1), (2, 2)])


def test_deleting_node_removes_incident_edges():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    c = d.insert_node("process", (3, 3))
    d.add_edge(a.node_id, b.node_id)
    d.add_edge(b.node_id, c.node_id)
    d.delete_item(b.node_id)
    assert d.metrics().e == 0
    assert all(
        e.from_id in d.nodes and e.to_id in d.nodes for e in d.edges.values()
    )


def test_deleting_edge_keeps_nodes():
    d = Diagram()
    a = d.insert_node("process", (1, 1))
    b = d.insert_node("process", (2, 2))
    edge = d.add_edge(a.node_id, b.node_id)
    d.delete_item(edge.edge_id)
    assert len(d.nodes) == 2 and not d.edges


def test_delete_unknown_id():
    with pytest.raises(UnknownItemError):
        Diagram().delete_item("nope")


# -- metrics -------------------------------------------------------------------


def test_exam_graph_metrics():
    m = Diagram.decode(exam_doc()).metrics()
    assert (m.n, m.e) == (8, 9)
    assert m.cc_structural == 3
    assert m.cc_declared == 3
    assert m.connected


def test_single_node_metrics():
    d = Diagram()
    d.insert_node("process", (1, 1))
    m = d.metrics()
    assert (m.n, m.e, m.cc_structural) == (1, 0, 1)


def test_empty_diagram_metrics_undefined_cc():
    m = Diagram().metrics()
    assert m.n == 0 and m.cc_structural is None


def test_chain_and_diamond_match_region_oracle():
    chain_edges = [(i, i + 1) for i in range(1, 5)]
    chain = Diagram.decode(build_doc(range(1, 6), chain_edges))
    assert region_count_gf2(5, chain_edges) == 1
    assert chain.metrics().cc_structural == 1

    diamond_edges = [(1, 2), (1, 3), (2, 4), (3, 4)]
    diamond = Diagram.decode(build_doc(range(1, 5), diamond_edges))
    assert region_count_gf2(4, diamond_edges) == 2
    assert diamond.metrics().cc_structural == 2


def test_cc_matches_region_oracle_on_random_connected_graphs():
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(2, 9)
        # spanning tree first so the graph is connected
        edges = {(rng.randint(1, v - 1), v) for v in range(2, n + 1)}
        for _ in range(rng.randint(0, 10)):
            a, b = rng.randint(1, n), rng.randint(1, n)
            edges.add((a, b))
        d = Diagram.decode(build_doc(range(1, n + 1), sorted(edges)))
        m = d.metrics()
        assert m.connected
        assert m.cc_structural == region_count_gf2(n, sorted(edges))


def test_disconnected_graph_flagged():
    d = Diagram.decode(build_doc(range(1, 5), [(1, 2), (3, 4)]))
    m = d.metrics()
    assert not m.connected
    assert m.cc_structural == 2 - 4 + 2  # raw formula, flagged by `connected`


# -- path validation -------------------------------------------------------------


def test_missing_hop_reported_with_pair():
    d = Diagram.decode(exam_doc())
    check = d.validate_path([1, 2, 8])
    assert not check.valid
    assert check.failure_position == 1
    assert check.missing_pair == (2, 8)
    assert check.unknown_node is None


def test_revisiting_walk_is_valid():
    d = Diagram.decode(loop_doc())
    assert d.validate_path([1, 2, 3, 2, 3, 2, 3, 4]).valid


def test_unknown_number_reported():
    d = Diagram.decode(loop_doc())
    check = d.validate_path([1, 2, 5])
    assert not check.valid
    assert check.unknown_node == 5
    assert check.failure_position == 2
    assert check.missing_pair is None


def test_short_or_malformed_paths_refused():
    d = Diagram.decode(loop_doc())
    with pytest.raises(MalformedPathError):
        d.validate_path([1])
    with pytest.raises(MalformedPathError):
        d.validate_path("12")
    with pytest.raises(MalformedPathError):
        d.validate_path([1, "2"])
    with pytest.raises(MalformedPathError):
        d.validate_path([1, 0])
    with pytest.raises(MalformedPathError):
        d.validate_path([True, 2])


@given(st.data())
@settings(max_examples=400, deadline=None)
def test_validation_agrees_with_matrix_oracle(data):
    n = data.draw(st.integers(1, 10))
    edges = data.draw(
        st.sets(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=30)
    )
    path = data.draw(st.lists(st.integers(1, n + 2), min_size=2, max_size=8))
    d = Diagram.decode(build_doc(range(1, n + 1), sorted(edges)))
    check = d.validate_path(path)
    kind, where = matrix_walk(n, edges, path)
    if kind == "valid":
        assert check.valid
    elif kind == "unknown":
        assert (not check.valid) and check.unknown_node == path[where]
        assert check.failure_position == where
    else:
        assert (not check.valid) and check.failure_position == where
        assert check.missing_pair == (path[where], path[where + 1])


# -- canonical document -----------------------------------------------------------


def test_round_trip_is_structurally_identical():
    doc = build_doc(range(1, 9), [(1, 2), (8, 2), (2, 3)], stars=2,
                    curved={(8, 2)})
    d = Diagram.decode(doc)
    again = Diagram.decode(d.encode())
    assert d.encode() == again.encode()
    assert json.dumps(d.encode(), sort_keys=True) == json.dumps(
        again.encode(), sort_keys=True
    )


@given(st.data())
@settings(max_examples=150, deadline=None)
def test_round_trip_random_documents(data):
    n = data.draw(st.integers(0, 8))
    stars = data.draw(st.integers(0, 3))
    edges = data.draw(
        st.sets(st.tuples(st.integers(1, max(n, 1)), st.integers(1, max(n, 1))),
                max_size=20)
    ) if n else set()
    doc = build_doc(range(1, n + 1), sorted(edges), stars=stars)
    d = Diagram.decode(doc)
    assert Diagram.decode(d.encode()).encode() == d.encode()


@pytest.mark.parametrize(
    "mutate,location_hint",
    [
        (lambda doc: doc.update(extra=1), "extra"),
        (lambda doc: doc["canvas"].update(depth=3), "depth"),
        (lambda doc: doc["nodes"][0].update(color="red"), "color"),
        (lambda doc: doc["nodes"][0].update(number=9), "1.."),
        (lambda doc: doc["nodes"][0].pop("number"), "number"),
        (lambda doc: doc["nodes"][-1].update(number=4), "star"),
        (lambda doc: doc["edges"][0].update(to="s1"), "star"),
        (lambda doc: doc["edges"][0].update(to="zzz"), "exist"),
        (lambda doc: doc["edges"][0].update(cp=[[1, 1], [2, 2]]), "control"),
        (lambda doc: doc["nodes"][0].update(x=-1), ">= 0"),
        (lambda doc: doc["nodes"][0].update(x=999), "<="),
    ],
)
def test_decode_rejects_bad_documents(mutate, location_hint):
    doc = build_doc(range(1, 4), [(1, 2), (2, 3)], stars=1)
    mutate(doc)
    with pytest.raises(DecodeError, match=location_hint):
        Diagram.decode(doc)


def test_decode_rejects_duplicate_pair_and_ids():
    doc = build_doc(range(1, 3), [(1, 2)])
    doc["edges"].append({"id": "e9", "from": "n1", "to": "n2", "shape": "straight"})
    with pytest.raises(DecodeError, match="duplicate edge"):
        Diagram.decode(doc)
    doc = build_doc(range(1, 3), [])
    doc["nodes"].append(dict(doc["nodes"][0]))
    with pytest.raises(DecodeError, match="duplicate node id"):
        Diagram.decode(doc)


def test_decode_rejects_gapped_numbering():
    doc = build_doc([1, 2, 4], [])
    with pytest.raises(DecodeError, match="1..3"):
        Diagram.decode(doc)


def test_curved_document_round_trip():
    doc = build_doc(range(1, 3), [(1, 2)], curved={(1, 2)})
    d = Diagram.decode(doc)
    encoded = d.encode()
    assert encoded["edges"][0]["cp"] == [[1, 1], [2, 2]]
    missing_cp = build_doc(range(1, 3), [(1, 2)])
    missing_cp["edges"][0]["shape"] = "curved"
    with pytest.raises(DecodeError, match="control points"):
        Diagram.decode(missing_cp)
