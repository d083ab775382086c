import pytest

from fqst import DegreeBound, DocumentError, ExplicitBound, NodeWeighted, solve_topology
from fqst.documents import (
    dumps,
    instance_document,
    loads,
    parse_instance_document,
    parse_result_document,
    result_document,
)


def worked_document():
    return {
        "schema": 1,
        "sources": [[0.0, 0.0], [2.0, 4.0], [11.0, 5.0]],
        "sink": [11.0, 1.0],
        "strategy": {"degree_bound": 3},
        "topology": {
            "nodes": ["source", "source", "source", "sink", "steiner", "steiner"],
            "parents": [4, 4, 5, None, 5, 3],
        },
    }


class TestInstanceDocuments:
    def test_parse_worked_document(self):
        parsed = parse_instance_document(worked_document())
        assert parsed.instance.n_sources == 3
        assert parsed.instance.supplies == (1.0, 1.0, 1.0)
        assert parsed.strategy == DegreeBound(3)
        assert parsed.topology is not None
        assert parsed.topology.parents == (4, 4, 5, -1, 5, 3)

    def test_round_trip(self):
        parsed = parse_instance_document(worked_document())
        emitted = instance_document(parsed.instance, parsed.strategy, parsed.topology)
        reparsed = parse_instance_document(loads(dumps(emitted)))
        assert reparsed.instance == parsed.instance
        assert reparsed.strategy == parsed.strategy
        assert reparsed.topology == parsed.topology
        assert instance_document(reparsed.instance, reparsed.strategy, reparsed.topology) == emitted

    def test_round_trip_preserves_awkward_floats(self):
        doc = worked_document()
        doc["sources"][0] = [0.1, -0.30000000000000004]
        doc["supplies"] = [1.5, 0.7, 2.25]
        doc["strategy"] = {"node_weighted": 0.1}
        parsed = parse_instance_document(doc)
        emitted = instance_document(parsed.instance, parsed.strategy, parsed.topology)
        reparsed = parse_instance_document(loads(dumps(emitted)))
        assert reparsed.instance == parsed.instance
        assert reparsed.strategy == parsed.strategy

    def test_supplies_default_to_unit(self):
        parsed = parse_instance_document(worked_document())
        assert parsed.instance.has_unit_supplies()

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.pop("sources"),
            lambda d: d.pop("sink"),
            lambda d: d.pop("strategy"),
            lambda d: d.update(schema=99),
            lambda d: d.update(sources=[[0, 0], [float("nan"), 1]]),
            lambda d: d.update(strategy={"mystery": 1}),
            lambda d: d.update(strategy={"degree_bound": 2}),
            lambda d: d.update(supplies=[1.0]),
            lambda d: d.update(supplies=[1.0, -1.0, 1.0]),
            lambda d: d["topology"].update(parents=[4, 4, 5, None, 5, 4]),
            lambda d: d["topology"].update(nodes=["sink"] * 6),
        ],
    )
    def test_bad_documents_rejected(self, mutate):
        doc = worked_document()
        mutate(doc)
        with pytest.raises(DocumentError):
            parse_instance_document(doc)

    @pytest.mark.parametrize(
        "strategy",
        [DegreeBound(4), ExplicitBound(0), NodeWeighted(2.5)],
    )
    def test_strategies_round_trip(self, strategy):
        parsed = parse_instance_document(worked_document())
        emitted = instance_document(parsed.instance, strategy)
        assert parse_instance_document(emitted).strategy == strategy


class TestResultDocuments:
    def test_result_round_trip(self, worked_instance, worked_topology):
        tree = solve_topology(worked_instance, worked_topology)
        doc = result_document(tree, DegreeBound(3), objective=tree.cost)
        parsed = parse_result_document(loads(dumps(doc)))
        assert parsed.instance == worked_instance
        assert parsed.strategy == DegreeBound(3)
        assert parsed.tree.topology == worked_topology
        assert parsed.tree.cost == pytest.approx(102.0, abs=1e-9)
        for a, b in zip(parsed.tree.steiner_positions, tree.steiner_positions):
            assert a.x == pytest.approx(b.x, abs=1e-9)
            assert a.y == pytest.approx(b.y, abs=1e-9)
        assert not parsed.claims_global_optimum

    def test_certificate_summary_present(self, worked_instance, worked_topology):
        tree = solve_topology(worked_instance, worked_topology)
        doc = result_document(tree, DegreeBound(3))
        assert doc["certificates"]["locally_minimal"] is True
        # locally minimal but not angle-clean: the sink-side Steiner point
        # meets its z2 in-edge at under 90 degrees
        assert doc["certificates"]["angle_violations"] == 1
        assert doc["claims"] == {"locally_minimal": True, "global_optimum": False}

    def test_missing_positions_rejected(self, worked_instance, worked_topology):
        tree = solve_topology(worked_instance, worked_topology)
        doc = result_document(tree, DegreeBound(3))
        doc["steiner_positions"] = doc["steiner_positions"][:1]
        with pytest.raises(DocumentError):
            parse_result_document(doc)

    def test_flow_entries_validated(self, worked_instance, worked_topology):
        tree = solve_topology(worked_instance, worked_topology)
        doc = result_document(tree, DegreeBound(3))
        doc["flows"][0]["to"] = 99
        with pytest.raises(DocumentError):
            parse_result_document(doc)

    def test_emission_is_deterministic(self, worked_instance, worked_topology):
        tree = solve_topology(worked_instance, worked_topology)
        a = dumps(result_document(tree, DegreeBound(3)))
        b = dumps(result_document(tree, DegreeBound(3)))
        assert a == b
