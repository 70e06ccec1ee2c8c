import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qirmsim.model import (
    CLASS1,
    CLASS2,
    ContentItem,
    NodeSpec,
    Query,
    ReplicaCache,
)
from qirmsim.placement import (
    AccessCounter,
    baseline_place,
    broadcast_placement,
    build_plan,
    classify,
    register_query,
)


def make_catalog(n, size=1.0):
    return [ContentItem(id=c, ckwd=f"kw{c}", size=size, origin=c) for c in range(n)]


def make_nodes(weights, k=10, owned=True):
    nodes = []
    for i, w in enumerate(weights):
        node = NodeSpec(
            id=i, bw=10.0, sp=1.0, mz=1.0, al=1.0,
            cache=ReplicaCache(k), owned_content=i if owned else None,
        )
        node.weight = w
        nodes.append(node)
    return nodes


def query(qid, ckwd, nid=0, t=0.0):
    return Query(qid=qid, nid=nid, ckwd=ckwd, issued_at=t)


class TestRegisterQuery:
    def test_single_registration(self):
        counter = AccessCounter(["kw3"])
        register_query(counter, query(0, "kw3"))
        assert counter.get("kw3") == 1

    def test_additivity(self):
        counter = AccessCounter(["kw3"])
        for i in range(3):
            register_query(counter, query(i, "kw3"))
        assert counter.get("kw3") == 3

    def test_interleaved_counts(self):
        counter = AccessCounter(["kw1", "kw2"])
        for i, kw in enumerate(["kw1", "kw2", "kw1"]):
            register_query(counter, query(i, kw))
        assert counter.get("kw1") == 2
        assert counter.get("kw2") == 1

    def test_unknown_keyword_untouched(self):
        counter = AccessCounter(["kw1"])
        register_query(counter, query(0, "nope"))
        assert counter.counts == {}


class TestClassify:
    def test_boundary_count_is_class1(self):
        catalog = make_catalog(1)
        counter = AccessCounter(["kw0"])
        counter.counts["kw0"] = 5
        assert classify(counter, 5, catalog)[0] == CLASS1

    def test_never_queried_is_class2(self):
        catalog = make_catalog(1)
        assert classify(AccessCounter(["kw0"]), 5, catalog)[0] == CLASS2

    def test_threshold_split(self):
        catalog = make_catalog(2)
        counter = AccessCounter(["kw0", "kw1"])
        counter.counts = {"kw0": 7, "kw1": 4}
        classes = classify(counter, 5, catalog)
        assert classes == {0: CLASS1, 1: CLASS2}

    def test_a_min_validated(self):
        with pytest.raises(ValueError):
            classify(AccessCounter([]), 0, [])

    @given(st.integers(min_value=0, max_value=30), st.integers(min_value=1, max_value=10),
           st.integers(min_value=1, max_value=20))
    def test_monotone_in_count(self, count, bump, a_min):
        catalog = make_catalog(1)
        counter = AccessCounter(["kw0"])
        counter.counts["kw0"] = count
        before = classify(counter, a_min, catalog)[0]
        counter.counts["kw0"] = count + bump
        after = classify(counter, a_min, catalog)[0]
        assert not (before == CLASS1 and after == CLASS2)


def plan_for(counts, weights, strong, a_min=5, k=10):
    catalog = make_catalog(len(counts))
    counter = AccessCounter([c.ckwd for c in catalog])
    counter.counts = {f"kw{i}": n for i, n in enumerate(counts) if n}
    nodes = make_nodes(weights, k=k)
    classes = classify(counter, a_min, catalog)
    weak = set(range(len(weights))) - strong
    return build_plan(classes, strong, weak, nodes, counter, catalog, a_min, 0.0), classes


class TestBuildPlan:
    def test_single_copy_at_demand_equal_a_min(self):
        # content 4 is hot with n = a_min; strong nodes 1,2,3 by weight 2 > 1,3
        plan, classes = plan_for([0, 0, 0, 0, 5], [1.0, 5.0, 9.0, 7.0, 1.0], strong={1, 2, 3})
        assert classes[4] == CLASS1
        assert plan.assignments[4] == [2]  # heaviest strong host

    def test_class2_gets_one_weak_host(self):
        plan, classes = plan_for([0, 0, 1], [9.0, 2.0, 3.0], strong={0}, a_min=5)
        assert classes[2] == CLASS2
        assert plan.assignments[2] == [1]  # node 2 is the origin, so the other weak node

    def test_demand_scaled_copies_clamped_by_cluster(self):
        plan, _ = plan_for([0, 0, 15], [1.0, 5.0, 9.0], strong={1, 2}, a_min=5)
        # ceil(15/5) = 3 copies wanted, origin excluded, only nodes 1 and 2 strong
        assert plan.assignments[2] == [1]  # origin 2 excluded, only node 1 eligible

    def test_origin_never_hosts_its_own_replica(self):
        plan, _ = plan_for([20], [9.0], strong={0})
        assert plan.assignments[0] == []
        assert plan.warnings

    def test_empty_strong_cluster_degrades_with_warning(self):
        plan, _ = plan_for([0, 9], [5.0, 5.0], strong=set(), a_min=5)
        assert plan.assignments[1] == []
        assert any("strong" in w for w in plan.warnings)

    def test_first_copies_precede_extra_copies(self):
        # two strong nodes with k=1 slot each: the hot content must not
        # consume both slots before the cooler class1 content gets one
        plan, _ = plan_for([25, 5, 0], [1.0, 9.0, 8.0], strong={1, 2}, a_min=5, k=1)
        hosted = {cid: hosts for cid, hosts in plan.assignments.items()}
        assert len(hosted[0]) == 1
        assert len(hosted[1]) == 1

    @settings(max_examples=40)
    @given(
        counts=st.lists(st.integers(min_value=0, max_value=40), min_size=2, max_size=12),
        weights=st.lists(st.floats(min_value=0.1, max_value=50), min_size=6, max_size=14),
        beta_rank=st.integers(min_value=0, max_value=5),
    )
    def test_cluster_separation_and_capacity(self, counts, weights, beta_rank):
        n = len(weights)
        order = sorted(range(n), key=lambda i: -weights[i])
        strong = set(order[: beta_rank + 1])
        counts = (counts + [0] * n)[:n]
        plan, classes = plan_for(counts, weights, strong, a_min=5, k=3)
        per_node = {}
        for cid, hosts in plan.assignments.items():
            assert len(set(hosts)) == len(hosts)
            for h in hosts:
                per_node[h] = per_node.get(h, 0) + 1
                assert h != cid  # origin excluded
                if classes[cid] == CLASS1:
                    assert h in strong
                else:
                    assert h not in strong
        assert all(v <= 3 for v in per_node.values())


class TestBroadcastPlacement:
    def test_single_assignment_message(self):
        from qirmsim.placement import PlacementPlan

        nodes = make_nodes([1.0, 5.0, 9.0])
        nodes[2].cluster = "S"
        plan = PlacementPlan(assignments={1: [2]})
        msgs = broadcast_placement(plan, nodes)
        assert msgs == [type(msgs[0])(nid=2, clid="S", content_ids=(1,))]

    def test_empty_plan_no_messages(self):
        from qirmsim.placement import PlacementPlan

        assert broadcast_placement(PlacementPlan(), make_nodes([1.0])) == []

    def test_contents_grouped_per_node(self):
        from qirmsim.placement import PlacementPlan

        nodes = make_nodes([1.0, 5.0, 9.0])
        nodes[2].cluster = "S"
        plan = PlacementPlan(assignments={0: [2], 1: [2]})
        msgs = broadcast_placement(plan, nodes)
        assert len(msgs) == 1
        assert msgs[0].nid == 2
        assert msgs[0].content_ids == (0, 1)


class TestBaselinePlace:
    def test_origin_only_places_nothing(self):
        plan = baseline_place("origin_only", make_catalog(3), make_nodes([1, 2, 3]), np.random.default_rng(0))
        assert plan.assignments == {}

    def test_single_node_is_forced(self):
        plan = baseline_place("random_flood", make_catalog(1), make_nodes([1.0]), np.random.default_rng(0))
        assert plan.assignments[0] == [0]

    def test_fixed_seed_is_deterministic(self):
        catalog, weights = make_catalog(6), [1.0] * 8
        p1 = baseline_place("random_flood", catalog, make_nodes(weights), np.random.default_rng(7))
        p2 = baseline_place("random_flood", catalog, make_nodes(weights), np.random.default_rng(7))
        assert p1.assignments == p2.assignments

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            baseline_place("qirm", [], [], np.random.default_rng(0))

    def test_respects_free_slots(self):
        nodes = make_nodes([1.0, 1.0], k=1)
        plan = baseline_place("random_flood", make_catalog(4), nodes, np.random.default_rng(3))
        hosted = [h for hosts in plan.assignments.values() for h in hosts]
        assert len(hosted) <= 2
        assert plan.warnings  # ran out of slots for the rest
