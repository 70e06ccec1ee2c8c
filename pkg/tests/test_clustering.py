import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qirmsim.clustering import (
    assign_weights,
    node_weight,
    partition,
    tag_clusters,
    weight_vector,
)
from qirmsim.model import STRONG, WEAK, NodeSpec

positive = st.floats(min_value=0.01, max_value=1e4, allow_nan=False)


def make_nodes(weights):
    nodes = []
    for i, w in enumerate(weights):
        node = NodeSpec(id=i, bw=1.0, sp=1.0, mz=1.0, al=1.0)
        node.weight = w
        nodes.append(node)
    return nodes


class TestNodeWeight:
    def test_unit_inputs(self):
        assert node_weight(1, 1, 1, 1) == 3.0

    def test_hand_evaluated(self):
        # (100 + 50 + 50) / 2
        assert node_weight(100, 50, 50, 2) == 100.0

    def test_normalized_maxima_give_three(self):
        maxima = (80.0, 4.0, 512.0, 30.0)
        assert node_weight(80, 4, 512, 30, normalize=True, maxima=maxima) == pytest.approx(3.0)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            node_weight(0, 1, 1, 1)
        with pytest.raises(ValueError):
            node_weight(1, 1, 1, -1)

    def test_normalize_requires_maxima(self):
        with pytest.raises(ValueError):
            node_weight(1, 1, 1, 1, normalize=True)

    @given(bw=positive, sp=positive, mz=positive, al=positive, bump=positive)
    def test_monotone_in_each_parameter(self, bw, sp, mz, al, bump):
        base = node_weight(bw, sp, mz, al)
        assert node_weight(bw + bump, sp, mz, al) > base
        assert node_weight(bw, sp + bump, mz, al) > base
        assert node_weight(bw, sp, mz + bump, al) > base
        assert node_weight(bw, sp, mz, al + bump) < base


class TestWeightVector:
    def test_single_node(self):
        assert weight_vector(make_nodes([3.0])) == [(0, 3.0)]

    def test_sorted_with_id_tie_break(self):
        assert weight_vector(make_nodes([5.0, 9.0, 5.0])) == [(1, 9.0), (0, 5.0), (2, 5.0)]

    def test_all_equal_is_ascending_ids(self):
        assert weight_vector(make_nodes([2.0, 2.0, 2.0])) == [(0, 2.0), (1, 2.0), (2, 2.0)]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            weight_vector([])

    @given(st.lists(st.floats(min_value=0.1, max_value=100, allow_nan=False), min_size=1, max_size=30))
    def test_permutation_and_non_increasing(self, weights):
        vec = weight_vector(make_nodes(weights))
        assert sorted(nid for nid, _ in vec) == list(range(len(weights)))
        ws = [w for _, w in vec]
        assert all(ws[i] >= ws[i + 1] for i in range(len(ws) - 1))


class TestPartition:
    def test_hand_threshold(self):
        strong, weak = partition([(0, 5.0), (1, 9.0), (2, 3.0)], beta=4.0)
        assert strong == {0, 1}
        assert weak == {2}

    def test_beta_above_max(self):
        strong, weak = partition([(0, 5.0), (1, 9.0)], beta=100.0)
        assert strong == set()
        assert weak == {0, 1}

    def test_beta_at_min_is_all_strong(self):
        strong, weak = partition([(0, 5.0), (1, 9.0)], beta=5.0)
        assert strong == {0, 1}
        assert weak == set()

    def test_boundary_weight_is_strong(self):
        strong, _ = partition([(0, 4.0)], beta=4.0)
        assert strong == {0}

    def test_beta_must_be_positive(self):
        with pytest.raises(ValueError):
            partition([(0, 1.0)], beta=0.0)

    @given(
        st.lists(st.floats(min_value=0.01, max_value=100, allow_nan=False), min_size=1, max_size=40),
        st.floats(min_value=0.01, max_value=120),
    )
    def test_exhaustive_and_disjoint(self, weights, beta):
        vec = [(i, w) for i, w in enumerate(weights)]
        strong, weak = partition(vec, beta)
        assert strong | weak == set(range(len(weights)))
        assert strong & weak == set()


class TestNormalizedScaleInvariance:
    @settings(max_examples=25)
    @given(
        st.lists(
            st.tuples(positive, positive, positive, positive), min_size=2, max_size=20
        ),
        st.floats(min_value=0.1, max_value=50),
        st.floats(min_value=0.05, max_value=2.5),
    )
    def test_common_scaling_preserves_partition(self, params, scale, beta):
        nodes = [NodeSpec(id=i, bw=p[0], sp=p[1], mz=p[2], al=p[3]) for i, p in enumerate(params)]
        assign_weights(nodes, normalize=True)
        before = partition(weight_vector(nodes), beta)
        scaled = [
            NodeSpec(id=i, bw=p[0] * scale, sp=p[1], mz=p[2], al=p[3])
            for i, p in enumerate(params)
        ]
        assign_weights(scaled, normalize=True)
        after = partition(weight_vector(scaled), beta)
        assert before == after


def test_tag_clusters_marks_membership():
    nodes = make_nodes([1.0, 2.0, 3.0])
    tag_clusters(nodes, {2})
    assert [n.cluster for n in nodes] == [WEAK, WEAK, STRONG]
