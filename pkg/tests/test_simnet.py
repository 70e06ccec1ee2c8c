import pytest
from hypothesis import given
from hypothesis import strategies as st

from qirmsim.simnet import (
    BandwidthLedger,
    Engine,
    LinkSpec,
    TransferScheduler,
    one_way_delay,
    transfer_time,
)


def link(node=0, up=8.0, down=80.0, delay=0.0):
    return LinkSpec(node, up, down, delay)


class TestTransferTime:
    def test_control_packet_is_pure_delay_with_zero_size_override(self):
        src, dst = link(0, delay=5.0), link(1, delay=5.0)
        assert transfer_time(0.0, src, dst, control_packet_kb=0.0) == pytest.approx(0.010)

    def test_one_mb_over_bottleneck_uplink(self):
        assert transfer_time(1.0, link(0, up=8, down=999), link(1, up=1, down=80)) == pytest.approx(1.0)

    def test_bottleneck_is_symmetric_in_min(self):
        assert transfer_time(1.0, link(0, up=80, down=1), link(1, up=999, down=8)) == pytest.approx(1.0)

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            transfer_time(-1.0, link(0), link(1))

    @given(
        s1=st.floats(min_value=0.001, max_value=50),
        s2=st.floats(min_value=0.001, max_value=50),
        up=st.floats(min_value=0.5, max_value=200),
        down=st.floats(min_value=0.5, max_value=200),
        bump=st.floats(min_value=0.1, max_value=100),
    )
    def test_monotonicity(self, s1, s2, up, down, bump):
        src, dst = link(0, up=up, down=999), link(1, up=999, down=down)
        lo, hi = sorted((s1, s2))
        assert transfer_time(lo, src, dst) <= transfer_time(hi, src, dst)
        faster = link(0, up=up + bump, down=999)
        assert transfer_time(hi, faster, dst) <= transfer_time(hi, src, dst)


class TestEngine:
    def test_equal_times_dispatch_in_insertion_order(self):
        eng = Engine()
        eng.schedule(1.0, "a")
        eng.schedule(1.0, "b")
        eng.schedule(0.5, "c")
        log = eng.run_until(2.0)
        assert [e.kind for e in log] == ["c", "a", "b"]

    def test_empty_queue_returns_at_t_end(self):
        eng = Engine()
        assert eng.run_until(5.0) == []
        assert eng.now == 5.0

    def test_scheduling_into_past_rejected(self):
        eng = Engine()
        eng.schedule(1.0, "a")
        eng.run_until(2.0)
        with pytest.raises(ValueError):
            eng.schedule(1.5, "late")

    def test_events_beyond_horizon_stay_queued(self):
        eng = Engine()
        eng.schedule(1.0, "a")
        eng.schedule(9.0, "late")
        log = eng.run_until(5.0)
        assert [e.kind for e in log] == ["a"]
        assert eng.pending() == 1

    @given(st.lists(st.floats(min_value=0, max_value=100, allow_nan=False), min_size=1, max_size=40, unique=True))
    def test_dispatch_order_independent_of_insertion(self, times):
        eng1, eng2 = Engine(), Engine()
        for t in times:
            eng1.schedule(t, "e", (t,))
        for t in reversed(times):
            eng2.schedule(t, "e", (t,))
        log1 = [e.fire_at for e in eng1.run_until(101.0)]
        log2 = [e.fire_at for e in eng2.run_until(101.0)]
        assert log1 == log2 == sorted(times)


class TestTransferScheduler:
    def test_uplink_serializes_back_to_back(self):
        links = [link(0, up=8, down=80, delay=0), link(1, up=8, down=80, delay=0)]
        sched = TransferScheduler(links)
        s1 = sched.reserve(0, 1, 0.0, 1.0)
        s2 = sched.reserve(0, 1, 0.0, 1.0)
        assert s1[0] == 0.0
        assert s2[0] == pytest.approx(1.0)  # waits for the first uplink hold

    def test_slow_receiver_does_not_block_sender_capacity(self):
        links = [link(0, up=80, down=80, delay=0), link(1, up=8, down=8, delay=0), link(2, up=8, down=80, delay=0)]
        sched = TransferScheduler(links)
        sched.reserve(0, 1, 0.0, 1.0)  # uplink busy only 0.1s despite 1s delivery
        s2 = sched.reserve(0, 2, 0.0, 1.0)
        assert s2[0] == pytest.approx(0.1)

    def test_arrival_matches_unloaded_transfer_time(self):
        src, dst = link(0, up=8, down=999, delay=3.0), link(1, up=999, down=80, delay=2.0)
        sched = TransferScheduler([src, dst])
        booking = sched.reserve(0, 1, 0.0, 1.0)
        assert booking[2] == pytest.approx(transfer_time(1.0, src, dst))

    def test_deadline_rejection_leaves_links_untouched(self):
        links = [link(0, up=8, down=80, delay=0), link(1, up=8, down=80, delay=0)]
        sched = TransferScheduler(links)
        assert sched.reserve(0, 1, 0.0, 1.0, deadline=0.5) is None
        assert sched.up_free[0] == 0.0
        booking = sched.reserve(0, 1, 0.0, 1.0, deadline=2.0)
        assert booking is not None


class TestBandwidthLedger:
    def test_no_traffic_is_zero(self):
        ledger = BandwidthLedger(interval=1.0, n_nodes=2)
        assert ledger.utilization(0, "up", 8.0) == 0.0

    def test_saturation_is_one(self):
        ledger = BandwidthLedger(interval=1.0, n_nodes=2)
        ledger.charge(0, 1_000_000, "up", 0.5)  # 8 Mb on an 8 Mb/s link
        assert ledger.utilization(0, "up", 8.0) == pytest.approx(1.0)
        assert ledger.warnings == []

    def test_half_utilization(self):
        ledger = BandwidthLedger(interval=1.0, n_nodes=2)
        ledger.charge(0, 500_000, "up", 0.0)  # 4 Mb on 8 Mb/s over 1 s
        assert ledger.utilization(0, "up", 8.0) == pytest.approx(0.5)

    def test_oversubscription_clamps_and_warns(self):
        ledger = BandwidthLedger(interval=1.0, n_nodes=2)
        ledger.charge(0, 2_000_000, "up", 0.0)
        assert ledger.utilization(0, "up", 8.0) == 1.0
        assert len(ledger.warnings) == 1

    def test_directions_are_independent(self):
        ledger = BandwidthLedger(interval=1.0, n_nodes=2)
        ledger.charge(0, 500_000, "up", 0.0)
        assert ledger.utilization(0, "down", 8.0) == 0.0
        assert ledger.bytes_moved(0, "up") == 500_000


def test_one_way_delay_symmetric():
    a, b = link(0, delay=3.0), link(1, delay=7.0)
    assert one_way_delay(a, b) == one_way_delay(b, a) == pytest.approx(0.010)
