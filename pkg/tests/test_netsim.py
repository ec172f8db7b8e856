"""
Tests for the law packet codec and the networked closed loop.
"""

import struct

import numpy as np
import pytest
from controller.controller import run_trajectory
from errors import MalformedPacket
from models import Mode, PacketKind, Provenance
from netsim.bus import MessageBus
from netsim.networked import run_networked
from netsim.packet import (
    HEADER_SIZE,
    MAGIC,
    LawPacket,
    deserialize_packet,
    packet_for,
    packet_size,
    serialize_packet,
)
from regions.extended import ExtendedRegion
from regions.optimal import OptimalPolytope
from regions.quadric import QuadricInequality
from synthesis.polytope import Polytope


@pytest.fixture
def optimal_packet(example1_laws):
    law, optimal, _ = example1_laws[0]
    return packet_for(law, OptimalPolytope(optimal))


class TestPacket:
    def test_example1_optimal_packet_size(self, optimal_packet):
        payload = serialize_packet(optimal_packet)
        assert optimal_packet.rows == 32
        assert len(payload) == 808
        assert len(payload) == packet_size(PacketKind.optimal_polytope, 2, 1, 32)

    def test_extended_packet_carries_quadric(self):
        packet = LawPacket(
            PacketKind.extended,
            np.array([[1.0, 2.0]]),
            np.array([0.5]),
            np.ones((3, 2)),
            np.arange(3.0),
            np.eye(2),
            np.array([0.25, -0.25]),
            4.0,
        )
        decoded = deserialize_packet(serialize_packet(packet))
        assert decoded.kind is PacketKind.extended
        np.testing.assert_array_equal(decoded.T3, packet.T3)
        np.testing.assert_array_equal(decoded.T2, packet.T2)
        assert decoded.d2 == 4.0
        assert isinstance(decoded.region(), ExtendedRegion)

    def test_zero_row_packet(self):
        empty = Polytope.empty_rows(2)
        kind = PacketKind.optimal_polytope
        packet = LawPacket(kind, np.zeros((1, 2)), np.zeros(1), empty.T, empty.d)
        payload = serialize_packet(packet)
        assert len(payload) == HEADER_SIZE + 8 * 3
        assert deserialize_packet(payload).rows == 0

    def test_decoded_region_decides_like_the_original(self, example1_qp, example1_laws, rng):
        law, optimal, _ = example1_laws[-1]
        region = ExtendedRegion(optimal, QuadricInequality(np.eye(2), np.zeros(2), 4.0))
        decoded = deserialize_packet(serialize_packet(packet_for(law, region))).region()
        for x in rng.uniform(-3, 3, size=(200, 2)):
            assert decoded.contains(x) == region.contains(x)
        assert decoded.flops == region.flops

    def test_truncated_payload(self, optimal_packet):
        payload = serialize_packet(optimal_packet)
        with pytest.raises(MalformedPacket):
            deserialize_packet(payload[:-8])
        with pytest.raises(MalformedPacket, match="header"):
            deserialize_packet(payload[:10])

    def test_bad_magic(self, optimal_packet):
        payload = serialize_packet(optimal_packet)
        with pytest.raises(MalformedPacket, match="magic"):
            deserialize_packet(b"XXXX" + payload[4:])

    def test_kind_and_quadric_count_must_agree(self):
        header = struct.pack("<4sIHHHH", MAGIC, int(PacketKind.optimal_polytope), 1, 1, 0, 1)
        with pytest.raises(MalformedPacket, match="r2"):
            deserialize_packet(header + np.zeros(2).tobytes())

    def test_unknown_kind(self):
        header = struct.pack("<4sIHHHH", MAGIC, 7, 1, 1, 0, 0)
        with pytest.raises(MalformedPacket, match="kind"):
            deserialize_packet(header + np.zeros(2).tobytes())

    def test_unknown_region_type(self, example1_laws):
        with pytest.raises(TypeError):
            packet_for(example1_laws[0][0], Polytope.empty_rows(2))


class TestBus:
    def test_counts_requests_and_packets(self):
        bus = MessageBus()
        bus.request(np.zeros(2))
        bus.deliver(b"\x00" * 40)
        assert bus.messages == 2
        assert bus.packets == 1
        assert bus.bytes_tx == 40


class TestNetworkedLoop:
    @pytest.mark.parametrize("mode", list(Mode))
    def test_matches_single_process_loop(self, example1_qp, feasible_states, mode):
        for x0 in feasible_states[:8]:
            local = run_trajectory(example1_qp, example1_qp.plant, mode, x0, lam=0.9)
            networked, telemetry = run_networked(
                example1_qp, example1_qp.plant, mode, x0, lam=0.9
            )
            np.testing.assert_array_equal(networked.states, local.states)
            np.testing.assert_array_equal(networked.inputs, local.inputs)
            np.testing.assert_array_equal(networked.events, local.events)
            assert telemetry.qp_count == local.qp_count
            assert telemetry.local_flops == local.total_flops
            assert telemetry.messages == 2 * telemetry.qp_count
            assert telemetry.steps == local.steps

    def test_bytes_follow_packet_sizes(self, example1_qp, feasible_states):
        trajectory, telemetry = run_networked(
            example1_qp, example1_qp.plant, Mode.optimal, feasible_states[3]
        )
        # every optimal-mode packet carries the full 32-row P*
        assert telemetry.bytes_tx == 808 * telemetry.qp_count
        assert telemetry.total_cost == pytest.approx(trajectory.total_cost)

    def test_converged_start_still_bootstraps(self, example1_qp):
        trajectory, telemetry = run_networked(
            example1_qp, example1_qp.plant, Mode.suboptimal, np.zeros(2)
        )
        assert trajectory.steps == 0
        assert telemetry.qp_count == 1
        assert telemetry.messages == 2
        assert telemetry.local_flops == 0

    @pytest.mark.parametrize("mode", [Mode.suboptimal, Mode.suboptimal_with_projections])
    def test_local_flops_recomputed_from_provenance(self, example1_qp, feasible_states, mode):
        n = example1_qp.n
        trajectory, telemetry = run_networked(
            example1_qp, example1_qp.plant, mode, feasible_states[5], lam=0.8
        )
        expected = 0
        # the check at step k runs against the region left in effect by step k - 1
        for region in trajectory.regions[:-1]:
            rows = region.poly.rows if isinstance(region, OptimalPolytope) else region.feas.rows
            if region.provenance is Provenance.optimal:
                expected += 2 * rows * n
            else:
                expected += 2 * n * n + 3 * n + 2 * rows * n
        assert telemetry.local_flops == expected
        assert telemetry.local_flops == trajectory.total_flops
