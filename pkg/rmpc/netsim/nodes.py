"""
The two ends of the networked loop.

The central node owns the QP and builds laws and regions on request. The local
node only ever sees decoded packets: it checks region membership and evaluates
u = Kx + b.
"""

import logging
from typing import Optional

import numpy as np
from controller.controller import LawBuilder
from models import Mode
from netsim.bus import MessageBus
from netsim.packet import LawPacket, deserialize_packet, packet_for, serialize_packet
from regions.base import ValidityRegion, membership
from regions.cache import RegionCache
from regions.laws import AffineLaw
from synthesis.condensing import CondensedQP

logger = logging.getLogger(__name__)


class CentralNode:
    def __init__(
        self,
        qp: CondensedQP,
        bus: MessageBus,
        mode: Mode,
        lam: float = 1.0,
        cache: Optional[RegionCache] = None,
    ):
        self.bus = bus
        self.builder = LawBuilder(qp, mode, lam, cache)
        self.qp_count = 0
        # full-horizon law and exact region of the last packet, kept for cost and bookkeeping
        self.law: Optional[AffineLaw] = None
        self.region: Optional[ValidityRegion] = None

    def handle_request(self, x: np.ndarray) -> bytes:
        self.law, self.region = self.builder.at(x)
        self.qp_count += 1
        payload = serialize_packet(packet_for(self.law, self.region))
        logger.debug("Central node: QP #%d, sending %d-byte packet", self.qp_count, len(payload))
        return self.bus.deliver(payload)


class LocalNode:
    def __init__(self, bus: MessageBus, central: CentralNode):
        self.bus = bus
        self.central = central
        self.packet: Optional[LawPacket] = None
        self._region: Optional[ValidityRegion] = None

    def request_law(self, x: np.ndarray) -> None:
        payload = self.central.handle_request(self.bus.request(x))
        self.packet = deserialize_packet(payload)
        self._region = self.packet.region()

    def check(self, x: np.ndarray) -> tuple[bool, int]:
        return membership(self._region, x)

    def control(self, x: np.ndarray) -> np.ndarray:
        return self.packet.K @ x + self.packet.b
