"""
Law packet wire format (central node → local node).

    offset  size  field
    0       4     magic b"RMPC"
    4       4     kind, u32 LE (0 optimal polytope, 1 extended)
    8       2     n, u16 LE
    10      2     m, u16 LE
    12      2     r1, u16 LE  rows of the polytope
    14      2     r2, u16 LE  0 for optimal, 1 for extended (one quadric)
    16      ...   little-endian float64, row-major, in this order:
                  optimal:  K (m×n), b (m), T* (r1×n), d* (r1)
                  extended: K (m×n), b (m), T1 (r1×n), d1 (r1), T3 (n×n), T2 (n), d2 (1)
"""

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np
from errors import MalformedPacket
from models import PacketKind
from regions.base import ValidityRegion
from regions.extended import ExtendedRegion
from regions.laws import AffineLaw
from regions.optimal import OptimalPolytope
from regions.quadric import QuadricInequality
from synthesis.polytope import Polytope

MAGIC = b"RMPC"
_HEADER = struct.Struct("<4sIHHHH")
HEADER_SIZE = _HEADER.size
_WIRE = np.dtype("<f8")


@dataclass(frozen=True)
class LawPacket:
    kind: PacketKind
    K: np.ndarray
    b: np.ndarray
    T: np.ndarray
    d: np.ndarray
    T3: Optional[np.ndarray] = None
    T2: Optional[np.ndarray] = None
    d2: Optional[float] = None

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def m(self) -> int:
        return self.K.shape[0]

    @property
    def rows(self) -> int:
        return self.T.shape[0]

    def matrices(self) -> list[np.ndarray]:
        fields = [self.K, self.b, self.T, self.d]
        if self.kind is PacketKind.extended:
            fields += [self.T3, self.T2, np.array([self.d2])]
        return fields

    def region(self) -> ValidityRegion:
        """Region the local node checks against. Only the kind tag of the provenance is sent."""
        polytope = Polytope(self.T, self.d)
        if self.kind is PacketKind.optimal_polytope:
            return OptimalPolytope(polytope)
        return ExtendedRegion(polytope, QuadricInequality(self.T3, self.T2, self.d2))


def packet_for(law: AffineLaw, region: ValidityRegion) -> LawPacket:
    if isinstance(region, OptimalPolytope):
        return LawPacket(PacketKind.optimal_polytope, law.K, law.b, region.poly.T, region.poly.d)
    if isinstance(region, ExtendedRegion):
        return LawPacket(
            PacketKind.extended,
            law.K,
            law.b,
            region.feas.T,
            region.feas.d,
            region.stab.T3,
            region.stab.T2,
            region.stab.d2,
        )
    raise TypeError(f"no wire format for {type(region).__name__}")


def packet_size(kind: PacketKind, n: int, m: int, rows: int) -> int:
    entries = m * n + m + rows * n + rows
    if kind is PacketKind.extended:
        entries += n * n + n + 1
    return HEADER_SIZE + _WIRE.itemsize * entries


def serialize_packet(packet: LawPacket) -> bytes:
    r2 = 1 if packet.kind is PacketKind.extended else 0
    header = _HEADER.pack(MAGIC, int(packet.kind), packet.n, packet.m, packet.rows, r2)
    body = b"".join(np.ascontiguousarray(a, dtype=_WIRE).tobytes() for a in packet.matrices())
    return header + body


def deserialize_packet(payload: bytes) -> LawPacket:
    if len(payload) < HEADER_SIZE:
        raise MalformedPacket(f"{len(payload)} bytes is shorter than the {HEADER_SIZE}-byte header")
    magic, kind, n, m, rows, r2 = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise MalformedPacket(f"bad magic {magic!r}")
    try:
        kind = PacketKind(kind)
    except ValueError as exc:
        raise MalformedPacket(f"unknown packet kind {kind}") from exc
    expected_r2 = 1 if kind is PacketKind.extended else 0
    if r2 != expected_r2:
        raise MalformedPacket(f"{kind.name} packet must carry r2={expected_r2}, got {r2}")
    expected = packet_size(kind, n, m, rows)
    if len(payload) != expected:
        raise MalformedPacket(
            f"expected {expected} bytes for n={n} m={m} rows={rows}, got {len(payload)}"
        )

    values = np.frombuffer(payload, dtype=_WIRE, offset=HEADER_SIZE).astype(float)
    shapes = [(m, n), (m,), (rows, n), (rows,)]
    if kind is PacketKind.extended:
        shapes += [(n, n), (n,), (1,)]
    arrays, start = [], 0
    for shape in shapes:
        size = int(np.prod(shape))
        arrays.append(values[start : start + size].reshape(shape))
        start += size

    if kind is PacketKind.optimal_polytope:
        return LawPacket(kind, *arrays)
    K, b, T, d, T3, T2, d2 = arrays
    return LawPacket(kind, K, b, T, d, T3, T2, float(d2[0]))
