"""Numerical laboratory for radial wave packets, tube overlaps, dispersive
norms of packet superpositions, and a radial spectral wave solver."""

from .frame import (
    BumpProfiles,
    FrameParameterError,
    FrameParams,
    PacketIndex,
    SpacetimePoint,
    make_frame,
    make_profiles,
    packet_eval,
    radial_packet_eval,
    tube_contains,
)

__version__ = "0.1.0"

__all__ = [
    "BumpProfiles",
    "FrameParameterError",
    "FrameParams",
    "PacketIndex",
    "SpacetimePoint",
    "make_frame",
    "make_profiles",
    "packet_eval",
    "radial_packet_eval",
    "tube_contains",
]
