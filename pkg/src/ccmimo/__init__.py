"""Coded-caching delivery schemes for multi-antenna transmitters and
multi-stream receivers: generation, elevation, verification, simulation."""
from .elevate import elevate_scheme, stretch_term, virtual_config
from .miso import cyclic_t1_scheduler, decouple, multiserver_bitlevel, schedule_search
from .model import (
    CachePlacement,
    CyclicPacket,
    Delivery,
    DeliveryScheme,
    NetworkConfig,
    StreamId,
    SubpacketId,
    SubsetPacket,
    Term,
    TransmissionVector,
    demands_from_list,
    validate_config,
)
from .placement import cyclic_placement, is_cached, subset_placement
from .verify import (
    achieved_dof,
    check_scheme,
    predicted_subpacketization,
    subpacketization_of,
)

__version__ = "0.1.0"
