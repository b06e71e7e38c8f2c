"""Container-sliced VM benchmarking and weighted ranking toolkit."""

from .model import (
    AttributeCatalog,
    AttributeDescriptor,
    ContainerSpec,
    Direction,
    GroupId,
    TargetDescriptor,
    WeightVector,
    default_catalog,
    load_catalog,
    load_inventory,
    validate_weights,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeCatalog",
    "AttributeDescriptor",
    "ContainerSpec",
    "Direction",
    "GroupId",
    "TargetDescriptor",
    "WeightVector",
    "default_catalog",
    "load_catalog",
    "load_inventory",
    "validate_weights",
    "__version__",
]
