"""Registry of fractional chaotic systems.

Both built-ins are three-dimensional polynomial fields: the T system and the
Rossler system. Additional systems can be registered at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .core import as_orders
from .errors import ConfigurationError

__all__ = [
    "PAPER_ORDERS",
    "ParamPreset",
    "SystemDef",
    "available_systems",
    "register_system",
    "registry_lookup",
    "rossler_system",
    "t_system",
]

# orders used for every simulation of the coupled systems
PAPER_ORDERS = (0.9, 0.5, 0.6)


@dataclass(frozen=True)
class ParamPreset:
    system: str
    values: Mapping[str, float]
    note: str = ""


T_PRESET = ParamPreset("t", MappingProxyType({"a1": 2.1, "b1": 0.6, "c1": 30.0}), "chaotic regime")
ROSSLER_PRESET = ParamPreset(
    "rossler", MappingProxyType({"a2": 0.2, "b2": 0.2, "c2": 5.7}), "chaotic regime"
)


@dataclass(frozen=True)
class SystemDef:
    """A named vector field ``field(t, state) -> derivative``."""

    name: str
    dimension: int
    params: Mapping[str, float]
    field: Callable[[float, np.ndarray], np.ndarray] = field(repr=False)
    default_orders: tuple = PAPER_ORDERS

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        as_orders(self.default_orders, self.dimension)

    def __call__(self, t, state):
        return self.field(t, state)


def _require(params: Mapping[str, float], names, system: str) -> Dict[str, float]:
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigurationError(f"{system} system is missing parameter(s): {', '.join(missing)}")
    extra = sorted(set(params) - set(names))
    if extra:
        raise ConfigurationError(f"{system} system has no parameter(s): {', '.join(extra)}")
    return {n: float(params[n]) for n in names}


def t_system(params: Optional[Mapping[str, float]] = None) -> SystemDef:
    """T system: ``(a1(y-x), (c1-a1)x - a1 x z, x y - b1 z)``."""
    p = _require(T_PRESET.values if params is None else params, ("a1", "b1", "c1"), "T")
    a1, b1, c1 = p["a1"], p["b1"], p["c1"]

    def field(t, s):
        x, y, z = s
        return np.array([a1 * (y - x), (c1 - a1) * x - a1 * x * z, x * y - b1 * z])

    return SystemDef("t", 3, p, field)


def rossler_system(params: Optional[Mapping[str, float]] = None) -> SystemDef:
    """Rossler system: ``(-y-z, x + a2 y, b2 + z(x - c2))``."""
    p = _require(ROSSLER_PRESET.values if params is None else params, ("a2", "b2", "c2"), "Rossler")
    a2, b2, c2 = p["a2"], p["b2"], p["c2"]

    def field(t, s):
        x, y, z = s
        return np.array([-y - z, x + a2 * y, b2 + z * (x - c2)])

    return SystemDef("rossler", 3, p, field)


_REGISTRY: Dict[str, tuple] = {
    "t": (t_system, T_PRESET),
    "rossler": (rossler_system, ROSSLER_PRESET),
}


def register_system(name: str, factory: Callable[[Mapping[str, float]], SystemDef], preset: Mapping[str, float]):
    """Add a user-defined system; ``factory(params)`` must return a :class:`SystemDef`."""
    if name in _REGISTRY:
        raise ConfigurationError(f"system {name!r} is already registered")
    _REGISTRY[name] = (factory, ParamPreset(name, MappingProxyType(dict(preset))))


def available_systems():
    return sorted(_REGISTRY)


def registry_lookup(name: str, overrides: Optional[Mapping[str, float]] = None) -> SystemDef:
    try:
        factory, preset = _REGISTRY[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown system {name!r}; choose from {', '.join(available_systems())}"
        ) from None
    params = dict(preset.values)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ConfigurationError(f"system {name!r} has no parameter {key!r}")
        params[key] = float(value)
    return factory(params)
