"""Bundled benchmark instances and access helpers."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..solomon import SolomonInstance, parse_solomon
from ._synth import INSTANCE_NAMES, family_of, generate_instance, write_all

__all__ = ["available", "instance_path", "load", "family_of",
           "generate_instance", "write_all", "INSTANCE_NAMES"]


def available() -> tuple[str, ...]:
    """Names of the bundled instances."""
    return INSTANCE_NAMES


def instance_path(name: str) -> Path:
    """Filesystem path of a bundled instance file."""
    fname = f"{name.upper()}.txt"
    path = Path(str(resources.files(__package__) / "instances" / fname))
    if not path.exists():
        raise FileNotFoundError(f"no bundled instance named {name!r}")
    return path


def load(name: str, first_n: int | None = None) -> SolomonInstance:
    """Parse a bundled instance, optionally truncated to its first n customers."""
    inst = parse_solomon(instance_path(name).read_text(encoding="utf-8"))
    if first_n is not None:
        inst = inst.first(first_n)
    return inst
