"""Carbon and cost estimates for cross-silo federated learning versus
centralized training, plus a data-access request registry.

Thin wrapper over the compiled ``_core`` extension: structured results come
back as plain dicts decoded from the same JSON the command-line tool emits.
"""

import json
from importlib import resources
from typing import Optional

from . import _core
from ._core import (
    RegistryError,
    SimulationError,
    ValidationError,
    cluster_tier_for,
    compute_energy_kwh,
    emissions_gco2e,
    memory_energy_kwh,
    network_energy_kwh,
    sci_rate,
    storage_energy_kwh,
    text_similarity,
    tokenize,
)

__version__ = _core.__version__

__all__ = [
    "RegistryError",
    "Registry",
    "SimulationError",
    "ValidationError",
    "bundled_scenario",
    "cluster_tier_for",
    "compare",
    "compute_energy_kwh",
    "default_factors",
    "emissions_gco2e",
    "estimate",
    "memory_energy_kwh",
    "network_energy_kwh",
    "run_cli",
    "sci_rate",
    "storage_energy_kwh",
    "text_similarity",
    "tokenize",
    "trace",
]


def bundled_scenario(scale: str) -> str:
    """Path of a bundled scenario file: ``small``, ``medium`` or ``large``."""
    path = resources.files(__name__) / "scenarios" / f"{scale}.scenario"
    if not path.is_file():
        raise ValueError(f"no bundled scenario named {scale!r}")
    return str(path)


def default_factors() -> dict:
    return json.loads(_core.default_factors_text())


def estimate(
    scenario: str,
    mode: str = "federated",
    seed: int = 42,
    total_size_gb: Optional[float] = None,
    functional_units: Optional[float] = None,
    embodied_g: float = 0.0,
) -> dict:
    """Simulate one deployment style; returns provenance, report and final model."""
    return json.loads(
        _core.estimate_json(scenario, mode, seed, total_size_gb, functional_units, embodied_g)
    )


def compare(scenario: str, seed: int = 42, total_size_gb: Optional[float] = None) -> dict:
    """Run both styles on one scenario; returns provenance and comparison."""
    return json.loads(_core.compare_json(scenario, seed, total_size_gb))


def trace(scenario: str, mode: str = "federated", seed: int = 42) -> list:
    """Usage events of one simulated run, in trace order."""
    return [json.loads(line) for line in _core.trace_jsonl(scenario, mode, seed).splitlines()]


def run_cli(*args: str):
    """Run the command-line tool in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli(list(args))


class Registry:
    """Event-sourced request store. Pass ``path`` to persist to a log file."""

    def __init__(self, path: Optional[str] = None, _store=None):
        if _store is not None:
            self._store = _store
        elif path is None:
            self._store = _core.RequestStore()
        else:
            self._store = _core.RequestStore.open(path)

    @classmethod
    def replay(cls, log_text: str) -> "Registry":
        return cls(_store=_core.RequestStore.replay(log_text))

    def submit(self, description: str, owner: str, dataset_ids=()) -> dict:
        return json.loads(self._store.submit(description, list(dataset_ids), owner))

    def approve(self, request_id: int, total_size_gb: float) -> dict:
        return json.loads(self._store.approve(request_id, total_size_gb))

    def reject(self, request_id: int) -> dict:
        return json.loads(self._store.reject(request_id))

    def mark_duplicate(self, request_id: int, of_id: int):
        """Returns the updated request and the owner of the existing one."""
        text, owner = self._store.mark_duplicate(request_id, of_id)
        return json.loads(text), owner

    def check(self, request_id: int, threshold: float = 0.8):
        """Approved requests similar to ``request_id`` as (id, score), best first."""
        return self._store.check(request_id, threshold)

    def get(self, request_id: int) -> dict:
        return json.loads(self._store.get(request_id))

    def requests(self) -> list:
        return [self.get(i) for i in self._store.ids()]

    @property
    def log_text(self) -> str:
        return self._store.log_text

    def __eq__(self, other) -> bool:
        return isinstance(other, Registry) and self._store == other._store
