from abc import ABC, abstractmethod
from functools import wraps
from pathlib import Path
from typing import Optional, Union

from prometheus_client import CollectorRegistry, Counter, Enum, Gauge, write_to_textfile
from prometheus_client.metrics import MetricWrapperBase

from .diagnostics import energy
from .exceptions import CorruptionError, ZeroModeError
from .kernels import KernelSpec
from .nonlinearity import NonlinearitySpec
from .solver import Outcome, Snapshot

NaN = float('NaN')


def handle_exceptions(*exceptions):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except exceptions:
                return NaN

        return wrapper

    return decorator


# Base class for metrics
class Metrics(ABC):
    """
    Base class for creating and managing metrics.
    Automatically appends `namespace` and `subsystem` to metric names.
    """

    def __init__(self, namespace='', subsystem='', registry: Optional[CollectorRegistry] = None):
        self.namespace = namespace
        self.subsystem = subsystem
        self.registry = registry if registry is not None else CollectorRegistry()
        self.metrics = {}

    def _create_metric(self, metric_type: type(MetricWrapperBase), name: str, **kwargs):
        self.metrics[name] = metric_type(
            name=name,
            namespace=self.namespace,
            subsystem=self.subsystem,
            registry=self.registry,
            **kwargs
        )
        return self.metrics[name]

    def create_gauge(self, name: str, **kwargs):
        return self._create_metric(Gauge, name, **kwargs)

    def create_counter(self, name: str, **kwargs):
        return self._create_metric(Counter, name, **kwargs)

    def create_enum(self, name: str, **kwargs):
        return self._create_metric(Enum, name, **kwargs)

    def write(self, path: Union[str, Path]):
        """Dump the registry in the node-exporter textfile format."""
        write_to_textfile(str(path), self.registry)

    @abstractmethod
    def update_metrics(self):
        pass


class SimulationMetrics(Metrics):
    """
    Gauges for one simulation run, updated from integrate() snapshots.

    An instance is an integrate() observer. Energy is NaN when the snapshot
    velocities carry a mean, where the kinetic term is undefined.
    """
    def __init__(self, k1: KernelSpec, k2: KernelSpec, nl: NonlinearitySpec,
                 registry: Optional[CollectorRegistry] = None, track_energy: bool = True):
        super().__init__('nonlocal_waves', subsystem='simulation', registry=registry)
        self.k1 = k1
        self.k2 = k2
        self.nl = nl
        self.track_energy = track_energy
        self.snapshot: Optional[Snapshot] = None
        self.initial_energy: Optional[float] = None

        self.time = self.create_gauge(name='time',
                                      documentation='Simulation time of the latest snapshot')
        self.energy = self.create_gauge(name='energy_total',
                                        documentation='Total conserved energy')
        self.energy_drift = self.create_gauge(name='energy_relative_drift',
                                              documentation='|E(t) - E(0)| / max(1, |E(0)|)')
        self.sup_norm = self.create_gauge(name='sup_norm',
                                          documentation='Sup norm of each displacement',
                                          labelnames=('component',))
        self.hs_norm = self.create_gauge(name='hs_norm',
                                         documentation='H^s size of displacements and velocities')
        self.snapshots = self.create_counter(name='snapshots',
                                             documentation='Snapshots recorded')
        self.outcome = self.create_enum(name='outcome',
                                        documentation='Outcome of the run',
                                        states=[o.value for o in Outcome] + ['running'])
        self.outcome.state('running')

    @handle_exceptions(ZeroModeError, CorruptionError, ValueError)
    def get_energy(self) -> float:
        return energy(self.snapshot.state, self.k1, self.k2, self.nl).total

    def get_energy_drift(self, current: float) -> float:
        if self.initial_energy is None:
            self.initial_energy = current
        return abs(current - self.initial_energy) / max(1.0, abs(self.initial_energy))

    def __call__(self, snapshot: Snapshot):
        self.snapshot = snapshot
        self.update_metrics()

    def update_metrics(self):
        if self.snapshot is None:
            return
        self.time.set(self.snapshot.t)
        self.sup_norm.labels('u1').set(self.snapshot.sup_u1)
        self.sup_norm.labels('u2').set(self.snapshot.sup_u2)
        self.hs_norm.set(self.snapshot.hs_norm)
        self.snapshots.inc()
        if self.track_energy:
            current = self.get_energy()
            self.energy.set(current)
            self.energy_drift.set(self.get_energy_drift(current))

    def set_outcome(self, outcome: Outcome):
        self.outcome.state(outcome.value)
