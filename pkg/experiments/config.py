from dataclasses import dataclass
from typing import Optional

from dynamics.instances import Instance

MODES = ('demo', 'check', 'secondlaw', 'tomography', 'random-instance')
OUTPUTS = ('json', 'csv')
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    d_s: int = 2
    d_e: int = 2
    seed: int = 0
    trials: int = 500
    samples: int = 10000
    tolerance: float = 1e-9
    units: str = 'nats'
    output: str = 'json'
    workers: int = 1
    instance: Optional[Instance] = None

    @property
    def dims(self):
        return self.d_s, self.d_e

    def as_dict(self):
        """Plain description of the run, without the inline instance."""
        return {
            'mode': self.mode,
            'dims': [self.d_s, self.d_e],
            'seed': self.seed,
            'trials': self.trials,
            'samples': self.samples,
            'tolerance': self.tolerance,
            'units': self.units,
            'output': self.output,
            'workers': self.workers,
            'instance': self.instance is not None,
        }
