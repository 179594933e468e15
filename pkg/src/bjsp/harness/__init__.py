"""File formats, synthetic instances, experiment studies and the CLI."""

from .generator import GeneratorConfig, Generated, generate
from .io import (dump_instance, dump_schedule, load_instance, load_schedule,
                 read_instance, read_schedule)

__all__ = ["GeneratorConfig", "Generated", "generate", "dump_instance", "dump_schedule",
           "load_instance", "load_schedule", "read_instance", "read_schedule"]
