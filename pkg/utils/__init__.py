"""
Utils Package
Seeded sampling, parsing, console output and report generation.
"""

from .csv_generator import CSVGenerator
from .yaml_generator import YAMLGenerator
from .seeded_rng import SplitMix64

__all__ = ['CSVGenerator', 'YAMLGenerator', 'SplitMix64']
