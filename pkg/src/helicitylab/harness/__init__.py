"""Configuration, canned initial data, runs, property suites and the CLI."""

from .config import RunConfig, load_config, parse_config
from .initial import init_state
from .runs import report, run_euler, run_mhd

__all__ = ["RunConfig", "init_state", "load_config", "parse_config", "report", "run_euler", "run_mhd"]
