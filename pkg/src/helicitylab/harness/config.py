"""Run configuration: a TOML file with dotted section keys.

Example::

    grid.n = 32
    run.t_end = 1.0
    run.courant = 0.25
    init.kind = "abc"
    init.amplitudes = [1.0, 1.0, 1.0]
    invariants.max_n = 2
    output.path = "runs/abc"

``[section]`` tables are equivalent to the dotted form.  Unknown sections or
keys are rejected so that typos cannot silently fall back to defaults.
"""

import math
from dataclasses import asdict, dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import ConfigError
from ..fieldcalc import TWO_PI

INIT_KINDS = ("abc", "beltrami_random", "taylor_green", "random_solenoidal")
GAUGE_TRACKS = ("weyl", "transport", "both")
FORMATS = ("csv", "json")
MIN_POINTS = 8


@dataclass
class GridSection:
    n: list = field(default_factory=lambda: [32, 32, 32])
    L: list = field(default_factory=lambda: [TWO_PI] * 3)


@dataclass
class EosSection:
    gamma: float = 5.0 / 3.0
    K: float = 1.0
    c_v: float = 1.0


@dataclass
class RunSection:
    courant: float = 0.25
    t_end: float = 1.0
    sample_every: int = 1
    seed: int = 0
    max_steps: int = 100000


@dataclass
class InitSection:
    kind: str = "abc"
    amplitudes: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    u_amplitude: float = 1.0
    b_amplitude: float = 1.0
    perturbation: float = 0.05
    kmax: int = 3
    shift: list = field(default_factory=lambda: [math.pi / 3, math.pi / 5, math.pi / 7])


@dataclass
class InvariantsSection:
    max_n: int = 2
    gauge_track: str = "transport"


@dataclass
class EulerSection:
    variable_density: bool = False
    paper_sign: bool = False


@dataclass
class OutputSection:
    path: str = "run"
    format: str = "csv"


@dataclass
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    eos: EosSection = field(default_factory=EosSection)
    run: RunSection = field(default_factory=RunSection)
    init: InitSection = field(default_factory=InitSection)
    invariants: InvariantsSection = field(default_factory=InvariantsSection)
    euler: EulerSection = field(default_factory=EulerSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        self.normalize()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a table")
        sections = {f.name: f for f in fields(cls)}
        kwargs = {}
        for name, table in data.items():
            if name not in sections:
                raise ConfigError(f"unknown section {name!r}")
            if not isinstance(table, dict):
                raise ConfigError(f"section {name!r} must be a table")
            section_cls = sections[name].default_factory
            known = {f.name for f in fields(section_cls)}
            unknown = set(table) - known
            if unknown:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
            kwargs[name] = section_cls(**table)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def normalize(self):
        g = self.grid
        g.n = _triple(g.n, int, "grid.n")
        g.L = _triple(g.L, float, "grid.L")
        self.init.amplitudes = _triple(self.init.amplitudes, float, "init.amplitudes")
        self.init.shift = _triple(self.init.shift, float, "init.shift")

    def validate(self):
        for ni in self.grid.n:
            if ni < MIN_POINTS or ni % 2:
                raise ConfigError(f"grid.n entries must be even and >= {MIN_POINTS}, got {self.grid.n}")
        if not all(Li > 0 and math.isfinite(Li) for Li in self.grid.L):
            raise ConfigError("grid.L entries must be positive")
        e = self.eos
        if not e.gamma > 1.0:
            raise ConfigError("eos.gamma must exceed 1")
        if not (e.K > 0 and e.c_v > 0):
            raise ConfigError("eos.K and eos.c_v must be positive")
        r = self.run
        if not (0.0 < r.courant <= 1.0):
            raise ConfigError("run.courant must lie in (0, 1]")
        if not (math.isfinite(r.t_end) and r.t_end >= 0.0):
            raise ConfigError("run.t_end must be finite and non-negative")
        if _not_int(r.sample_every) or r.sample_every < 1:
            raise ConfigError("run.sample_every must be an integer >= 1")
        if _not_int(r.seed) or _not_int(r.max_steps) or r.max_steps < 1:
            raise ConfigError("run.seed and run.max_steps must be integers (max_steps >= 1)")
        i = self.init
        if i.kind not in INIT_KINDS:
            raise ConfigError(f"init.kind must be one of {INIT_KINDS}, got {i.kind!r}")
        if _not_int(i.kmax) or i.kmax < 1:
            raise ConfigError("init.kmax must be an integer >= 1")
        if not (0.0 <= i.perturbation < 1.0):
            raise ConfigError("init.perturbation must lie in [0, 1) to keep the density positive")
        v = self.invariants
        if _not_int(v.max_n) or not (0 <= v.max_n <= 4):
            raise ConfigError("invariants.max_n must be an integer in [0, 4]")
        if v.gauge_track not in GAUGE_TRACKS:
            raise ConfigError(f"invariants.gauge_track must be one of {GAUGE_TRACKS}")
        if not isinstance(self.euler.variable_density, bool) or not isinstance(self.euler.paper_sign, bool):
            raise ConfigError("euler flags must be booleans")
        if self.output.format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}")
        if not self.output.path:
            raise ConfigError("output.path must be non-empty")


def _not_int(x):
    return isinstance(x, bool) or not isinstance(x, int)


def _triple(value, cast, name):
    try:
        if isinstance(value, (list, tuple)):
            out = [cast(v) for v in value]
        else:
            out = [cast(value)] * 3
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if len(out) != 3:
        raise ConfigError(f"{name} needs one value or three")
    return out


def load_config(path):
    """Parse and validate a config file; raises ``ConfigError`` or ``OSError``."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    try:
        return RunConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig.from_dict(data)
