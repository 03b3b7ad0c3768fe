"""
Scenario configuration: a flat `key = value` text format with [section] headers,
validated by pydantic. Errors carry the line number of the offending key.
"""
import math
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError, SimulationError
from models.branch import BranchParams
from models.envelope import EnvelopeState, LawKind, OmegaLaw
from models.grid import GridSpec
from models.propagation import PotentialSpec, StepPlan

SECTIONS = ('scenario', 'law', 'envelope', 'grid', 'plan', 'outputs')
IMAGE_ROWS = 200

LineMap = Dict[Tuple[str, Optional[str]], int]


class Branch(str, Enum):
    PSI1 = 'psi1'
    PSI2 = 'psi2'
    PSI1_MINUS_PSI2 = 'psi1_minus_psi2'
    AIRY = 'airy'
    GAUSSIAN = 'gaussian'


class Mode(str, Enum):
    EVOLVE = 'evolve'
    PROFILE = 'profile'


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid', validate_assignment=True)


class LawSettings(_Section):
    kind: LawKind = LawKind.FREE
    omega_sq: float = 0.0
    eps: float = 0.0
    omega0: float = 0.0
    times: List[float] = Field(default_factory=list)
    values: List[float] = Field(default_factory=list)

    @field_validator('times', 'values', mode='before')
    @classmethod
    def split_list(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(',') if item.strip()]
        return value

    @field_validator('eps')
    @classmethod
    def check_eps(cls, value):
        if not abs(value) < 1:
            raise ValueError('breathing amplitude must satisfy |eps| < 1')
        return value

    @model_validator(mode='after')
    def check_table(self):
        if self.kind is LawKind.TABULATED:
            if len(self.times) < 2 or len(self.times) != len(self.values):
                raise ValueError('tabulated law needs >= 2 times and as many values')
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError('tabulated times must be strictly increasing')
        return self

    def build(self) -> OmegaLaw:
        if self.kind is LawKind.CONSTANT:
            return OmegaLaw.constant(self.omega_sq)
        if self.kind is LawKind.BREATHING:
            return OmegaLaw.breathing(self.eps, self.omega0)
        if self.kind is LawKind.TABULATED:
            return OmegaLaw.tabulated(self.times, self.values)
        return OmegaLaw.free()


class EnvelopeSettings(_Section):
    L0: float = 1.0
    Ldot0: float = 0.0
    xc0: float = 0.0
    xcdot0: float = 0.0

    @field_validator('L0')
    @classmethod
    def positive_scale(cls, value):
        if not value > 0:
            raise ValueError('initial scale factor must be positive')
        return value


class GridSettings(_Section):
    x_min: float = -40.0
    x_max: float = 60.0
    n: int = 4096

    @field_validator('n')
    @classmethod
    def power_of_two(cls, value):
        if value < 256 or value & (value - 1):
            raise ValueError('n must be a power of two >= 256')
        return value

    @model_validator(mode='after')
    def ordered(self):
        if not self.x_max > self.x_min:
            raise ValueError('x_max must exceed x_min')
        return self


class PlanSettings(_Section):
    dt: float = 2.5e-4
    n_steps: int = 16000
    record_every: int = 0
    absorber_width: float = 0.1
    absorber_strength: float = 40.0

    @field_validator('dt')
    @classmethod
    def positive_dt(cls, value):
        if not value > 0:
            raise ValueError('dt must be positive')
        return value

    @field_validator('n_steps', 'record_every')
    @classmethod
    def non_negative(cls, value):
        if value < 0:
            raise ValueError('must be non-negative')
        return value

    @field_validator('absorber_width')
    @classmethod
    def width_range(cls, value):
        if not 0.0 <= value <= 0.25:
            raise ValueError('absorber_width must lie in [0, 0.25]')
        return value


class OutputSettings(_Section):
    csv: bool = True
    image: bool = True


class ScenarioConfig(_Section):
    name: str = 'custom'
    mode: Mode = Mode.EVOLVE
    branch: Branch = Branch.PSI2
    a0: float = 1.0
    omega0: float = 1.0
    E: float = 0.0
    trunc_eps: float = 0.05
    trunc_center: float = 0.0
    wave_shift: float = 0.0
    potential_center: float = 0.0
    gaussian_center: float = 17.0
    gaussian_width: float = 10.0
    airy_decay: float = 0.1
    track_envelope: bool = True
    law: LawSettings = Field(default_factory=LawSettings)
    envelope: EnvelopeSettings = Field(default_factory=EnvelopeSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    plan: PlanSettings = Field(default_factory=PlanSettings)
    outputs: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator('omega0')
    @classmethod
    def non_negative_omega0(cls, value):
        if value < 0:
            raise ValueError('omega0 must be non-negative')
        return value

    @field_validator('trunc_eps', 'gaussian_width')
    @classmethod
    def non_negative_width(cls, value):
        if value < 0:
            raise ValueError('must be non-negative')
        return value

    def branch_params(self, n: int) -> BranchParams:
        return BranchParams(n=n, a0=self.a0, omega0=self.omega0, E=self.E)

    def omega_law(self) -> OmegaLaw:
        return self.law.build()

    def grid_spec(self) -> GridSpec:
        return GridSpec(self.grid.x_min, self.grid.x_max, self.grid.n)

    def step_plan(self) -> StepPlan:
        record_every = self.plan.record_every or max(1, self.plan.n_steps // IMAGE_ROWS)
        return StepPlan(self.plan.dt, self.plan.n_steps, record_every,
                        self.plan.absorber_width, self.plan.absorber_strength)

    def potential(self) -> PotentialSpec:
        return PotentialSpec(self.omega_law(), self.potential_center)

    def initial_envelope(self) -> EnvelopeState:
        """Envelope relative to the potential center; the wave sits at wave_shift"""
        return EnvelopeState(t=0.0, L=self.envelope.L0, Ldot=self.envelope.Ldot0,
                             xc=self.envelope.xc0 + self.wave_shift - self.potential_center,
                             xcdot=self.envelope.xcdot0)

    def to_text(self) -> str:
        lines = ['[scenario]']
        for key, value in self.model_dump(mode='json', exclude=set(SECTIONS[1:])).items():
            lines.append(f"{key} = {_format(value)}")
        for section in SECTIONS[1:]:
            lines.append('')
            lines.append(f"[{section}]")
            for key, value in getattr(self, section).model_dump(mode='json').items():
                lines.append(f"{key} = {_format(value)}")
        return '\n'.join(lines) + '\n'


def _format(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ', '.join(_format(float(v)) for v in value)
    return str(value)


def parse_config_text(text: str) -> Tuple[Dict, LineMap]:
    """Split config text into nested raw values plus the line of every key"""
    data: Dict = {}
    lines: LineMap = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(('#', ';')):
            continue
        if line.startswith('['):
            if not line.endswith(']'):
                raise ConfigError(f"line {number}: malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"line {number}: unknown section [{section}]")
            lines[(section, None)] = number
            continue
        if '=' not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"line {number}: key outside any [section]")
        key, value = (part.strip() for part in line.split('=', 1))
        if (section, key) in lines:
            raise ConfigError(f"line {number}: duplicate key {section}.{key}")
        lines[(section, key)] = number
        target = data if section == 'scenario' else data.setdefault(section, {})
        target[key] = value
    return data, lines


def apply_overrides(data: Dict, overrides: Iterable[str]) -> Dict:
    """Apply `section.key=value` overrides (CLI flags win over the file)"""
    for item in overrides:
        if '=' not in item or '.' not in item.split('=', 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        path, value = item.split('=', 1)
        section, key = (part.strip() for part in path.split('.', 1))
        if section not in SECTIONS:
            raise ConfigError(f"override {item!r} names unknown section [{section}]")
        target = data if section == 'scenario' else data.setdefault(section, {})
        target[key] = value.strip()
    return data


def _locate(loc: Tuple, lines: LineMap) -> str:
    if loc and loc[0] in SECTIONS[1:]:
        section, key = loc[0], (loc[1] if len(loc) > 1 else None)
    else:
        section, key = 'scenario', (loc[0] if loc else None)
    number = lines.get((section, key)) or lines.get((section, None))
    where = f"{section}.{key}" if key is not None else f"[{section}]"
    return f"line {number}: {where}" if number else where


def _cross_check(cfg: ScenarioConfig) -> List[Tuple[Tuple, str]]:
    problems = []
    grid = cfg.grid_spec()
    if not grid.x_min <= cfg.potential_center <= grid.x_max:
        problems.append((('potential_center',), 'potential center must lie inside the grid'))
    if cfg.branch in (Branch.PSI1, Branch.PSI2, Branch.PSI1_MINUS_PSI2):
        if cfg.omega0 == 0 and cfg.a0 == 0:
            problems.append((('a0',), 'the omega0 = 0 Airy limit needs a0 != 0'))
    if cfg.mode is Mode.EVOLVE and not cfg.trunc_eps > 0 and cfg.branch is not Branch.GAUSSIAN \
            and cfg.branch is not Branch.AIRY:
        problems.append((('trunc_eps',), 'evolving an exact wave needs a positive truncation'))
    if cfg.mode is Mode.EVOLVE:
        # deferred import keeps the models importable without the numerical services
        from services.propagator import check_stability
        try:
            check_stability(grid, cfg.potential(), cfg.step_plan())
        except SimulationError as e:
            problems.append((('plan', 'dt'), str(e)))
    return problems


def load_config(text: str, overrides: Iterable[str] = ()) -> ScenarioConfig:
    data, lines = parse_config_text(text)
    apply_overrides(data, overrides)
    try:
        cfg = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        messages = [f"{_locate(tuple(err['loc']), lines)}: {err['msg']}" for err in e.errors()]
        raise ConfigError('\n'.join(messages)) from e
    except SimulationError as e:
        raise ConfigError(str(e)) from e
    problems = _cross_check(cfg)
    if problems:
        raise ConfigError('\n'.join(f"{_locate(loc, lines)}: {msg}" for loc, msg in problems))
    return cfg


def _steps(t_final: float, dt: float) -> int:
    return int(math.ceil(t_final / dt - 1e-9))


def builtin_config(name: str) -> ScenarioConfig:
    """Figure configurations; time extents and windows are visual-match choices"""
    dt = 2.5e-4
    free_plan = PlanSettings(dt=dt, n_steps=_steps(4.0, dt))
    wide = GridSettings(x_min=-40.0, x_max=60.0, n=4096)
    profile = GridSettings(x_min=-20.0, x_max=20.0, n=4096)
    fig3_grid = GridSettings(x_min=-20.0, x_max=44.0, n=2048)
    fig3_plan = PlanSettings(dt=dt, n_steps=_steps(1.5, dt))
    # a0 > 0 so the self-acceleration opposes the push of the inverted potential
    fig3 = dict(a0=5.0, omega0=0.6, E=0.0, trunc_eps=0.1, trunc_center=17.0, wave_shift=17.0,
                potential_center=12.0, grid=fig3_grid, plan=fig3_plan)
    configs = {
        'fig1a': dict(mode=Mode.PROFILE, branch=Branch.PSI1, a0=1.0, omega0=1.0, E=0.0, grid=profile),
        'fig1b': dict(mode=Mode.PROFILE, branch=Branch.PSI2, a0=1.0, omega0=1.0, E=0.0, grid=profile),
        'fig1c': dict(mode=Mode.PROFILE, branch=Branch.PSI1, a0=1.0, omega0=1.0, E=5.0, grid=profile),
        'fig2a': dict(branch=Branch.PSI1_MINUS_PSI2, a0=1.0, omega0=1.0, trunc_eps=1 / 20, grid=wide,
                      plan=PlanSettings(dt=dt, n_steps=_steps(6.0, dt))),
        'fig2b': dict(branch=Branch.PSI2, a0=1.0, omega0=0.2, trunc_eps=1 / 100, grid=wide, plan=free_plan),
        'fig2c': dict(branch=Branch.AIRY, track_envelope=False, grid=wide, plan=free_plan),
        'fig3a': dict(branch=Branch.PSI2, law=LawSettings(kind=LawKind.CONSTANT, omega_sq=0.7), **fig3),
        'fig3b': dict(branch=Branch.PSI2, law=LawSettings(kind=LawKind.CONSTANT, omega_sq=0.1), **fig3),
        'fig3c': dict(branch=Branch.GAUSSIAN, track_envelope=False, gaussian_center=17.0, gaussian_width=10.0,
                      law=LawSettings(kind=LawKind.CONSTANT, omega_sq=0.7), potential_center=12.0,
                      grid=fig3_grid, plan=fig3_plan),
    }
    if name not in configs:
        raise ConfigError(f"unknown figure {name!r}; choose from {', '.join(configs)}")
    return ScenarioConfig(name=name, **configs[name])


FIGURES = ('fig1a', 'fig1b', 'fig1c', 'fig2a', 'fig2b', 'fig2c', 'fig3a', 'fig3b', 'fig3c')
