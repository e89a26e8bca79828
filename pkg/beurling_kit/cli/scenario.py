"""
Scenario models
Pydantic validation of scenario files so every spec is checked before any run
"""

import json
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Type, Union, get_args

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

from ..errors import ConfigError
from ..services.bandlimited import BandlimitedFunction
from ..services.convex_geometry import body_from_dict
from ..services.sampling_sets import set_from_dict
from ..services.windows import Window

TOML_POSITION = re.compile(r"line (\d+), column (\d+)")


class BodySpec(BaseModel):
    """{"kind": ..., "dim": n, "params": {...}}"""

    model_config = ConfigDict(extra="forbid")

    kind: str
    dim: Optional[int] = None
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _parses(self) -> "BodySpec":
        body_from_dict(self.model_dump())
        return self


class SetSpec(BaseModel):
    """A sampling-set description; the generator fields depend on ``kind``"""

    model_config = ConfigDict(extra="allow")

    kind: str
    window_margin: float = 0.0

    @model_validator(mode="after")
    def _parses(self) -> "SetSpec":
        try:
            set_from_dict(self.model_dump())
        except KeyError as e:
            raise ValueError(f"Missing field {e.args[0]!r} for {self.kind} set")
        return self


class FunctionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    body: BodySpec
    terms: List[Dict[str, Any]]

    @model_validator(mode="after")
    def _parses(self) -> "FunctionSpec":
        try:
            BandlimitedFunction.from_dict(self.model_dump())
        except KeyError as e:
            raise ValueError(f"Missing field {e.args[0]!r} in a term")
        return self


Bounds = List[List[float]]
Positive = Optional[PositiveFloat]


class CheckBase(BaseModel):
    """Shared fields; each kind declares its own handler parameters"""

    model_config = ConfigDict(extra="forbid")

    seed: Optional[NonNegativeInt] = None

    def params(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"kind"}, exclude_none=True)


class WindowedCheck(CheckBase):
    window: Optional[Bounds] = None

    @field_validator("window")
    @classmethod
    def _window_bounds(cls, value: Optional[Bounds]) -> Optional[Bounds]:
        if value is not None:
            Window.from_list(value)
        return value


class InstanceCheck(WindowedCheck):
    """One body, set and function"""

    kind: Literal["theorem3", "theorem2_ball"]
    body: BodySpec
    set: SetSpec
    function: FunctionSpec
    grid_step: Positive = None
    probe_step: Positive = None


class Theorem3SuiteCheck(CheckBase):
    kind: Literal["theorem3_suite"]
    count: Optional[NonNegativeInt] = None
    dims: Optional[List[Literal[1, 2, 3]]] = Field(default=None, min_length=1)
    bodies: Optional[List[Literal["ball", "box", "polytope"]]] = Field(default=None, min_length=1)
    max_terms: Optional[PositiveInt] = None


class ConstantsCheck(CheckBase):
    kind: Literal["constants"]
    rhos: Optional[List[NonNegativeFloat]] = None


class GaugeAxiomsCheck(CheckBase):
    kind: Literal["gauge_axioms"]
    body: BodySpec
    pairs: Optional[PositiveInt] = None
    tolerance: Positive = None


class CoverCheck(WindowedCheck):
    kind: Literal["cover"]
    body: BodySpec
    set: SetSpec
    probe_steps: Optional[List[PositiveFloat]] = None
    probe_step: Positive = None
    expected: Optional[float] = None


class DensityCheck(WindowedCheck):
    kind: Literal["density"]
    set: SetSpec
    radii: List[PositiveFloat] = Field(min_length=1)
    center_samples: Optional[PositiveInt] = None
    sigma: Positive = None
    expected: Positive = None


class ExtremalCheck(CheckBase):
    kind: Literal["extremal"]
    spacing: PositiveFloat
    sigma: Positive = None
    window_length: Positive = None
    x_star: Optional[float] = None


class ExtremalSweepCheck(CheckBase):
    kind: Literal["extremal_sweep"]
    spacings: Optional[List[PositiveFloat]] = Field(default=None, min_length=1)
    sigma: Positive = None
    window_length: Positive = None


class LandauDemoCheck(CheckBase):
    kind: Literal["landau_demo"]
    a: PositiveFloat
    sigma: Positive = None
    half_widths: Optional[List[PositiveFloat]] = None


class ConstructionCheck(WindowedCheck):
    """Sharpness construction options"""

    body: BodySpec
    sheet_step: Positive = None
    probes: Optional[PositiveInt] = None


class CounterexampleCheck(ConstructionCheck):
    kind: Literal["counterexample"]
    direction: Optional[List[float]] = None


class ClassifyNetCheck(ConstructionCheck):
    kind: Literal["classify_net"]
    net_body: BodySpec


class Lemma1Check(CheckBase):
    kind: Literal["lemma1"]
    amplitudes: List[float] = Field(min_length=1)
    omegas: List[float] = Field(min_length=1)
    tau: Positive = None
    extended: Optional[bool] = None
    u_grid: Optional[List[float]] = None


class Lemma1SuiteCheck(CheckBase):
    kind: Literal["lemma1_suite"]
    count: Optional[NonNegativeInt] = None
    tau: Positive = None
    max_terms: Optional[PositiveInt] = None
    extended: Optional[bool] = None


class RoucheCheck(CheckBase):
    kind: Literal["rouche"]
    cos_coeffs: List[float]
    sin_coeffs: List[float]
    omegas: List[float]
    eps: Optional[float] = Field(default=None, gt=0, lt=1)
    N: Optional[PositiveInt] = None


class RoucheSuiteCheck(CheckBase):
    kind: Literal["rouche_suite"]
    count: Optional[NonNegativeInt] = None
    eps: Optional[float] = Field(default=None, gt=0, lt=1)
    N: Optional[PositiveInt] = None


CheckSpec = Annotated[
    Union[InstanceCheck, Theorem3SuiteCheck, ConstantsCheck, GaugeAxiomsCheck, CoverCheck, DensityCheck,
          ExtremalCheck, ExtremalSweepCheck, LandauDemoCheck, CounterexampleCheck, ClassifyNetCheck,
          Lemma1Check, Lemma1SuiteCheck, RoucheCheck, RoucheSuiteCheck],
    Field(discriminator="kind"),
]

CHECK_MODELS: Dict[str, Type[CheckBase]] = {
    kind: model
    for model in get_args(get_args(CheckSpec)[0])
    for kind in get_args(model.model_fields["kind"].annotation)
}


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: Optional[str] = None
    plot_data: bool = True


class Scenario(BaseModel):
    """A named list of checks plus shared defaults merged into the checks that take them"""

    model_config = ConfigDict(extra="forbid")

    name: str
    seed: Optional[int] = Field(default=None, ge=0)
    jobs: Optional[int] = Field(default=None, ge=1)
    cap_points: Optional[int] = Field(default=None, ge=1)
    defaults: Dict[str, Any] = Field(default_factory=dict)
    output: OutputSpec = Field(default_factory=OutputSpec)
    checks: List[CheckSpec] = Field(min_length=1)

    @model_validator(mode="before")
    @classmethod
    def _merge_defaults(cls, data: Any) -> Any:
        if not (isinstance(data, dict) and isinstance(data.get("checks"), list)):
            return data
        shared = data.get("defaults") or {}
        if not isinstance(shared, dict):
            return data
        models = [_model_for(check) for check in data["checks"]]
        used = set()
        merged = []
        for check, model in zip(data["checks"], models):
            if model is None:
                merged.append(check)
                continue
            # a default only reaches the kinds that declare it
            own = {key: value for key, value in shared.items() if key in model.model_fields}
            used.update(own)
            merged.append({**own, **check})
        unused = sorted(set(shared) - used)
        if unused and all(model is not None for model in models):
            raise ValueError(f"Default(s) {', '.join(unused)} match no check parameter")
        return {**data, "checks": merged}


def _model_for(check: Any) -> Optional[Type[CheckBase]]:
    kind = check.get("kind") if isinstance(check, dict) else None
    return CHECK_MODELS.get(kind) if isinstance(kind, str) else None


def _decode(text: str, path: Path) -> Dict[str, Any]:
    if path.suffix.lower() == ".json":
        return _decode_json(text)
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        if path.suffix.lower() != ".toml":
            try:
                return _decode_json(text)
            except ConfigError:
                pass
        match = TOML_POSITION.search(str(e))
        line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
        raise ConfigError(f"TOML parse error: {e}", line=line, column=column)


def _decode_json(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON parse error: {e.msg}", line=e.lineno, column=e.colno)
    if not isinstance(data, dict):
        raise ConfigError("Scenario must be a JSON object")
    return data


def _field_path(error: Dict[str, Any]) -> str:
    """Dotted location with the union tag dropped, e.g. ``checks.0.a``"""
    loc = list(error["loc"])
    if len(loc) > 2 and loc[0] == "checks" and loc[2] in CHECK_MODELS:
        del loc[2]
    if error["type"] in ("union_tag_invalid", "union_tag_not_found"):
        loc.append("kind")
    return ".".join(str(part) for part in loc)


def validate_scenario(data: Dict[str, Any]) -> Scenario:
    """Validate a decoded scenario, reporting the first error with its field path"""
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], field=_field_path(first) or None)


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read scenario file {path}: {e.strerror}")
    return validate_scenario(_decode(text, path))


def bundled_scenario_dir() -> Path:
    return Path(__file__).resolve().parent.parent.parent / "config" / "scenarios"
