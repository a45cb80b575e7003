"""
Run configuration: TOML files parsed into a dataclass tree.

Every validation message carries the dotted key and, when the key appears
in the file, its source line, e.g.::

    runs/notch.toml:14: discretization.adaptive_grid[0]: 0.05 outside [a, 1 - a] = [0.1, 0.9]

Keys inherited from a preset are reported with the preset name instead.
"""

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from infrastructure.utilities.error_handling import SimulationError
from infrastructure.utilities.logger import get_logger

from config import ConfigValidationResult, ConfigValidator, get_output_config, get_solver_config

from ..crack.initial import approximate_initial_crack
from ..evolution.driver import EvolutionSetup
from ..evolution.time_grid import TimeGrid
from ..fespace.boundary import BoundaryDeformation
from ..mesh.domain import BoundaryLabel, DomainSpec, make_domain
from ..mesh.triangulation import build_structured_mesh
from ..model.densities import BodyPotential, BulkDensity, SurfaceDensity, SurfacePotential
from ..model.energies import EnergyModel, coercivity_constants
from ..model.expressions import FormulaError, VectorExpression
from ..solver.problem import ADAPTIVE_MODES, BANDS, MODES, ORDERS, RANKINGS, SolverSettings
from .presets import PRESETS, deep_merge, get_preset

logger = get_logger(__name__)

LABELS = ("dirichlet", "neumann", "traction")
BULK_VARIANTS = ("quadratic", "p_norm")
SURFACE_VARIANTS = ("isotropic", "anisotropic_ellipse")
QUADRATURE_POINTS = (1, 3, 7)

SCHEMA = {
    "": {"preset", "seed", "domain", "model", "discretization", "solver", "output", "study"},
    "domain": {"polygon", "brittle", "boundary", "collar", "initial_crack"},
    "model": {"bulk", "mu", "p", "confinement", "q", "force", "traction", "trace_exponent", "surface",
              "toughness", "matrix", "allow_degenerate", "quadrature_points", "boundary_deformation"},
    "discretization": {"eps", "a", "delta", "steps", "horizon", "adaptive_grid"},
    "solver": {"mode", "enumeration_cap", "max_candidates", "adaptive_band", "adaptive_mode",
               "newton_tolerance", "newton_max_iterations", "dense_threshold", "heuristic_rank",
               "threads", "enumeration_order", "audit_competitors"},
    "output": {"directory", "write_vtk", "write_json"},
    "study": {"sequence", "sample_times", "max_workers", "compare_gradients"},
}

_TABLE = re.compile(r"^\s*(\[\[?)\s*([A-Za-z0-9_.\-]+)\s*\]\]?\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\s*=")
_INDEX = re.compile(r"\[\d+\]$")
_COORDINATE = re.compile(r"^((?:polygon|brittle|boundary)\[\d+\])")


class ConfigError(SimulationError):
    """The run configuration cannot be parsed or fails validation."""

    def __init__(self, message: str, result: Optional[ConfigValidationResult] = None):
        super().__init__(message)
        self.result = result or ConfigValidationResult(False, [message])


def key_lines(text: str) -> Dict[str, int]:
    """Dotted key -> 1-based line for every table header and key assignment."""
    lines: Dict[str, int] = {}
    prefix = ""
    counts: Dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        table = _TABLE.match(line)
        if table:
            name = table.group(2)
            if table.group(1) == "[[":
                index = counts.get(name, 0)
                counts[name] = index + 1
                prefix = f"{name}[{index}]"
                lines.setdefault(name, number)
            else:
                prefix = name
            lines.setdefault(prefix, number)
            continue
        key = _KEY.match(line)
        if key:
            dotted = f"{prefix}.{key.group(1)}" if prefix else key.group(1)
            lines.setdefault(dotted, number)
    return lines


@dataclass
class Anchor:
    """Formats messages with the source location of a dotted key."""
    source: str = "<config>"
    lines: Dict[str, int] = field(default_factory=dict)
    preset: Optional[str] = None

    def line_of(self, key: str) -> Optional[int]:
        while key:
            if key in self.lines:
                return self.lines[key]
            if _INDEX.search(key):
                key = _INDEX.sub("", key)
            else:
                key = key.rpartition(".")[0]
        return None

    def __call__(self, key: str, message: str) -> str:
        line = self.line_of(key)
        if line is not None:
            return f"{self.source}:{line}: {key}: {message}"
        if self.preset:
            return f"{self.source}: {key} (preset {self.preset}): {message}"
        return f"{self.source}: {key}: {message}"


@dataclass(frozen=True)
class DomainBlock:
    polygon: Tuple[Tuple[float, float], ...]
    brittle: Tuple[Tuple[float, float, float, float], ...] = ()
    boundary: Tuple[Tuple[Tuple[float, float], Tuple[float, float], str], ...] = ()
    collar: bool = False
    initial_crack: Tuple[Tuple[Tuple[float, float], ...], ...] = ()

    def build(self) -> DomainSpec:
        return make_domain(self.polygon, self.brittle, self.boundary, self.collar)


@dataclass(frozen=True)
class ModelBlock:
    bulk: str = "quadratic"
    mu: float = 1.0
    p: float = 2.0
    confinement: float = 0.0
    q: float = 2.0
    force: Tuple[str, str] = ("0", "0")
    traction: Tuple[str, str] = ("0", "0")
    trace_exponent: Optional[float] = None
    surface: str = "isotropic"
    toughness: float = 1.0
    matrix: Tuple[Tuple[float, float], Tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))
    allow_degenerate: bool = False
    quadrature_points: int = 3
    boundary_deformation: Tuple[str, str] = ("0", "0")

    def build(self) -> EnergyModel:
        return EnergyModel(
            bulk=BulkDensity(self.bulk, self.mu, self.p),
            body=BodyPotential(self.confinement, self.q, VectorExpression(self.force)),
            surface_potential=SurfacePotential(VectorExpression(self.traction), self.trace_exponent),
            surface_density=SurfaceDensity(self.surface, self.toughness, self.matrix),
            quadrature_points=self.quadrature_points,
            allow_degenerate=self.allow_degenerate,
        )

    def build_boundary(self) -> BoundaryDeformation:
        return BoundaryDeformation.from_formulas(self.boundary_deformation)


@dataclass(frozen=True)
class DiscretizationBlock:
    eps: float
    a: float
    horizon: float = 1.0
    delta: Optional[float] = None
    steps: Optional[int] = None
    adaptive_grid: Optional[Tuple[float, ...]] = None

    def time_grid(self) -> TimeGrid:
        if self.delta is not None:
            return TimeGrid(self.delta, self.horizon)
        return TimeGrid.from_steps(self.steps or 1, self.horizon)


@dataclass(frozen=True)
class SolverBlock:
    mode: str = "oracle"
    enumeration_cap: int = 20
    max_candidates: int = 64
    adaptive_band: str = "brittle"
    adaptive_mode: str = "uniform"
    newton_tolerance: float = 1e-10
    newton_max_iterations: int = 200
    dense_threshold: int = 400
    heuristic_rank: str = "full"
    threads: int = 1
    enumeration_order: str = "forward"
    audit_competitors: int = 200


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "runs/latest"
    write_vtk: bool = True
    write_json: bool = True


@dataclass(frozen=True)
class StudyBlock:
    sequence: Tuple[Tuple[float, float, float], ...] = ()
    sample_times: Optional[int] = None
    max_workers: Optional[int] = None
    compare_gradients: bool = True


@dataclass(frozen=True)
class RunConfig:
    domain: DomainBlock
    model: ModelBlock
    discretization: DiscretizationBlock
    solver: SolverBlock = field(default_factory=SolverBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    study: StudyBlock = field(default_factory=StudyBlock)
    preset: Optional[str] = None
    seed: int = 0
    source: str = "<config>"
    out_override: Optional[str] = None
    anchor: Anchor = field(default_factory=Anchor, compare=False, repr=False)

    def with_overrides(self, threads: Optional[int] = None, seed: Optional[int] = None,
                       solver: Optional[str] = None, out: Optional[Union[str, Path]] = None) -> "RunConfig":
        """Command-line flags take precedence over the file."""
        config = self
        if threads is not None:
            config = replace(config, solver=replace(config.solver, threads=int(threads)))
        if solver is not None:
            config = replace(config, solver=replace(config.solver, mode=solver))
        if seed is not None:
            config = replace(config, seed=int(seed))
        if out is not None:
            config = replace(config, out_override=str(out))
        return config

    def with_discretization(self, eps: float, a: float, delta: float) -> "RunConfig":
        grid = self.discretization.adaptive_grid
        if grid is not None:
            grid = tuple(min(max(v, a), 1.0 - a) for v in grid)
        block = replace(self.discretization, eps=float(eps), a=float(a), delta=float(delta), steps=None,
                        adaptive_grid=grid)
        return replace(self, discretization=block)

    def solver_settings(self) -> SolverSettings:
        s = self.solver
        return SolverSettings(
            mode=s.mode,
            adaptive_grid=self.discretization.adaptive_grid,
            adaptive_band=s.adaptive_band,
            adaptive_mode=s.adaptive_mode,
            max_candidates=s.max_candidates,
            enumeration_cap=s.enumeration_cap,
            newton_tol=s.newton_tolerance,
            newton_max_iter=s.newton_max_iterations,
            dense_threshold=s.dense_threshold,
            heuristic_rank=s.heuristic_rank,
            threads=s.threads,
            enumeration_order=s.enumeration_order,
            audit_competitors=s.audit_competitors,
        )

    def output_directory(self) -> Path:
        """--out, then FRACTURE_OUTPUT_DIR, then output.directory."""
        if self.out_override:
            return Path(self.out_override)
        defaults = get_output_config()
        if defaults["directory_overridden"]:
            return Path(defaults["directory"])
        return Path(self.output.directory)

    def to_setup(self, mesh=None) -> EvolutionSetup:
        """Build mesh, model, boundary deformation and time grid."""
        mesh = mesh or build_structured_mesh(self.domain.build(), self.discretization.eps)
        return EvolutionSetup(
            mesh=mesh,
            model=self.model.build(),
            boundary=self.model.build_boundary(),
            grid=self.discretization.time_grid(),
            a=self.discretization.a,
            initial_crack=[list(line) for line in self.domain.initial_crack],
            settings=self.solver_settings(),
        )


class _Reader:
    """Typed access to a raw mapping that records issues instead of raising."""

    def __init__(self, raw: Mapping[str, Any], anchor: Anchor, result: ConfigValidationResult):
        self.raw = raw
        self.anchor = anchor
        self.result = result
        self.validator = ConfigValidator()

    def issue(self, key: str, message: str) -> None:
        self.result.add_issue(self.anchor(key, message))

    def table(self, name: str) -> Mapping[str, Any]:
        value = self.raw.get(name, {})
        if not isinstance(value, Mapping):
            self.issue(name, f"must be a table, got {type(value).__name__}")
            return {}
        for key in value:
            if key not in SCHEMA[name]:
                self.result.add_warning(self.anchor(f"{name}.{key}", "unknown key ignored"))
        return value

    def number(self, table: Mapping[str, Any], prefix: str, key: str, default: Any,
               low: float = -math.inf, high: float = math.inf, open_low: bool = False,
               open_high: bool = False, integer: bool = False) -> Any:
        value = table.get(key, default)
        if value is None:
            return None
        name = f"{prefix}.{key}" if prefix else key
        if integer and (isinstance(value, bool) or not isinstance(value, int)):
            self.issue(name, f"must be an integer, got {value!r}")
            return default
        error = self.validator.validate_numeric_range(value, low, high, "value", open_low, open_high)
        if error:
            self.issue(name, error.replace("value ", "", 1))
            return default
        return int(value) if integer else float(value)

    def choice(self, table: Mapping[str, Any], prefix: str, key: str, default: str,
               choices: Sequence[str]) -> str:
        value = table.get(key, default)
        error = self.validator.validate_choice(value, list(choices), "value")
        if error:
            self.issue(f"{prefix}.{key}", error.replace("value ", "", 1))
            return default
        return value

    def flag(self, table: Mapping[str, Any], prefix: str, key: str, default: bool) -> bool:
        value = table.get(key, default)
        if not isinstance(value, bool):
            self.issue(f"{prefix}.{key}", f"must be true or false, got {value!r}")
            return default
        return value

    def point(self, value: Any, key: str) -> Optional[Tuple[float, float]]:
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
            self.issue(key, f"must be a pair of numbers, got {value!r}")
            return None
        return float(value[0]), float(value[1])

    def formulas(self, table: Mapping[str, Any], prefix: str, key: str) -> Tuple[str, str]:
        value = table.get(key, ["0", "0"])
        name = f"{prefix}.{key}"
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            self.issue(name, f"must be two formulas [x-component, y-component], got {value!r}")
            return ("0", "0")
        components = tuple(str(v) if not isinstance(v, str) else v for v in value)
        try:
            VectorExpression(components)
        except FormulaError as exc:
            self.issue(name, str(exc))
            return ("0", "0")
        return components


def _domain_block(reader: _Reader) -> Optional[DomainBlock]:
    table = reader.table("domain")
    polygon = table.get("polygon")
    if not isinstance(polygon, list) or len(polygon) < 4:
        reader.issue("domain.polygon", "must list at least 4 vertices [x, y]")
        return None
    points = [reader.point(p, f"domain.polygon[{i}]") for i, p in enumerate(polygon)]

    brittle = []
    for i, rect in enumerate(table.get("brittle", [])):
        if (not isinstance(rect, list) or len(rect) != 4
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in rect)):
            reader.issue(f"domain.brittle[{i}]", f"must be [x0, y0, x1, y1], got {rect!r}")
            continue
        if not (rect[2] > rect[0] and rect[3] > rect[1]):
            reader.issue(f"domain.brittle[{i}]", "needs x1 > x0 and y1 > y0")
            continue
        brittle.append(tuple(float(v) for v in rect))

    boundary = []
    for i, seg in enumerate(table.get("boundary", [])):
        key = f"domain.boundary[{i}]"
        if not isinstance(seg, Mapping):
            reader.issue(key, "must be a table with start, end and label")
            continue
        start = reader.point(seg.get("start"), f"{key}.start")
        end = reader.point(seg.get("end"), f"{key}.end")
        label = reader.choice(seg, key, "label", "", LABELS)
        if start and end and label:
            boundary.append((start, end, label))

    cracks = []
    for i, line in enumerate(table.get("initial_crack", [])):
        key = f"domain.initial_crack[{i}]"
        if not isinstance(line, list) or len(line) < 2:
            reader.issue(key, "a crack polyline needs at least two points")
            continue
        pts = [reader.point(p, f"{key}[{j}]") for j, p in enumerate(line)]
        if all(pts):
            cracks.append(tuple(pts))

    if not all(points):
        return None
    return DomainBlock(tuple(points), tuple(brittle), tuple(boundary),
                       reader.flag(table, "domain", "collar", False), tuple(cracks))


def _model_block(reader: _Reader) -> ModelBlock:
    t = reader.table("model")
    d = ModelBlock()
    matrix = t.get("matrix", [list(r) for r in d.matrix])
    if (not isinstance(matrix, list) or len(matrix) != 2
            or not all(isinstance(r, list) and len(r) == 2 for r in matrix)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for r in matrix for v in r)):
        reader.issue("model.matrix", f"must be a 2x2 array, got {matrix!r}")
        matrix = d.matrix
    else:
        matrix = tuple(tuple(float(v) for v in r) for r in matrix)
    quadrature = reader.number(t, "model", "quadrature_points", d.quadrature_points, integer=True)
    if quadrature not in QUADRATURE_POINTS:
        reader.issue("model.quadrature_points", f"must be one of 1, 3, 7, got {quadrature}")
        quadrature = d.quadrature_points
    return ModelBlock(
        bulk=reader.choice(t, "model", "bulk", d.bulk, BULK_VARIANTS),
        mu=reader.number(t, "model", "mu", d.mu, 0.0, open_low=True),
        p=reader.number(t, "model", "p", d.p, 1.0, open_low=True),
        confinement=reader.number(t, "model", "confinement", d.confinement, 0.0),
        q=reader.number(t, "model", "q", d.q, 1.0, open_low=True),
        force=reader.formulas(t, "model", "force"),
        traction=reader.formulas(t, "model", "traction"),
        trace_exponent=reader.number(t, "model", "trace_exponent", None, 1.0),
        surface=reader.choice(t, "model", "surface", d.surface, SURFACE_VARIANTS),
        toughness=reader.number(t, "model", "toughness", d.toughness, 0.0, open_low=True),
        matrix=matrix,
        allow_degenerate=reader.flag(t, "model", "allow_degenerate", d.allow_degenerate),
        quadrature_points=quadrature,
        boundary_deformation=reader.formulas(t, "model", "boundary_deformation"),
    )


def _discretization_block(reader: _Reader) -> Optional[DiscretizationBlock]:
    t = reader.table("discretization")
    for key in ("eps", "a"):
        if key not in t:
            reader.issue(f"discretization.{key}", "is required")
    eps = reader.number(t, "discretization", "eps", None, 0.0, open_low=True)
    a = reader.number(t, "discretization", "a", None, 0.0, 0.5, open_low=True, open_high=True)
    horizon = reader.number(t, "discretization", "horizon", 1.0, 0.0, open_low=True)
    delta = reader.number(t, "discretization", "delta", None, 0.0, open_low=True)
    steps = reader.number(t, "discretization", "steps", None, 1.0, integer=True)
    if delta is not None and steps is not None:
        reader.issue("discretization.delta", "give either delta or steps, not both")
    if delta is None and steps is None:
        steps = 1
        reader.result.add_warning(reader.anchor("discretization", "neither delta nor steps given; one step"))

    grid = t.get("adaptive_grid")
    if grid is not None:
        if not isinstance(grid, list) or not grid:
            reader.issue("discretization.adaptive_grid", "must be a non-empty list of knot parameters")
            grid = None
        elif a is not None:
            for i, value in enumerate(grid):
                key = f"discretization.adaptive_grid[{i}]"
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    reader.issue(key, f"must be a number, got {value!r}")
                elif not (a - 1e-14 <= value <= 1.0 - a + 1e-14):
                    reader.issue(key, f"{value} outside [a, 1 - a] = [{a:g}, {1.0 - a:g}]")
            grid = tuple(float(v) for v in grid)
    if eps is None or a is None:
        return None
    return DiscretizationBlock(eps, a, horizon, delta, steps, grid)


def _solver_block(reader: _Reader) -> SolverBlock:
    t = reader.table("solver")
    d = get_solver_config()
    return SolverBlock(
        mode=reader.choice(t, "solver", "mode", d["mode"], MODES),
        enumeration_cap=reader.number(t, "solver", "enumeration_cap", d["enumeration_cap"], 0, 30, integer=True),
        max_candidates=reader.number(t, "solver", "max_candidates", d["max_candidates"], 1, integer=True),
        adaptive_band=reader.choice(t, "solver", "adaptive_band", d["adaptive_band"], BANDS),
        adaptive_mode=reader.choice(t, "solver", "adaptive_mode", d["adaptive_mode"], ADAPTIVE_MODES),
        newton_tolerance=reader.number(t, "solver", "newton_tolerance", d["newton_tolerance"], 0.0, open_low=True),
        newton_max_iterations=reader.number(t, "solver", "newton_max_iterations", d["newton_max_iterations"], 1,
                                            integer=True),
        dense_threshold=reader.number(t, "solver", "dense_threshold", d["dense_threshold"], 0, integer=True),
        heuristic_rank=reader.choice(t, "solver", "heuristic_rank", d["heuristic_rank"], RANKINGS),
        threads=reader.number(t, "solver", "threads", d["threads"], 1, integer=True),
        enumeration_order=reader.choice(t, "solver", "enumeration_order", "forward", ORDERS),
        audit_competitors=reader.number(t, "solver", "audit_competitors", d["audit_competitors"], 0, integer=True),
    )


def _output_block(reader: _Reader) -> OutputBlock:
    t = reader.table("output")
    directory = t.get("directory", OutputBlock.directory)
    error = reader.validator.validate_string_not_empty(directory, "value")
    if error:
        reader.issue("output.directory", "must be a non-empty string")
        directory = OutputBlock.directory
    return OutputBlock(directory, reader.flag(t, "output", "write_vtk", True),
                       reader.flag(t, "output", "write_json", True))


def _study_block(reader: _Reader) -> StudyBlock:
    t = reader.table("study")
    sequence = []
    for i, triple in enumerate(t.get("sequence", [])):
        if (not isinstance(triple, list) or len(triple) != 3
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in triple)):
            reader.issue(f"study.sequence[{i}]", f"must be [eps, a, delta] with positive entries, got {triple!r}")
            continue
        if not triple[1] < 0.5:
            reader.issue(f"study.sequence[{i}]", f"a = {triple[1]} must be below 1/2")
            continue
        sequence.append(tuple(float(v) for v in triple))
    return StudyBlock(
        sequence=tuple(sequence),
        sample_times=reader.number(t, "study", "sample_times", None, 2, integer=True),
        max_workers=reader.number(t, "study", "max_workers", None, 1, integer=True),
        compare_gradients=reader.flag(t, "study", "compare_gradients", True),
    )


def parse_run_config(raw: Mapping[str, Any], source: str = "<config>",
                     lines: Optional[Dict[str, int]] = None) -> RunConfig:
    """Merge the named preset under ``raw`` and validate every block."""
    result = ConfigValidationResult()
    preset = raw.get("preset")
    anchor = Anchor(source, dict(lines or {}), preset if isinstance(preset, str) else None)
    for key in raw:
        if key not in SCHEMA[""]:
            result.add_warning(anchor(key, "unknown key ignored"))

    merged: Mapping[str, Any] = raw
    if preset is not None:
        if preset not in PRESETS:
            result.add_issue(anchor("preset", f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}"))
        else:
            merged = deep_merge(get_preset(preset), {k: v for k, v in raw.items() if k != "preset"})

    reader = _Reader(merged, anchor, result)
    domain = _domain_block(reader)
    model = _model_block(reader)
    discretization = _discretization_block(reader)
    solver = _solver_block(reader)
    output = _output_block(reader)
    study = _study_block(reader)
    seed = reader.number(merged, "", "seed", 0, 0, integer=True)

    if not result.valid or domain is None or discretization is None:
        raise ConfigError(f"{len(result.issues)} configuration issue(s) in {source}", result)
    for warning in result.warnings:
        logger.warning(warning)
    return RunConfig(domain, model, discretization, solver, output, study,
                     anchor.preset, seed if seed is not None else 0, source, anchor=anchor)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: file not found")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")
    return parse_run_config(raw, str(path), key_lines(text))


@dataclass
class ConfigCheck:
    """Outcome of the deep checks with the quantities derived along the way."""
    result: ConfigValidationResult
    derived: Dict[str, Any] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.result.valid


def _domain_key(config: RunConfig, exc: SimulationError) -> str:
    message = str(exc)
    named = _COORDINATE.match(message)
    if named:
        return f"domain.{named.group(1)}"
    if "TRACTION" in message:
        for i, (_, _, label) in enumerate(config.domain.boundary):
            if label == "traction":
                return f"domain.boundary[{i}]"
    if message.startswith("boundary["):
        return "domain." + message.split(" ", 1)[0]
    return "domain"


def check_run_config(config: RunConfig) -> ConfigCheck:
    """
    Domain conformity with eps, model construction and its coercivity
    constants, and the initial crack approximation.
    """
    anchor = config.anchor
    check = ConfigCheck(ConfigValidationResult())
    result = check.result
    disc = config.discretization

    try:
        domain = config.domain.build()
        mesh = build_structured_mesh(domain, disc.eps)
    except SimulationError as exc:
        result.add_issue(anchor(_domain_key(config, exc), str(exc)))
        return check
    check.derived.update({'vertices': mesh.n_vertices, 'triangles': mesh.n_triangles,
                          'crackable_edges': int(mesh.crackable_edge_mask.sum())})

    try:
        model = config.model.build()
    except SimulationError as exc:
        result.add_issue(anchor("model", str(exc)))
        return check
    try:
        constants = coercivity_constants(model, mesh, disc.horizon, disc.a)
    except SimulationError as exc:
        result.add_issue(anchor("model.confinement", str(exc)))
    else:
        k1, k2 = model.surface_density.bounds
        check.derived.update({'alpha0': constants.alpha0, 'beta0': constants.beta0,
                              'alpha1': constants.alpha1, 'beta1': constants.beta1,
                              'trace_constant': constants.trace_constant, 'K1': k1, 'K2': k2})
        if math.isinf(constants.beta0):
            result.add_warning(anchor("model.allow_degenerate",
                                      "degenerate confinement with loads: no a-priori bound is asserted"))

    if not model.surface_potential.traction.is_zero() and not (mesh.edge_labels == BoundaryLabel.TRACTION).any():
        result.add_warning(anchor("model.traction", "no TRACTION boundary edge carries the surface load"))
    try:
        config.model.build_boundary()
    except SimulationError as exc:
        result.add_issue(anchor("model.boundary_deformation", str(exc)))

    grid = disc.time_grid()
    check.derived.update({'steps': len(grid), 'delta': grid.delta})
    if config.domain.initial_crack:
        try:
            initial = approximate_initial_crack([list(p) for p in config.domain.initial_crack], mesh, disc.a)
        except SimulationError as exc:
            result.add_issue(anchor("domain.initial_crack", str(exc)))
        else:
            check.derived['initial_crack_length'] = initial.crack_set.total_length
    return check


def preset_config(name: str) -> RunConfig:
    return parse_run_config({"preset": name}, f"<preset {name}>")


__all__ = [
    'ConfigError',
    'Anchor',
    'DomainBlock',
    'ModelBlock',
    'DiscretizationBlock',
    'SolverBlock',
    'OutputBlock',
    'StudyBlock',
    'RunConfig',
    'ConfigCheck',
    'check_run_config',
    'key_lines',
    'parse_run_config',
    'load_run_config',
    'preset_config',
]
