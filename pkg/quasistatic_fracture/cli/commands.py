"""
Subcommand implementations. Each returns a process exit code and prints a
short plain-text report; artifacts go to the run directory.
"""

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import pandas as pd

from infrastructure.monitoring.performance_monitor import MetricsCollector
from infrastructure.utilities.logger import app_logger, get_logger
from infrastructure.utilities.structured_logger import CorrelationContext, get_structured_logger

from config import get_output_config

from ..crack.initial import fitted_constant, initial_crack_study, interpolation_error_table
from ..evolution.checks import (
    AprioriReport,
    InequalityReport,
    check_apriori_bound,
    check_energy_inequality,
    check_g_competitor,
    check_irreversibility,
)
from ..evolution.driver import Evolution, EvolutionAborted, run_evolution
from ..evolution.ledger import EvolutionLedger
from ..evolution.study import refinement_study
from ..exporters.json_writer import write_crack_json, write_field_json, write_mesh_json, write_summary
from ..exporters.tables import read_ledger, write_ledger, write_table
from ..exporters.vtk_writer import write_field_vtk, write_mesh_vtk
from ..mesh.triangulation import build_structured_mesh
from ..model.energies import body_work, bulk_energy, coercivity_constants, surface_work
from ..solver.audit import AuditReport, CompetitorSampler, minimality_audit
from ..solver.problem import StepProblem, StepSolution
from .run_config import ConfigCheck, ConfigError, RunConfig, check_run_config, load_run_config

logger = get_logger(__name__)
structured_logger = get_structured_logger("cli")

GAP_TOL = 1e-6
REPARSE_TOL = 1e-12
CHORD_ANGLES = (0.0, 17.0, 30.0, 45.0)
CHORD_EPS = (1.0 / 64.0,)
CHORD_A = (0.4, 0.2, 0.1, 0.05)
SUMMARY_COLUMNS = ['step', 't', 'bulk', 'surface', 'total', 'crack_length', 'e_cumulative']


def _print_issues(error: ConfigError, stream: TextIO) -> None:
    for issue in error.result.issues:
        print(f"  error: {issue}", file=stream)
    for warning in error.result.warnings:
        print(f"  warning: {warning}", file=stream)


def _load(config_path: Union[str, Path], stream: TextIO) -> Optional[RunConfig]:
    try:
        return load_run_config(config_path)
    except ConfigError as exc:
        print(f"{exc}", file=stream)
        _print_issues(exc, stream)
        return None


def _checked(config: RunConfig, stream: TextIO) -> ConfigCheck:
    check = check_run_config(config)
    for issue in check.result.issues:
        print(f"  error: {issue}", file=stream)
    for warning in check.result.warnings:
        print(f"  warning: {warning}", file=stream)
    return check


def cmd_validate(config_path: Union[str, Path], stream: Optional[TextIO] = None) -> int:
    """Schema, domain conformity and model-constant checks; 0 when the config is usable."""
    stream = stream or sys.stdout
    config = _load(config_path, stream)
    if config is None:
        return 1
    check = _checked(config, stream)
    if not check.valid:
        print(f"{config.source}: {len(check.result.issues)} issue(s)", file=stream)
        return 1
    print(f"{config.source}: OK" + (f" (preset {config.preset})" if config.preset else ""), file=stream)
    for key, value in check.derived.items():
        print(f"  {key:<22} {value:.6g}" if isinstance(value, float) else f"  {key:<22} {value}", file=stream)
    return 0


@dataclass
class RunReport:
    """Everything cmd_run checked, written to summary.json."""
    directory: Path
    evolution: Evolution
    ledger: EvolutionLedger
    irreversible: bool = True
    inequality: Optional[InequalityReport] = None
    apriori: Optional[AprioriReport] = None
    g_competitor: bool = True
    reparse_error: float = 0.0
    audits: List[AuditReport] = field(default_factory=list)
    aborted: Optional[str] = None
    artifacts: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.aborted is None and self.irreversible and self.g_competitor
                and (self.inequality is None or self.inequality.passed)
                and (self.apriori is None or self.apriori.passed)
                and self.reparse_error <= REPARSE_TOL
                and all(a.passed for a in self.audits))

    def checks(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            'irreversibility': self.irreversible,
            'g_competitor_bound': self.g_competitor,
            'reparse_error': self.reparse_error,
            'passed': self.passed,
        }
        if self.inequality is not None:
            payload['energy_inequality'] = {
                'passed': self.inequality.passed, 'pairs': self.inequality.n_pairs,
                'worst_margin': self.inequality.worst_margin, 'worst_pair': self.inequality.worst_pair,
                'failures': len(self.inequality.failures),
            }
        if self.apriori is not None:
            payload['apriori_bound'] = {
                'asserted': self.apriori.asserted, 'passed': self.apriori.passed,
                'norm_bound': self.apriori.norm_bound,
                'final_length_bound': self.apriori.length_bounds[-1] if self.apriori.length_bounds else None,
            }
        if self.audits:
            payload['minimality_audit'] = {
                'competitors': sum(a.n_competitors for a in self.audits),
                'violations': sum(a.violations for a in self.audits),
                'worst_violation': max(a.worst_violation for a in self.audits),
            }
        return payload


def write_run_artifacts(directory: Path, evolution: Evolution, ledger: EvolutionLedger,
                        config: RunConfig) -> List[Path]:
    """ledger.csv, the base mesh, and crack and field files per completed step."""
    model = evolution.setup.model
    mesh = evolution.setup.mesh
    paths = [write_ledger(ledger, directory / "ledger.csv")]
    if config.output.write_json:
        paths.append(write_mesh_json(directory / "mesh.json", mesh))
    if config.output.write_vtk:
        paths.append(write_mesh_vtk(directory / "mesh.vtk", mesh))
    for i, (solution, crack) in enumerate(zip(evolution.solutions, evolution.cracks)):
        t = float(evolution.grid.knots[i])
        if config.output.write_json:
            paths.append(write_crack_json(directory / f"crack_step_{i}.json", i, t, crack,
                                          model.surface_density))
            paths.append(write_field_json(directory / f"field_step_{i}.json", solution.field, i, t))
        if config.output.write_vtk:
            paths.append(write_field_vtk(directory / f"field_step_{i}.vtk", solution.field, model,
                                         title=f"step {i} t={t:.17g}"))
    return paths


def reparse_error(path: Path, evolution: Evolution) -> float:
    """Largest relative mismatch between the written ledger and energies recomputed from the fields."""
    model = evolution.setup.model
    worst = 0.0
    for row, solution, crack in zip(read_ledger(path), evolution.solutions, evolution.cracks):
        u = solution.field
        recomputed = {
            'bulk': bulk_energy(u, model),
            'body': body_work(row.t, u, model),
            'traction': surface_work(row.t, u, model),
            'surface': crack.surface_energy(model.surface_density),
        }
        recomputed['total'] = (recomputed['bulk'] - recomputed['body'] - recomputed['traction']
                               + recomputed['surface'])
        for name, value in recomputed.items():
            stored = getattr(row, name)
            worst = max(worst, abs(stored - value) / max(1.0, abs(value)))
    return worst


def _auditor(config: RunConfig, audits: List[AuditReport]):
    def audit(problem: StepProblem, solution: StepSolution) -> None:
        sampler = CompetitorSampler(problem, seed=config.seed + problem.index)
        audits.append(minimality_audit(solution, problem, sampler, config.solver.audit_competitors))
    return audit


def run_checked(config: RunConfig, audit: bool = False, progress: bool = False,
                metrics: Optional[MetricsCollector] = None) -> RunReport:
    """Run the evolution, write artifacts and run every post-run check."""
    metrics = metrics or MetricsCollector()
    directory = config.output_directory()
    directory.mkdir(parents=True, exist_ok=True)
    setup = config.to_setup()
    audits: List[AuditReport] = []
    aborted = None
    try:
        evolution, ledger = run_evolution(setup, metrics, progress=progress,
                                          on_step=_auditor(config, audits) if audit else None)
    except EvolutionAborted as exc:
        evolution, ledger = exc.partial
        aborted = str(exc)

    report = RunReport(directory, evolution, ledger, aborted=aborted, audits=audits)
    report.artifacts = write_run_artifacts(directory, evolution, ledger, config)
    report.irreversible = check_irreversibility(evolution)
    if len(ledger):
        report.inequality = check_energy_inequality(ledger)
        report.g_competitor = check_g_competitor(ledger)
        report.reparse_error = reparse_error(directory / "ledger.csv", evolution)
        constants = coercivity_constants(setup.model, setup.mesh, setup.grid.horizon, setup.a)
        report.apriori = check_apriori_bound(ledger, constants, setup.model.surface_density,
                                             evolution.initial.crack_set.surface_energy(
                                                 setup.model.surface_density))

    summary = {
        'config': config.source,
        'preset': config.preset,
        'seed': config.seed,
        'solver': config.solver.mode,
        'threads': config.solver.threads,
        'steps': len(setup.grid),
        'completed': evolution.n_completed,
        'aborted': aborted,
        'checks': report.checks(),
        'step_diagnostics': [s.diagnostics for s in evolution.solutions],
        'metrics': metrics.summary(),
    }
    report.artifacts.append(write_summary(directory / "summary.json", summary))
    return report


def _print_run(report: RunReport, stream: TextIO) -> None:
    frame = report.ledger.to_frame()
    if len(frame):
        print(frame[SUMMARY_COLUMNS].to_string(index=False, float_format=lambda v: f"{v:.6g}"), file=stream)
    status = "PASS" if report.passed else "FAIL"
    print(f"\nirreversibility: {'ok' if report.irreversible else 'VIOLATED'}", file=stream)
    if report.inequality is not None:
        print(f"energy inequality: {report.inequality.n_pairs} pairs, worst margin "
              f"{report.inequality.worst_margin:.3e}, {len(report.inequality.failures)} failures", file=stream)
    if report.apriori is not None:
        state = ("not asserted" if not report.apriori.asserted
                 else ("ok" if report.apriori.passed else "VIOLATED"))
        print(f"a-priori bound: {state}", file=stream)
    if report.audits:
        print(f"minimality audit: {sum(a.violations for a in report.audits)} violations "
              f"over {sum(a.n_competitors for a in report.audits)} competitors", file=stream)
    if report.aborted:
        print(f"aborted: {report.aborted}", file=stream)
    print(f"{status}: {len(report.artifacts)} artifacts in {report.directory}", file=stream)


def cmd_run(config_path: Union[str, Path], out: Optional[Union[str, Path]] = None, threads: Optional[int] = None,
            seed: Optional[int] = None, solver: Optional[str] = None, audit: bool = False,
            progress: bool = True, stream: Optional[TextIO] = None) -> int:
    """Run the evolution with every export and check; 1 when a check fails or the run aborts."""
    stream = stream or sys.stdout
    config = _load(config_path, stream)
    if config is None:
        return 1
    config = config.with_overrides(threads=threads, seed=seed, solver=solver, out=out)
    if not _checked(config, stream).valid:
        return 1

    CorrelationContext.new_run()
    log_path = app_logger.attach_run_log(config.output_directory() / "logs")
    try:
        with structured_logger.operation_context("run", config=config.source, solver=config.solver.mode):
            report = run_checked(config, audit=audit, progress=progress)
    finally:
        app_logger.detach_run_log()
    _print_run(report, stream)
    logger.debug(f"Run log at {log_path}")
    return 0 if report.passed else 1


def default_sequence(config: RunConfig) -> List[Tuple[float, float, float]]:
    """Halve eps, a and delta twice from the configured discretization."""
    disc = config.discretization
    delta = disc.time_grid().delta
    return [(disc.eps / 2 ** k, disc.a / 2 ** k, delta / 2 ** k) for k in range(3)]


def cmd_study(config_path: Union[str, Path], out: Optional[Union[str, Path]] = None,
              threads: Optional[int] = None, solver: Optional[str] = None,
              sequence: Optional[Sequence[Tuple[float, float, float]]] = None,
              initial_only: bool = False, stream: Optional[TextIO] = None) -> int:
    """Refinement study over (eps, a, delta); writes study.csv and study_initial.csv."""
    stream = stream or sys.stdout
    config = _load(config_path, stream)
    if config is None:
        return 1
    config = config.with_overrides(threads=threads, solver=solver, out=out)
    if not _checked(config, stream).valid:
        return 1
    sequence = list(sequence or config.study.sequence or default_sequence(config))
    directory = config.output_directory()

    if initial_only:
        domain = config.domain.build()
        table = initial_crack_study(
            [list(line) for line in config.domain.initial_crack],
            lambda eps: build_structured_mesh(domain, eps),
            [(eps, a) for eps, a, _ in sequence],
            config.model.build().surface_density,
        )
        write_table(table, directory / "study_initial.csv")
        print(table.to_string(index=False, float_format=lambda v: f"{v:.6g}"), file=stream)
        return 0

    def setup_for(eps: float, a: float, delta: float):
        return config.with_discretization(eps, a, delta).to_setup()

    report = refinement_study(setup_for, sequence, sample_times=config.study.sample_times,
                              max_workers=config.study.max_workers,
                              compare_gradients=config.study.compare_gradients)
    write_table(report.table, directory / "study.csv")
    write_table(report.initial_table, directory / "study_initial.csv")
    print(report.table.to_string(index=False, float_format=lambda v: f"{v:.6g}"), file=stream)
    for flag in report.flags:
        print(f"  flag: {flag}", file=stream)
    print(f"{len(report.table)} rows in {directory / 'study.csv'}", file=stream)
    return 0


def gap_table(evolution: Evolution) -> pd.DataFrame:
    rows = []
    for i, solution in enumerate(evolution.solutions):
        d = solution.diagnostics
        gap = d.get('gap')
        rows.append({
            'step': i,
            't': float(evolution.grid.knots[i]),
            'heuristic': solution.objective,
            'oracle': d.get('oracle_objective', math.nan),
            'gap': math.nan if gap is None else gap,
        })
    return pd.DataFrame(rows, columns=['step', 't', 'heuristic', 'oracle', 'gap'])


def cmd_oracle_check(config_path: Union[str, Path], out: Optional[Union[str, Path]] = None,
                     threads: Optional[int] = None, stream: Optional[TextIO] = None) -> int:
    """Heuristic and oracle on every step; fails on a gap above 1e-6 relative or a capped step."""
    stream = stream or sys.stdout
    config = _load(config_path, stream)
    if config is None:
        return 1
    config = config.with_overrides(threads=threads, solver="both", out=out)
    if not _checked(config, stream).valid:
        return 1
    try:
        evolution, _ = run_evolution(config.to_setup())
    except EvolutionAborted as exc:
        evolution = exc.partial[0]
        print(f"aborted: {exc}", file=stream)
    table = gap_table(evolution)
    directory = config.output_directory()
    write_table(table, directory / "oracle_check.csv")
    print(table.to_string(index=False, float_format=lambda v: f"{v:.6g}"), file=stream)

    capped = int(table['gap'].isna().sum())
    relative = (table['gap'] / (1.0 + table['oracle'].abs())).fillna(0.0)
    worst = float(relative.max()) if len(table) else 0.0
    print(f"max relative gap {worst:.3e} over {len(table)} steps; {capped} steps beyond the enumeration cap",
          file=stream)
    return 0 if (capped == 0 and worst <= GAP_TOL and evolution.complete) else 1


def cmd_interpolation_error(angles: Sequence[float] = CHORD_ANGLES, eps_list: Sequence[float] = CHORD_EPS,
                            a_list: Sequence[float] = CHORD_A, out: Optional[Union[str, Path]] = None,
                            stream: Optional[TextIO] = None, point: Optional[Sequence[float]] = None) -> int:
    """Relative surface-energy error of interpolating curves of straight chords through ``point``."""
    stream = stream or sys.stdout
    table = interpolation_error_table(angles, eps_list, a_list, point=point)
    directory = Path(out) if out else Path(get_output_config()["directory"])
    path = write_table(table, directory / "interpolation_error.csv")
    print(table.to_string(index=False, float_format=lambda v: f"{v:.6g}"), file=stream)
    constant = fitted_constant(table)
    print(f"fitted C = {constant:.6g} (rel_error <= C a); table in {path}", file=stream)
    return 0


__all__ = [
    'RunReport',
    'write_run_artifacts',
    'reparse_error',
    'run_checked',
    'default_sequence',
    'gap_table',
    'cmd_validate',
    'cmd_run',
    'cmd_study',
    'cmd_oracle_check',
    'cmd_interpolation_error',
]
