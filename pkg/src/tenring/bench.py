"""Benchmark experiments: timing and stability comparisons of the solvers.

Five canned experiments, each a list of cells (one data configuration):

``a1``
    Per-iteration wall time, reference solver vs. normal equations, on
    well-conditioned Gaussian data (no error tracking).
``a2``
    Same data, but tracking the exact relative error each sweep, so error
    can be plotted against iterations and against time.
``b1``
    The three fast variants (``ne``, ``qr``, ``qrne``) on the same
    well-conditioned data.
``b2``
    Stability grid: congruence-controlled cores (collinearity ``gamma``)
    crossed with relative noise ``eta`` on a 100^3 rank-5 tensor.
``b3``
    Stability grid with heavy-tailed correlated cores (multivariate t,
    correlation profile ``theta``, 1 degree of freedom).

Scales: ``desk`` finishes on a laptop in minutes; ``paper`` uses the large
configurations and is an explicit opt-in.

Output is long-format rows, one per (cell, variant, trial, iteration), with
the cell encoded into the ``experiment`` column (e.g.
``b2(eta=1e-10,gamma=1-1e-10)``) so the column set stays fixed.

Seeding: every cell gets a stable tag; trial ``t`` of a cell derives its
data and initialization streams from the tuples ``(seed, 0, tag, t)`` and
``(seed, 1, tag, t)``.  The timing/convergence experiments (a1, a2, b1)
share one tensor per cell across trials and vary only the initialization;
the stability grids (b2, b3) redraw cores and noise every trial.  All
variants within a trial start from the same initialization, so error
comparisons are paired.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .solvers import AlsConfig, decompose
from .synthetic import SynthSpec, make_dataset

__all__ = [
    "EXPERIMENTS",
    "SCALES",
    "CSV_COLUMNS",
    "BenchCell",
    "experiment_cells",
    "default_trials",
    "run_cell",
    "run_experiment",
    "write_csv",
]

EXPERIMENTS = ("a1", "a2", "b1", "b2", "b3")
SCALES = ("desk", "paper")

CSV_COLUMNS = [
    "experiment",
    "variant",
    "trial",
    "iteration",
    "rel_error",
    "iter_seconds",
    "t_subchain",
    "t_mttsp",
    "t_solve",
    "t_gramqr",
    "t_other",
]

_GAUSSIAN_SIZES = {
    "desk": [(3, 60, 10), (3, 120, 10), (5, 20, 4)],
    "paper": [(3, 300, 10), (3, 500, 10), (5, 40, 5), (5, 60, 5)],
}
_NOISE_LEVELS = [1e-4, 1e-7, 1e-10]
_GAMMA_GAPS = [1e-4, 1e-7, 1e-10]
_THETA_GAPS = [1e-1, 1e-4, 1e-7]


@dataclass
class BenchCell:
    """One data configuration within an experiment."""

    experiment: str
    tag: int                      # stable per-experiment cell id for seeding
    label: str                    # goes into the CSV 'experiment' column
    spec: SynthSpec
    variants: tuple
    error_mode: str
    fresh_data_per_trial: bool
    extra_config: dict = field(default_factory=dict)


def _gaussian_cells(experiment, scale, variants, error_mode):
    cells = []
    for tag, (order, dim, rank) in enumerate(_GAUSSIAN_SIZES[scale]):
        cells.append(
            BenchCell(
                experiment=experiment,
                tag=tag,
                label=f"{experiment}(N={order},I={dim},R={rank})",
                spec=SynthSpec(order=order, dim=dim, rank=rank, kind="gaussian"),
                variants=variants,
                error_mode=error_mode,
                fresh_data_per_trial=False,
            )
        )
    return cells


def _grid_cells(experiment, kind, gaps, param_name):
    cells = []
    tag = 0
    for eta in _NOISE_LEVELS:
        for gap in gaps:
            value = 1.0 - gap
            spec = SynthSpec(order=3, dim=100, rank=5, kind=kind, noise=eta,
                             **{param_name: value})
            cells.append(
                BenchCell(
                    experiment=experiment,
                    tag=tag,
                    label=f"{experiment}(eta={eta:g},{param_name}=1-{gap:g})",
                    spec=spec,
                    variants=("ne", "qr", "qrne"),
                    error_mode="exact",
                    fresh_data_per_trial=True,
                )
            )
            tag += 1
    return cells


def experiment_cells(experiment, scale="desk"):
    """The cell list for an experiment at a scale."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; expected {EXPERIMENTS}")
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; expected {SCALES}")
    if experiment == "a1":
        return _gaussian_cells("a1", scale, ("als", "ne"), "none")
    if experiment == "a2":
        return _gaussian_cells("a2", scale, ("als", "ne"), "exact")
    if experiment == "b1":
        return _gaussian_cells("b1", scale, ("ne", "qr", "qrne"), "exact")
    if experiment == "b2":
        return _grid_cells("b2", "congruent", _GAMMA_GAPS, "gamma")
    return _grid_cells("b3", "student_t", _THETA_GAPS, "theta")


def default_trials(experiment, scale="desk"):
    """Trials per cell when the caller does not override."""
    if experiment in ("b2", "b3"):
        return 10 if scale == "desk" else 100
    return 3 if scale == "desk" else 10


def trial_rows(cell, trial, seed, max_iters):
    """Run every variant of one trial; returns the CSV rows."""
    data_trial = trial if cell.fresh_data_per_trial else 0
    spec = SynthSpec(**{**cell.spec.__dict__, "seed": (seed, 0, cell.tag, data_trial)})
    x, _ = make_dataset(spec)
    init_seed = (seed, 1, cell.tag, trial)
    rows = []
    for variant in cell.variants:
        config = AlsConfig(
            ranks=[spec.rank] * spec.order,
            max_iters=max_iters,
            seed=init_seed,
            error_mode=cell.error_mode,
            **cell.extra_config,
        )
        _, report = decompose(x, variant, config)
        for it in range(report.n_iters):
            buckets = report.iter_buckets[it]
            rows.append({
                "experiment": cell.label,
                "variant": variant,
                "trial": trial,
                "iteration": it + 1,
                "rel_error": report.errors[it] if report.errors else "",
                "iter_seconds": report.iter_seconds[it],
                "t_subchain": buckets["subchain"],
                "t_mttsp": buckets["mttsp"],
                "t_solve": buckets["solve"],
                "t_gramqr": buckets["gramqr"],
                "t_other": buckets["other"],
            })
    return rows


def run_cell(cell, trials, seed=0, max_iters=20, parallel=0):
    """All rows for one cell; trials run sequentially unless ``parallel``."""
    if parallel and trials > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            batches = list(
                pool.map(trial_rows, [cell] * trials, range(trials),
                         [seed] * trials, [max_iters] * trials)
            )
        return [row for batch in batches for row in batch]
    rows = []
    for trial in range(trials):
        rows.extend(trial_rows(cell, trial, seed, max_iters))
    return rows


def run_experiment(experiment, scale="desk", trials=None, seed=0, max_iters=20,
                   parallel=0, progress=None):
    """All rows for an experiment.  ``progress`` gets one message per cell."""
    if trials is None:
        trials = default_trials(experiment, scale)
    rows = []
    for cell in experiment_cells(experiment, scale):
        if progress is not None:
            progress(f"running {cell.label} ({trials} trials)")
        rows.extend(run_cell(cell, trials, seed=seed, max_iters=max_iters,
                             parallel=parallel))
    return rows


def write_csv(path, rows):
    """Write rows in the fixed long-format schema; returns the path."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return path
