"""
Multi-run studies on synthetic worlds.

Each study trains several configurations over a list of seeds and returns a
frozen report with a ``passed`` verdict and a JSON-ready ``to_dict``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .analysis import gte_alignment
from .datagen import (
    AugmentationRule,
    Dataset,
    SyntheticWorld,
    WorldConfig,
    check_assumptions,
    sample_dataset,
    sample_world,
)
from .errors import AssumptionInfeasibleError
from .evaluation import eval_probe, train_probe
from .models import EncoderSpec, HeadKind, HeadSpec
from .objectives import SparsityMode
from .trainer import TrainConfig, active_columns, embed, snapshot_diagnostics, train, train_task_heads

logger = logging.getLogger(__name__)

# MCC the sparse runs must exceed on the easy linear world.
MCC_FLOOR = 0.8
MCC_MARGIN = 0.05


@dataclass(frozen=True)
class StudySetup:
    """World, data sizes and training knobs shared by every run of a study."""
    world: WorldConfig = field(default_factory=lambda: WorldConfig(latent_dim=16, obs_dim=32, n_subject=8))
    hidden: tuple[int, ...] = (64,)
    representation_dim: int = 32
    embedding_dim: int | None = None
    n_train: int = 2048
    n_test: int = 1024
    batch_size: int = 128
    steps: int = 2000
    lr: float = 1e-3
    temperature: float = 0.5
    noise_scale: float = 1.0
    per_task: bool = False
    world_seed: int = 0

    def train_config(self, head: HeadKind, lam: float, mode: SparsityMode, seed: int) -> TrainConfig:
        d = self.representation_dim
        m = d if head == HeadKind.IDENTITY or self.embedding_dim is None else self.embedding_dim
        return TrainConfig(
            encoder=EncoderSpec(input_dim=self.world.obs_dim, hidden=self.hidden, output_dim=d),
            head=HeadSpec(kind=head, input_dim=d, output_dim=m),
            augmentation=AugmentationRule(noise_scale=self.noise_scale, per_task=self.per_task),
            batch_size=self.batch_size,
            steps=self.steps,
            temperature=self.temperature,
            lam=lam,
            sparsity_mode=mode,
            lr=self.lr,
            seed=seed,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "world": self.world.to_dict(),
            "hidden": list(self.hidden),
            "representation_dim": self.representation_dim,
            "embedding_dim": self.embedding_dim,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "batch_size": self.batch_size,
            "steps": self.steps,
            "lr": self.lr,
            "temperature": self.temperature,
            "noise_scale": self.noise_scale,
            "per_task": self.per_task,
            "world_seed": self.world_seed,
        }


def _world_and_data(setup: StudySetup) -> tuple[SyntheticWorld, Dataset, Dataset]:
    world = sample_world(setup.world, setup.world_seed)
    train_set = sample_dataset(world, setup.n_train, seed=setup.world_seed + 1)
    test_set = sample_dataset(world, setup.n_test, seed=setup.world_seed + 2)
    return world, train_set, test_set


def _median(values: Sequence[float]) -> float:
    return float(np.median(np.asarray(values, dtype=np.float64)))


# -- dimensional collapse per head kind ------------------------------------

@dataclass(frozen=True)
class CollapseReport:
    """
    ``runs[kind]`` holds one dict per seed with threshold ranks and entropy
    effective ranks of the representation and embedding covariances.
    """
    dim: int
    runs: dict[str, list[dict[str, Any]]]
    min_agreeing: int

    def _agree(self, check: Any) -> bool:
        seeds = len(next(iter(self.runs.values())))
        return sum(bool(check(i)) for i in range(seeds)) >= self.min_agreeing

    @property
    def identity_collapsed(self) -> bool:
        return self._agree(lambda i: self.runs["identity"][i]["rank_r"] < self.dim)

    @property
    def linear_head_widens_representation(self) -> bool:
        return self._agree(lambda i: self.runs["linear"][i]["erank_r"] >= self.runs["identity"][i]["erank_r"])

    @property
    def embedding_narrower(self) -> bool:
        return all(
            self._agree(lambda i, k=kind: self.runs[k][i]["erank_z"] <= self.runs[k][i]["erank_r"])
            for kind in ("linear", "nonlinear")
        )

    @property
    def passed(self) -> bool:
        return self.identity_collapsed and self.linear_head_widens_representation and self.embedding_narrower

    def to_dict(self) -> dict[str, Any]:
        return {
            "study": "collapse",
            "dim": self.dim,
            "runs": self.runs,
            "identity_collapsed": self.identity_collapsed,
            "linear_head_widens_representation": self.linear_head_widens_representation,
            "embedding_narrower": self.embedding_narrower,
            "passed": self.passed,
        }


def collapse_study(setup: StudySetup | None = None, seeds: Sequence[int] = (0, 1, 2)) -> CollapseReport:
    """Train every head kind without regularization and compare spectra."""
    setup = setup or StudySetup()
    world, train_set, test_set = _world_and_data(setup)
    runs: dict[str, list[dict[str, Any]]] = {}
    for kind in HeadKind:
        runs[kind.value] = []
        for seed in seeds:
            config = setup.train_config(kind, 0.0, SparsityMode.PENALTY, seed)
            model, _ = train(config, train_set, world=world)
            summary = snapshot_diagnostics(model, test_set).spectrum.summary()
            runs[kind.value].append({"seed": seed, **summary})
            logger.info(f"collapse {kind.value} seed={seed}: rank_r={summary['rank_r']} erank_r={summary['erank_r']:.2f}")
    return CollapseReport(dim=setup.representation_dim, runs=runs, min_agreeing=(2 * len(seeds) + 2) // 3)


# -- λ sweep in proximal mode ----------------------------------------------

@dataclass(frozen=True)
class SweepReport:
    """Median active columns and representation entropy rank per λ (0 = baseline)."""
    lams: tuple[float, ...]
    active_cols: dict[float, list[int]]
    erank_r: dict[float, list[float]]

    def median_active(self, lam: float) -> float:
        return _median(self.active_cols[lam])

    def median_erank(self, lam: float) -> float:
        return _median(self.erank_r[lam])

    @property
    def best_lam(self) -> float:
        return max(self.lams, key=self.median_erank)

    @property
    def active_strictly_decreasing(self) -> bool:
        medians = [self.median_active(lam) for lam in self.lams]
        return all(b < a for a, b in zip(medians, medians[1:]))

    @property
    def representation_not_worse(self) -> bool:
        return self.median_erank(self.best_lam) >= self.median_erank(0.0)

    @property
    def passed(self) -> bool:
        return self.active_strictly_decreasing and self.representation_not_worse

    def to_dict(self) -> dict[str, Any]:
        return {
            "study": "sparsity_sweep",
            "lams": list(self.lams),
            "median_active_cols": {str(lam): self.median_active(lam) for lam in (0.0, *self.lams)},
            "median_erank_r": {str(lam): self.median_erank(lam) for lam in (0.0, *self.lams)},
            "best_lam": self.best_lam,
            "active_strictly_decreasing": self.active_strictly_decreasing,
            "representation_not_worse": self.representation_not_worse,
            "passed": self.passed,
        }


def sparsity_sweep(
    setup: StudySetup | None = None,
    lams: Sequence[float] = (1e-4, 1e-3, 1e-2),
    seeds: Sequence[int] = (0, 1, 2),
) -> SweepReport:
    """Linear head in proximal mode across λ, against a λ = 0 baseline."""
    setup = setup or StudySetup()
    world, train_set, test_set = _world_and_data(setup)
    active: dict[float, list[int]] = {}
    erank: dict[float, list[float]] = {}
    for lam in (0.0, *lams):
        active[lam], erank[lam] = [], []
        for seed in seeds:
            config = setup.train_config(HeadKind.LINEAR, lam, SparsityMode.PROXIMAL, seed)
            model, _ = train(config, train_set, world=world)
            active[lam].append(active_columns(model, config.zero_threshold))
            erank[lam].append(snapshot_diagnostics(model, test_set).spectrum.summary()["erank_r"])
            logger.info(f"sweep lambda={lam} seed={seed}: active={active[lam][-1]} erank_r={erank[lam][-1]:.2f}")
    return SweepReport(lams=tuple(lams), active_cols=active, erank_r=erank)


# -- ground-truth-equivalent recovery ----------------------------------------

def gte_setup() -> StudySetup:
    """
    Linear world with d = d* = 8 and twelve tasks on 2 to 4 coordinates.

    Ground-truth task heads have 4 rows, so each is full rank on its support
    and the family passes ``check_assumptions``.
    """
    return StudySetup(
        world=WorldConfig(
            latent_dim=8, obs_dim=16, n_subject=4,
            n_tasks=12, support_min=2, support_max=4, task_head_dim=4,
        ),
        hidden=(),
        representation_dim=8,
        n_train=4096,
        steps=4000,
        lr=2e-3,
        per_task=True,
    )


@dataclass(frozen=True)
class RecoveryReport:
    assumptions: dict[str, Any]
    mcc: dict[float, list[float]]
    lams: tuple[float, ...]

    @property
    def assumptions_passed(self) -> bool:
        return bool(self.assumptions.get("passed"))

    @property
    def best_lam(self) -> float:
        return max(self.lams, key=lambda lam: _median(self.mcc[lam]))

    @property
    def median_baseline(self) -> float:
        return _median(self.mcc[0.0])

    @property
    def median_sparse(self) -> float:
        return _median(self.mcc[self.best_lam])

    @property
    def passed(self) -> bool:
        return (
            self.assumptions_passed
            and self.median_sparse >= self.median_baseline + MCC_MARGIN
            and self.median_sparse > MCC_FLOOR
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "study": "gte_recovery",
            "assumptions": self.assumptions,
            "mcc": {str(lam): values for lam, values in self.mcc.items()},
            "best_lam": self.best_lam,
            "median_baseline": self.median_baseline,
            "median_sparse": self.median_sparse,
            "passed": self.passed,
        }


def gte_recovery(
    setup: StudySetup | None = None,
    lams: Sequence[float] = (1e-3, 1e-2, 1e-1),
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
) -> RecoveryReport:
    """
    MCC between learned representations and ground-truth latents, with and
    without SparseHead.

    Every run trains one linear head per world task (``train_task_heads``)
    in penalty mode; λ = 0 is the unregularized baseline.

    Raises:
        AssumptionInfeasibleError: If the world's task family fails ``check_assumptions``
    """
    setup = setup or gte_setup()
    world, train_set, test_set = _world_and_data(setup)
    assumptions = check_assumptions(
        [t.support for t in world.tasks], [t.head for t in world.tasks], world.latent_dim
    ).to_dict()
    if not assumptions["passed"]:
        raise AssumptionInfeasibleError(
            f"Task family of world seed {setup.world_seed} does not meet the recovery assumptions: {assumptions}"
        )

    mcc: dict[float, list[float]] = {}
    for lam in (0.0, *lams):
        mcc[lam] = []
        for seed in seeds:
            config = setup.train_config(HeadKind.LINEAR, lam, SparsityMode.PENALTY, seed)
            run = train_task_heads(config, train_set, world)
            r, _ = embed(run.model, test_set.features)
            mcc[lam].append(gte_alignment(r, test_set.latents).mcc)
            logger.info(f"gte lambda={lam} seed={seed}: mcc={mcc[lam][-1]:.3f}")
    return RecoveryReport(assumptions=assumptions, mcc=mcc, lams=tuple(lams))


# -- embedding-space min-max ratio versus λ ---------------------------------

@dataclass(frozen=True)
class MinMaxProbeReport:
    """Median (across seeds) of the mean embedding-space M, per λ."""
    lams: tuple[float, ...]
    mean_m: dict[float, list[float]]

    @property
    def medians(self) -> list[float]:
        return [_median(self.mean_m[lam]) for lam in self.lams]

    @property
    def passed(self) -> bool:
        m = self.medians
        return all(b >= a for a, b in zip(m, m[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "study": "minmax_probe",
            "lams": list(self.lams),
            "median_mean_m": self.medians,
            "passed": self.passed,
        }


def minmax_probe(
    setup: StudySetup | None = None,
    lams: Sequence[float] = (0.0, 1e-3, 1e-2),
    seeds: Sequence[int] = (0, 1, 2),
) -> MinMaxProbeReport:
    """
    Whether post-training M in embedding space grows with λ. A failing
    verdict is reported as a finding, not an error.
    """
    setup = setup or StudySetup()
    world, train_set, test_set = _world_and_data(setup)
    mean_m: dict[float, list[float]] = {}
    for lam in lams:
        mean_m[lam] = []
        for seed in seeds:
            config = setup.train_config(HeadKind.LINEAR, lam, SparsityMode.PENALTY, seed)
            model, _ = train(config, train_set, world=world)
            minmax = snapshot_diagnostics(model, test_set).minmax
            mean_m[lam].append(minmax.mean if minmax else 0.0)
    report = MinMaxProbeReport(lams=tuple(lams), mean_m=mean_m)
    if not report.passed:
        logger.warning(f"Finding: embedding min-max ratio is not nondecreasing in lambda: {report.medians}")
    return report


# -- downstream probe with and without SparseHead ------------------------------

@dataclass(frozen=True)
class ProbeComparisonReport:
    lam: float
    baseline: list[float]
    sparse: list[float]
    min_wins: int

    @property
    def wins(self) -> int:
        return sum(s >= b for s, b in zip(self.sparse, self.baseline))

    @property
    def passed(self) -> bool:
        return self.wins >= self.min_wins

    def to_dict(self) -> dict[str, Any]:
        return {
            "study": "probe_comparison",
            "lam": self.lam,
            "baseline_acc": self.baseline,
            "sparse_acc": self.sparse,
            "wins": self.wins,
            "passed": self.passed,
        }


def probe_comparison(
    setup: StudySetup | None = None,
    lam: float = 1e-2,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
) -> ProbeComparisonReport:
    """Linear-probe accuracy on the world's labeled task, SparseHead vs λ = 0."""
    setup = setup or StudySetup()
    world, train_set, test_set = _world_and_data(setup)
    assert train_set.labels is not None and test_set.labels is not None

    def accuracy(config: TrainConfig) -> float:
        model, _ = train(config, train_set, world=world)
        r_train, _ = embed(model, train_set.features)
        r_test, _ = embed(model, test_set.features)
        probe = train_probe(r_train, train_set.labels, seed=config.seed, n_classes=world.config.n_classes, standardize=True)
        return eval_probe(probe, r_test, test_set.labels)

    baseline, sparse = [], []
    for seed in seeds:
        baseline.append(accuracy(setup.train_config(HeadKind.LINEAR, 0.0, SparsityMode.PROXIMAL, seed)))
        sparse.append(accuracy(setup.train_config(HeadKind.LINEAR, lam, SparsityMode.PROXIMAL, seed)))
        logger.info(f"probe seed={seed}: baseline={baseline[-1]:.3f} sparse={sparse[-1]:.3f}")
    return ProbeComparisonReport(lam=lam, baseline=baseline, sparse=sparse, min_wins=(3 * len(seeds) + 4) // 5)


STUDIES = {
    "collapse": collapse_study,
    "sparsity-sweep": sparsity_sweep,
    "gte-recovery": gte_recovery,
    "minmax-probe": minmax_probe,
    "probe-comparison": probe_comparison,
}


def scaled(setup: StudySetup, **overrides: Any) -> StudySetup:
    """Copy of ``setup`` with some fields replaced (e.g. fewer steps for smoke runs)."""
    return replace(setup, **overrides)
