"""
Experiment harness.

This module provides ExperimentService, which owns a run directory and drives:
- recognizer training (or reuse of saved checkpoints)
- single extractions (state merging or k-means) producing ResultRow records
- the reproduction table (state merging vs k-means over languages and seeds)
- the sweeps: extraction data size, kappa, training epochs, trie sanity check
- summaries (mean/std/median/quartiles over seeds)

Layout of a run directory::

    <out>/checkpoints/tomita<L>/seed<S>/epochNNN.ckpt, metrics.csv, best_checkpoint.json
    <out>/datasets/tomita<L>/seed<S>/train.tsv, dev.tsv
    <out>/automata/<sweep>/tomita<L>/seed<S>/<job>/{merged.nfa,final.dfa,*.dot}
    <out>/<sweep>/results.csv, summary.csv

Every random draw comes from a generator seeded by
SeedSequence([seed, language, stream, ...]), so any job can be rerun alone.
"""

import logging
import threading
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from itertools import groupby
from pathlib import Path
from typing import Literal, TypeVar

import numpy as np

from core.context import run_context
from core.exceptions import ConfigurationError, NotConvergedError, NotFoundError
from models import Checkpoint, Dataset, Dfa, LabeledSample, Nfa
from repositories import (
    AutomatonRepository,
    CheckpointRepository,
    DatasetRepository,
    ResultsRepository,
)
from schemas import (
    EvaluationSummary,
    ExperimentConfig,
    ExtractionMethod,
    ResultRow,
    SummaryRow,
)
from .automata_service import equivalent
from .evaluation_service import fidelity, rnn_accuracy
from .extraction_service import extract
from .kmeans_service import kmeans_extract
from .language_service import gold_dfa, sample_balanced, sample_eval_set
from .rnn_service import init_model
from .training_service import METRICS_FILE, RnnTrainer, TrainingResult

logger = logging.getLogger(__name__)

T = TypeVar("T")

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"


class Stream(IntEnum):
    """Independent random streams of one (seed, language) pair."""

    TRAIN_DATA = 0
    DEV_DATA = 1
    INIT = 2
    BATCHES = 3
    EXTRACTION_DATA = 4
    EVAL_DATA = 5
    KMEANS = 6


def rng_for(seed: int, language: int, stream: Stream, *extra: int) -> np.random.Generator:
    """Generator for one stream; ``extra`` distinguishes draws within a stream."""
    return np.random.default_rng(
        np.random.SeedSequence([seed, language, int(stream), *extra])
    )


@dataclass(frozen=True)
class ExtractionJob:
    """One extraction to run."""

    language: int
    seed: int
    method: ExtractionMethod
    data_count: int
    string_length: int
    kappa: float | Literal["auto"] | None = None
    epoch: int | None = None
    pool: int | None = None
    artifacts: str | None = None

    @property
    def run_id(self) -> str:
        parts = [f"tomita{self.language}", f"s{self.seed}", self.method.value, f"n{self.data_count}"]
        if self.kappa is not None:
            parts.append(f"k{self.kappa}")
        if self.epoch is not None:
            parts.append(f"e{self.epoch}")
        return "-".join(parts)


def summarize(
    rows: Iterable[ResultRow], by_epoch: bool = True, by_kappa: bool = False
) -> list[SummaryRow]:
    """
    Statistics over seeds for every (language, method, epoch, data count) group.

    Standard deviations use ddof=0 and quartiles numpy's linear interpolation.
    With ``by_epoch`` False rows from different epochs share a group and the
    summary epoch is left empty. ``by_kappa`` adds the tolerance to the group.
    """

    def key(row: ResultRow) -> tuple:
        kappa = row.kappa if by_kappa and row.kappa is not None else -1.0
        return (row.language, row.method.value, row.epoch if by_epoch else -1, row.data_count, kappa)

    summaries = []
    for (language, _, epoch, data_count, kappa), group in groupby(sorted(rows, key=key), key=key):
        members = list(group)
        accuracy = np.array([r.accuracy_rnn for r in members])
        minimized = np.array([r.minimized_size for r in members])
        tries = [r.accuracy_trie for r in members if r.accuracy_trie is not None]
        summaries.append(
            SummaryRow(
                language=language,
                method=members[0].method,
                epoch=epoch if by_epoch else None,
                data_count=data_count,
                kappa=kappa if kappa >= 0 else None,
                runs=len(members),
                accuracy_mean=float(accuracy.mean()),
                accuracy_std=float(accuracy.std()),
                accuracy_median=float(np.median(accuracy)),
                accuracy_q25=float(np.percentile(accuracy, 25)),
                accuracy_q75=float(np.percentile(accuracy, 75)),
                merged_size_median=float(np.median([r.merged_size for r in members])),
                minimized_size_median=float(np.median(minimized)),
                minimized_size_min=int(minimized.min()),
                gold_size=gold_dfa(language).size,
                equivalent_runs=sum(r.equivalent_to_gold for r in members),
                trie_accuracy_mean=float(np.mean(tries)) if tries else None,
                trie_accuracy_std=float(np.std(tries)) if tries else None,
            )
        )
    return summaries


class ExperimentService:
    """
    Service class for experiments over one run directory.

    This service handles:
    - Training and loading recognizers (one per language and seed)
    - Drawing and storing datasets
    - Running extraction jobs, in parallel when ``threads`` > 1
    - Writing results, summaries and automaton artifacts
    """

    def __init__(self, config: ExperimentConfig, output_dir: Path | str | None = None, threads: int = 1):
        """
        Initialize ExperimentService.

        Args:
            config: Resolved experiment configuration
            output_dir: Run directory (defaults to ``config.output_dir``)
            threads: Parallel jobs
        """
        self.config = config
        self.root = Path(output_dir or config.output_dir)
        self.threads = max(1, threads)
        self.checkpoints = CheckpointRepository(self.root / "checkpoints")
        self.datasets = DatasetRepository(self.root / "datasets")
        self.automata = AutomatonRepository(self.root / "automata")
        self.tables = ResultsRepository(self.root)
        self.trainer = RnnTrainer(
            config.training, self.checkpoints, ResultsRepository(self.checkpoints.root)
        )
        self._locks: dict[tuple[int, int], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # ========================================================================
    # Recognizers
    # ========================================================================

    def _lock(self, language: int, seed: int) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault((language, seed), threading.Lock())

    def train(self, language: int, seed: int) -> TrainingResult:
        """
        Train a recognizer from scratch and store its checkpoints.

        Raises:
            NotConvergedError: If convergence is required and not reached
        """
        training = self.config.training
        with run_context(f"train-tomita{language}-s{seed}"):
            train_set = sample_balanced(
                language, training.train_length, training.train_count,
                rng_for(seed, language, Stream.TRAIN_DATA),
            )
            dev_set = sample_balanced(
                language, training.dev_length, training.dev_count,
                rng_for(seed, language, Stream.DEV_DATA),
            )
            run_dir = CheckpointRepository.run_dir(language, seed)
            self.datasets.save(
                Dataset(language, seed, str(training.train_length), tuple(train_set)),
                f"{run_dir}/train",
            )
            self.datasets.save(
                Dataset(language, seed, str(training.dev_length), tuple(dev_set)),
                f"{run_dir}/dev",
            )
            (self.checkpoints.root / run_dir / METRICS_FILE).unlink(missing_ok=True)
            for stale in self.checkpoints.epochs(language, seed):
                self.checkpoints.path_for(self.checkpoints.name_for(language, seed, stale)).unlink()

            model = init_model(
                training.embed_dim, training.hidden_dim, rng_for(seed, language, Stream.INIT)
            )
            result = self.trainer.train(
                model, train_set, dev_set, rng_for(seed, language, Stream.BATCHES),
                language=language, seed=seed,
            )
        if training.require_convergence and not result.converged:
            raise NotConvergedError(language, seed, result.best.metadata.dev_accuracy)
        return result

    def ensure_model(self, language: int, seed: int, epoch: int | None = None) -> Checkpoint:
        """
        Checkpoint of a recognizer, training it first when allowed.

        Args:
            language: Tomita language
            seed: Training seed
            epoch: Checkpoint epoch; None selects the best epoch

        Raises:
            NotFoundError: If the recognizer (or epoch) is missing and training is off
            NotConvergedError: If the stored recognizer never converged and
                convergence is required
        """
        with self._lock(language, seed):
            if not self.checkpoints.epochs(language, seed):
                if not self.config.train_if_missing:
                    raise NotFoundError(
                        "checkpoint",
                        message=f"No checkpoints for language {language}, seed {seed}",
                        details={"root": str(self.checkpoints.root)},
                    )
                self.train(language, seed)
            best = self.checkpoints.best_epoch(language, seed)
            checkpoint = self.checkpoints.load_checkpoint(language, seed, best)
            if self.config.training.require_convergence and checkpoint.metadata.dev_accuracy < 1.0:
                raise NotConvergedError(language, seed, checkpoint.metadata.dev_accuracy)
            if epoch is None or epoch == best:
                return checkpoint
            return self.checkpoints.load_checkpoint(language, seed, epoch)

    def train_all(self, languages: Iterable[int], seeds: Iterable[int]) -> list[TrainingResult]:
        """Retrain every (language, seed) recognizer, in parallel when configured."""
        pairs = [(language, seed) for language in languages for seed in seeds]
        return self._map(lambda pair: self.train(*pair), pairs)

    def prepare(self, languages: Iterable[int], seeds: Iterable[int]) -> None:
        """Make sure every (language, seed) recognizer exists, training in parallel."""
        pairs = [(language, seed) for language in languages for seed in seeds]
        self._map(lambda pair: self.ensure_model(*pair), pairs)

    # ========================================================================
    # Data
    # ========================================================================

    def extraction_strings(
        self, language: int, seed: int, count: int, length: int, pool: int | None = None
    ) -> list[str]:
        """
        Extraction strings for one job.

        A balanced pool of ``max(count, pool)`` strings is drawn and shuffled,
        and the first ``count`` are used, so smaller counts of a sweep are
        subsets of larger ones.
        """
        size = max(count, pool or count)
        rng = rng_for(seed, language, Stream.EXTRACTION_DATA, length, size)
        drawn = sample_balanced(language, length, size, rng)
        order = rng.permutation(size)
        return [drawn[i].x for i in order[:count]]

    def eval_set(self, language: int, seed: int) -> list[LabeledSample]:
        extraction = self.config.extraction
        return sample_eval_set(
            language, extraction.eval_count, extraction.eval_max_len,
            rng_for(seed, language, Stream.EVAL_DATA),
        )

    # ========================================================================
    # Single runs
    # ========================================================================

    def run_extraction(self, job: ExtractionJob) -> ResultRow:
        """
        Run one extraction job and evaluate it on the held-out set.

        Returns:
            ResultRow for the job
        """
        with run_context(job.run_id):
            epoch = job.epoch if job.epoch is not None else self.config.extraction.epoch
            checkpoint = self.ensure_model(job.language, job.seed, epoch)
            model = checkpoint.model
            strings = self.extraction_strings(
                job.language, job.seed, job.data_count, job.string_length, job.pool
            )
            eval_set = self.eval_set(job.language, job.seed)

            started = time.perf_counter()
            merged = None
            if job.method is ExtractionMethod.STATE_MERGING:
                kappa = job.kappa if job.kappa is not None else self.config.extraction.kappa
                report = extract(model, strings, kappa)
                final, merged, kappa = report.final, report.merged, report.kappa
                trie_size, merged_size = report.tree.size, report.merged.size
                train_fidelity = report.train_fidelity
                accuracy_trie = fidelity(report.tree.to_dfa(), model, eval_set).accuracy_rnn
            else:
                baseline = kmeans_extract(
                    model, strings, self.config.baseline.k,
                    rng_for(job.seed, job.language, Stream.KMEANS, job.data_count),
                    self.config.baseline.max_iter,
                )
                final, kappa = baseline.final, None
                trie_size, merged_size, accuracy_trie = None, baseline.raw.size, None
                train_fidelity = None
            scores = fidelity(final, model, eval_set)
            is_gold = equivalent(final, gold_dfa(job.language))
            elapsed = time.perf_counter() - started

            if job.artifacts:
                self._save_artifacts(job.artifacts, final, merged)
            logger.info(
                f"{job.run_id}: fidelity {scores.accuracy_rnn:.4f}, gold {scores.accuracy_gold:.4f}, "
                f"sizes {trie_size or '-'}/{merged_size}/{final.size}"
            )
            return ResultRow(
                language=job.language,
                method=job.method,
                seed=job.seed,
                epoch=checkpoint.epoch,
                data_count=job.data_count,
                kappa=kappa,
                accuracy_rnn=scores.accuracy_rnn,
                accuracy_gold=scores.accuracy_gold,
                accuracy_trie=accuracy_trie,
                prefix_fidelity=scores.prefix_fidelity,
                train_fidelity=train_fidelity,
                trie_size=trie_size,
                merged_size=merged_size,
                minimized_size=final.size,
                equivalent_to_gold=is_gold,
                wall_time=elapsed,
            )

    def _save_artifacts(self, directory: str, final: Dfa, merged: Nfa | None) -> None:
        self.automata.save(final, f"{directory}/final.dfa")
        self.automata.save_dot(final, f"{directory}/final", title="final")
        if merged is not None:
            self.automata.save(merged, f"{directory}/merged.nfa")
            self.automata.save_dot(merged, f"{directory}/merged", title="merged")

    def evaluate(
        self, language: int, seed: int, epoch: int | None = None, dfa: Dfa | None = None
    ) -> EvaluationSummary:
        """Held-out accuracy of a checkpoint, and of ``dfa`` against it when given."""
        checkpoint = self.ensure_model(language, seed, epoch)
        eval_set = self.eval_set(language, seed)
        prefix_accuracy, string_accuracy = rnn_accuracy(checkpoint.model, eval_set)
        extra = {}
        if dfa is not None:
            scores = fidelity(dfa, checkpoint.model, eval_set)
            extra = {
                "dfa_accuracy_rnn": scores.accuracy_rnn,
                "dfa_accuracy_gold": scores.accuracy_gold,
                "dfa_prefix_fidelity": scores.prefix_fidelity,
                "dfa_size": dfa.size,
                "equivalent_to_gold": equivalent(dfa, gold_dfa(language)),
            }
        return EvaluationSummary(
            language=language,
            seed=seed,
            epoch=checkpoint.epoch,
            count=len(eval_set),
            rnn_prefix_accuracy=prefix_accuracy,
            rnn_string_accuracy=string_accuracy,
            **extra,
        )

    # ========================================================================
    # Batches of jobs
    # ========================================================================

    def _map(self, fn: Callable[[T], object], items: list[T]) -> list:
        if self.threads == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def run_jobs(self, jobs: list[ExtractionJob], table: str) -> list[ResultRow]:
        """
        Run jobs (in parallel when configured) and append their rows to ``table``.

        Rows are returned and written in job order.
        """
        self.prepare(sorted({j.language for j in jobs}), sorted({j.seed for j in jobs}))
        rows = self._map(self.run_extraction, jobs)
        self.tables.append_results(table, rows)
        return rows

    def _write_summary(
        self, directory: str, rows: list[ResultRow], by_epoch: bool = True, by_kappa: bool = False
    ) -> list[SummaryRow]:
        summary = summarize(rows, by_epoch=by_epoch, by_kappa=by_kappa)
        self.tables.write_summary(f"{directory}/{SUMMARY_FILE}", summary)
        return summary

    def _fresh_table(self, directory: str, name: str = RESULTS_FILE) -> str:
        path = f"{directory}/{name}"
        self.tables.path_for(path).unlink(missing_ok=True)
        return path

    # ========================================================================
    # Experiments
    # ========================================================================

    def reproduce_table2(self) -> tuple[list[ResultRow], list[SummaryRow]]:
        """
        State merging and k-means for every configured language and seed.

        Both methods use ``extraction.data_count`` strings of length
        ``extraction.string_length`` and the best checkpoint.
        """
        extraction = self.config.extraction
        jobs = [
            ExtractionJob(
                language=language,
                seed=seed,
                method=method,
                data_count=extraction.data_count,
                string_length=extraction.string_length,
                kappa=extraction.kappa if method is ExtractionMethod.STATE_MERGING else None,
                artifacts=f"table2/tomita{language}/seed{seed}/{method.value}",
            )
            for language in self.config.languages
            for method in ExtractionMethod
            for seed in self.config.seeds
        ]
        rows = self.run_jobs(jobs, self._fresh_table("table2"))
        return rows, self._write_summary("table2", rows, by_epoch=False)

    def sweep_data_size(self) -> tuple[list[ResultRow], list[SummaryRow]]:
        """Extraction accuracy and size as the number of extraction strings grows."""
        sweep = self.config.sweep
        jobs = [
            ExtractionJob(
                language=language,
                seed=seed,
                method=ExtractionMethod.STATE_MERGING,
                data_count=count,
                string_length=sweep.data_length,
                kappa=self.config.extraction.kappa,
                pool=max(sweep.data_grid),
            )
            for language in self.config.languages
            for seed in self.config.seeds[: sweep.data_seeds]
            for count in sweep.data_grid
        ]
        rows = self.run_jobs(jobs, self._fresh_table("sweep_data"))
        return rows, self._write_summary("sweep_data", rows, by_epoch=False)

    def sweep_kappa(self) -> tuple[list[ResultRow], list[SummaryRow]]:
        """Merged and minimized machines for every kappa of the grid, with DOT snapshots."""
        sweep = self.config.sweep
        extraction = self.config.extraction
        jobs = [
            ExtractionJob(
                language=sweep.kappa_language,
                seed=seed,
                method=ExtractionMethod.STATE_MERGING,
                data_count=extraction.data_count,
                string_length=extraction.string_length,
                kappa=kappa,
                artifacts=f"sweep_kappa/tomita{sweep.kappa_language}/seed{seed}/kappa{kappa}",
            )
            for seed in self.config.seeds
            for kappa in sweep.kappa_grid
        ]
        rows = self.run_jobs(jobs, self._fresh_table("sweep_kappa"))
        return rows, self._write_summary("sweep_kappa", rows, by_epoch=False, by_kappa=True)

    def sweep_epochs(self) -> tuple[list[ResultRow], list[ResultRow]]:
        """
        Extraction from every training epoch.

        Returns:
            (size rows: one extraction per saved epoch at ``epoch_data_count``,
             curve rows: accuracy against data count at the early and late epochs)

        Raises:
            ConfigurationError: If training stops before the late epoch
        """
        sweep = self.config.sweep
        epochs = self.config.training.epochs
        if sweep.late_epoch > epochs or sweep.early_epoch > epochs:
            raise ConfigurationError(
                f"The epoch sweep compares epochs {sweep.early_epoch} and {sweep.late_epoch} "
                f"but training stops at epoch {epochs}",
                details={"epochs": epochs, "late_epoch": sweep.late_epoch},
            )
        seeds = self.config.seeds[: sweep.epoch_seeds]
        length = self.config.extraction.string_length
        self.prepare(self.config.languages, seeds)

        def job(language: int, seed: int, epoch: int, count: int, pool: int | None = None) -> ExtractionJob:
            return ExtractionJob(
                language=language,
                seed=seed,
                method=ExtractionMethod.STATE_MERGING,
                data_count=count,
                string_length=length,
                kappa=sweep.epoch_kappa,
                epoch=epoch,
                pool=pool,
            )

        size_jobs = [
            job(language, seed, epoch, sweep.epoch_data_count)
            for language in self.config.languages
            for seed in seeds
            for epoch in self.checkpoints.epochs(language, seed)
        ]
        curve_jobs = [
            job(language, seed, epoch, count, max(sweep.epoch_data_grid))
            for language in self.config.languages
            for seed in seeds
            for epoch in (sweep.early_epoch, sweep.late_epoch)
            for count in sweep.epoch_data_grid
        ]
        sizes = self.run_jobs(size_jobs, self._fresh_table("sweep_epochs", "sizes.csv"))
        curves = self.run_jobs(curve_jobs, self._fresh_table("sweep_epochs", "curves.csv"))
        self.tables.write_summary(f"sweep_epochs/sizes_{SUMMARY_FILE}", summarize(sizes))
        self.tables.write_summary(f"sweep_epochs/curves_{SUMMARY_FILE}", summarize(curves))
        return sizes, curves

    def sweep_sanity(self) -> tuple[list[ResultRow], list[SummaryRow]]:
        """Held-out accuracy of the raw prefix tree against the merged DFA."""
        sweep = self.config.sweep
        jobs = [
            ExtractionJob(
                language=language,
                seed=seed,
                method=ExtractionMethod.STATE_MERGING,
                data_count=count,
                string_length=self.config.extraction.string_length,
                kappa=self.config.extraction.kappa,
                pool=max(sweep.sanity_grid),
            )
            for language in sweep.sanity_languages
            for seed in self.config.seeds[: sweep.sanity_seeds]
            for count in sweep.sanity_grid
        ]
        rows = self.run_jobs(jobs, self._fresh_table("sweep_sanity"))
        return rows, self._write_summary("sweep_sanity", rows, by_epoch=False)
