"""Leave-one-(object, dialogue)-out evaluation of the filter models and baselines."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import defaults
from .baselines import RandomBaseline, fsm_init
from .coding import CellKey, CodingSummary, GoldLabelTable, code_responses, tally_gold_labels
from .config import RunConfig, parse_models
from .corpus import DialogueCorpus, ParticipantResponse
from .engine import StatusEngine
from .errors import EmptyVector
from .formats import ComparisonRecord, GoldSummary, ReportFile, record_vector
from .progress import ProgressBar
from .stats import (
    AgreementResult,
    ContingencyTable2x2,
    McNemarResult,
    PredictionEntry,
    PredictionVector,
    accuracy,
    contingency,
    fleiss_kappa,
    format_p,
    mcnemar,
)
from .status import CognitiveStatus, DialogueId, ObjectId, StatusDistribution
from .training import Exclusions, TrainingResult, fit_coded

log = logging.getLogger(__name__)

CSF_MODELS: frozenset[str] = frozenset({"u", "i", "csf"})

MISSING_GOLD = "missing-gold"
TIED_GOLD = "tied-gold"


@dataclass(frozen=True)
class Fold:
    index: int
    object: ObjectId
    dialogue: DialogueId

    @property
    def exclusions(self) -> Exclusions:
        return Exclusions.of([self.object], [self.dialogue])


def iter_folds(corpus: DialogueCorpus) -> list[Fold]:
    folds = []
    for d in corpus.dialogues:
        for obj in corpus.objects:
            folds.append(Fold(len(folds), obj, d.id))
    return folds


def train_for_fold(corpus: DialogueCorpus, coding: CodingSummary, fold: Fold, alpha: float) -> TrainingResult:
    return fit_coded(corpus, coding, fold.exclusions, alpha)


def model_prior(model: str, config: RunConfig) -> StatusDistribution:
    if model == "u":
        return StatusDistribution.of(defaults.UNIFORM_PRIOR)
    if model == "i":
        return StatusDistribution.of(defaults.INFORMED_PRIOR)
    return config.prior


@dataclass(frozen=True)
class _Context:
    corpus: DialogueCorpus
    coding: CodingSummary
    gold: GoldLabelTable
    config: RunConfig
    models: tuple[str, ...]


def _gold_for(ctx: _Context, key: CellKey) -> tuple[CognitiveStatus | None, str | None]:
    g = ctx.gold.get(key)
    if g is None:
        return None, MISSING_GOLD
    if g.tied and not ctx.config.score_tied_gold:
        return g.status, TIED_GOLD
    return g.status, None


def _csf_predictions(ctx: _Context, fold: Fold, prior: StatusDistribution, table) -> list[CognitiveStatus]:
    engine = StatusEngine(prior=prior, table=table, mode=ctx.config.mode)
    # every scene object is familiar before the first utterance
    for obj in ctx.corpus.objects:
        engine.register_familiar(obj)

    out = []
    for u in ctx.corpus.dialogue(fold.dialogue).utterances:
        engine.observe_utterance(ctx.corpus.observation(fold.dialogue, u.index))
        out.append(engine.query_status(fold.object).status)
    return out


def _fsm_predictions(ctx: _Context, fold: Fold) -> list[CognitiveStatus]:
    m = fsm_init(CognitiveStatus.FAMILIAR, ctx.config.fsm_decay)
    return [
        m.step(ctx.corpus.linguistic_status(fold.object, fold.dialogue, u.index))
        for u in ctx.corpus.dialogue(fold.dialogue).utterances
    ]


def _rb_predictions(ctx: _Context, fold: Fold) -> list[CognitiveStatus]:
    rb = RandomBaseline(ctx.config.seed, fold=fold.index)
    return [rb.predict() for _ in ctx.corpus.dialogue(fold.dialogue).utterances]


def _run_fold(ctx: _Context, fold: Fold) -> dict[str, list[PredictionEntry]]:
    predictions: dict[str, list[CognitiveStatus]] = {}

    csf_models = [m for m in ctx.models if m in CSF_MODELS]
    if csf_models:
        trained = train_for_fold(ctx.corpus, ctx.coding, fold, ctx.config.alpha)
        for m in csf_models:
            predictions[m] = _csf_predictions(ctx, fold, model_prior(m, ctx.config), trained.table)
    if "fsm" in ctx.models:
        predictions["fsm"] = _fsm_predictions(ctx, fold)
    if "rb" in ctx.models:
        predictions["rb"] = _rb_predictions(ctx, fold)

    entries: dict[str, list[PredictionEntry]] = {}
    for m, statuses in predictions.items():
        rows = []
        for t, predicted in enumerate(statuses, start=1):
            gold, excluded = _gold_for(ctx, (fold.dialogue, t, fold.object))
            rows.append(PredictionEntry(fold.dialogue, t, fold.object, predicted, gold, excluded))
        entries[m] = rows
    return entries


def _map_folds(
    fn: Callable[[Fold], dict[str, list[PredictionEntry]]],
    folds: Sequence[Fold],
    workers: int,
    on_done: Callable[[], None] | None = None,
) -> list[dict[str, list[PredictionEntry]]]:
    results = []
    if workers <= 1:
        for f in folds:
            results.append(fn(f))
            if on_done:
                on_done()
        return results

    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, so the merge is independent of scheduling
        for r in pool.map(fn, folds):
            results.append(r)
            if on_done:
                on_done()
    return results


def _collect(corpus: DialogueCorpus, model: str, fold_results: Iterable[dict[str, list[PredictionEntry]]]) -> PredictionVector:
    by_key = {e.key: e for r in fold_results for e in r.get(model, [])}
    ordered = tuple(by_key[k] for k in corpus.cells() if k in by_key)

    missing = [e for e in ordered if e.excluded == MISSING_GOLD]
    for e in missing:
        log.debug("No gold label for %s/%d/%s.", *e.key)
    if missing:
        log.warning("%s: %d prediction(s) have no gold label and are not scored.", model, len(missing))
    return PredictionVector(model, ordered)


def _prepare(
    corpus: DialogueCorpus,
    responses: Iterable[ParticipantResponse],
    config: RunConfig,
    models: tuple[str, ...],
) -> _Context:
    coding = code_responses(responses, corpus.objects)
    gold = tally_gold_labels(coding, corpus)
    return _Context(corpus, coding, gold, config, models)


def _predict_all(ctx: _Context, show_progress: bool | None = False) -> dict[str, PredictionVector]:
    folds = iter_folds(ctx.corpus)
    with ProgressBar(len(folds), "Folds", enabled=show_progress) as pb:
        results = _map_folds(lambda f: _run_fold(ctx, f), folds, ctx.config.workers, pb.advance)
    return {m: _collect(ctx.corpus, m, results) for m in ctx.models}


def leave_one_out_predict(
    model_kind: str,
    corpus: DialogueCorpus,
    responses: Iterable[ParticipantResponse],
    config: RunConfig,
) -> PredictionVector:
    models = parse_models((model_kind,))
    ctx = _prepare(corpus, responses, config, models)
    return _predict_all(ctx)[model_kind]


@dataclass(frozen=True)
class Comparison:
    model_1: str
    model_2: str
    table: ContingencyTable2x2
    result: McNemarResult


def compare(v1: PredictionVector, v2: PredictionVector, *, exact: bool = False) -> Comparison:
    t = contingency(v1, v2)
    return Comparison(v1.model, v2.model, t, mcnemar(t, exact=exact))


def compare_all(vectors: Sequence[PredictionVector], *, exact: bool = False) -> list[Comparison]:
    return [compare(a, b, exact=exact) for a, b in combinations(vectors, 2)]


def safe_accuracy(v: PredictionVector) -> float | None:
    try:
        return accuracy(v)
    except EmptyVector:
        log.warning("%s: nothing to score.", v.model)
        return None


@dataclass
class EvalReport:
    config: RunConfig
    gold: GoldLabelTable
    cells: int
    vectors: dict[str, PredictionVector] = field(default_factory=dict)
    accuracies: dict[str, float | None] = field(default_factory=dict)
    comparisons: list[Comparison] = field(default_factory=list)

    def to_file(self) -> ReportFile:
        return ReportFile(
            config=self.config.echo(),
            gold=GoldSummary(
                cells=self.cells,
                labelled=len(self.gold.labels),
                empty_cells=len(self.gold.empty_cells),
                tied_cells=len(self.gold.tied_cells),
                dropped_failed_checks=self.gold.dropped_failed_checks,
                q1_outside_q2=self.gold.q1_outside_q2,
            ),
            models=tuple(record_vector(v, self.accuracies.get(m)) for m, v in self.vectors.items()),
            comparisons=tuple(comparison_record(c) for c in self.comparisons),
        )


def comparison_record(c: Comparison) -> ComparisonRecord:
    return ComparisonRecord(
        model_1=c.model_1,
        model_2=c.model_2,
        n_ss=c.table.n_ss,
        n_sf=c.table.n_sf,
        n_fs=c.table.n_fs,
        n_ff=c.table.n_ff,
        chi2=float(c.result.chi2),
        p=float(c.result.p),
        p_display=format_p(c.result.p),
        no_discordant=c.result.no_discordant,
        exact=c.result.exact,
    )


def evaluate(
    corpus: DialogueCorpus,
    responses: Iterable[ParticipantResponse],
    config: RunConfig,
    *,
    show_progress: bool | None = False,
) -> EvalReport:
    ctx = _prepare(corpus, responses, config, config.models)
    vectors = _predict_all(ctx, show_progress)

    report = EvalReport(config=config, gold=ctx.gold, cells=len(corpus.cells()), vectors=vectors)
    report.accuracies = {m: safe_accuracy(v) for m, v in vectors.items()}
    report.comparisons = compare_all(list(vectors.values()), exact=config.exact_mcnemar)

    log.info(
        "Evaluated %d model(s) over %d fold(s); %d comparison(s).",
        len(vectors),
        len(iter_folds(corpus)),
        len(report.comparisons),
    )
    return report


def topic_agreement(corpus: DialogueCorpus) -> AgreementResult:
    """Fleiss' kappa of the annotators' topic / non-topic calls over voted mentions."""
    if corpus.annotators is None:
        raise EmptyVector("corpus does not declare its annotators")
    items = [
        [m.topic_votes, corpus.annotators - m.topic_votes]
        for d in corpus.dialogues
        for u in d.utterances
        for m in u.mentions
        if m.topic_votes is not None
    ]
    if not items:
        raise EmptyVector("no mention carries topic votes")
    return fleiss_kappa(items)
