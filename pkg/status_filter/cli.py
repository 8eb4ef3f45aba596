import argparse
import logging
import sys
from itertools import combinations
from typing import Sequence

from rich.console import Console
from rich.markup import escape

from . import defaults
from .baselines import DecayPolicy
from .config import RunConfig, parse_prior, split_list
from .engine import StatusEngine, UpdateMode
from .errors import CsfError, UnknownModel
from .evaluation import compare, comparison_record, evaluate, topic_agreement
from .formats import (
    dumps,
    load_corpus,
    load_report,
    load_responses,
    load_table,
    save_table,
    write_report,
    write_table,
    write_text,
)
from .logs import configure_logging
from .report import (
    belief_lines,
    comparison_lines,
    evaluation_lines,
    print_lines,
    print_text,
    table_lines,
)
from .status import StatusDistribution, argmax_status
from .training import Exclusions, fit

log = logging.getLogger(__name__)

err_console = Console(stderr=True, highlight=False, emoji=False)


def _print_warn(msg: str) -> None:
    err_console.print(f"[yellow]WARN:[/yellow] {escape(msg)}", soft_wrap=True)


def _print_error(msg: str) -> None:
    err_console.print("[bold red]ERROR:[/bold red] ", end="")
    err_console.print(msg, markup=False, soft_wrap=True)


def _belief_json(t: int, b: StatusDistribution) -> dict:
    return {"t": t, **b.as_dict(), "status": argmax_status(b).value}


# --- commands -----------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    responses = load_responses(args.responses, corpus)

    excl = Exclusions.of(args.exclude_object or (), args.exclude_dialogue or ())
    for obj in excl.excluded_objects:
        corpus.require_object(obj)
    for d in excl.excluded_dialogues:
        corpus.dialogue(d)

    result = fit(corpus, responses.responses, excl, args.alpha)
    save_table(args.out, result.table)
    log.info("Wrote table to %s (%d transitions).", args.out, result.counts.total)

    if args.json:
        print_text(write_table(result.table))
    else:
        print_lines(table_lines(result.table))
    if result.table.fallback_rows and args.alpha == 0:
        _print_warn(f"{len(result.table.fallback_rows)} row(s) had no data and were set to uniform.")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    table = load_table(args.table)
    corpus = load_corpus(args.corpus)
    dialogue = corpus.dialogue(args.dialogue)
    corpus.require_object(args.object)
    prior_name, prior = parse_prior(args.prior)

    engine = StatusEngine(prior=prior, table=table, mode=UpdateMode(args.mode))
    for obj in corpus.objects:
        engine.register_familiar(obj)

    beliefs: list[tuple[int, StatusDistribution]] = [(0, prior)]
    for u in dialogue.utterances:
        engine.observe_utterance(corpus.observation(dialogue.id, u.index))
        q = engine.query_status(args.object)
        beliefs.append((u.index, q.belief))

    if args.json:
        print_text(
            dumps(
                {
                    "dialogue": dialogue.id,
                    "object": args.object,
                    "prior": prior_name,
                    "mode": args.mode,
                    "steps": [_belief_json(t, b) for t, b in beliefs],
                }
            )
        )
    else:
        print_lines([f"{dialogue.id} / {args.object}  prior={prior_name} mode={args.mode}"])
        print_lines(belief_lines(beliefs))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    corpus = load_corpus(args.corpus)
    responses = load_responses(args.responses, corpus)

    report = evaluate(corpus, responses.responses, config, show_progress=None).to_file()
    text = write_report(report)
    if args.out:
        write_text(args.out, text)
        log.info("Wrote report to %s.", args.out)

    if args.json:
        print_text(text)
    else:
        print_lines(evaluation_lines(report))
    return 0


def _parse_pairs(raw: Sequence[str], names: Sequence[str]) -> list[tuple[str, str]]:
    if not raw:
        return list(combinations(names, 2))
    pairs = []
    for item in raw:
        parts = split_list(item)
        if len(parts) != 2:
            raise ValueError(f"--pairs expects two model names like 'u,fsm', got {item!r}")
        for p in parts:
            if p not in names:
                raise UnknownModel(f"model {p!r} is not in the report; have {', '.join(names)}")
        pairs.append((parts[0], parts[1]))
    return pairs


def cmd_compare(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    names = [m.name for m in report.models]
    exact = args.exact_mcnemar or bool(report.config.get("exact_mcnemar", False))

    records = []
    for a, b in _parse_pairs(args.pairs or (), names):
        v1 = report.model(a).to_vector()
        v2 = report.model(b).to_vector()
        records.append(comparison_record(compare(v1, v2, exact=exact)))

    if args.json:
        print_text(dumps({"comparisons": [r.model_dump(mode="json") for r in records]}))
    else:
        print_lines(comparison_lines(records))
    return 0


def cmd_agreement(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    result = topic_agreement(corpus)
    if args.json:
        print_text(dumps({"kappa": result.kappa, "degenerate": result.degenerate}))
    else:
        note = "  (every call in one category)" if result.degenerate else ""
        print_lines([f"topic agreement (Fleiss' kappa): {result.kappa:.4f}{note}"])
    return 0


# --- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csf", description="Cognitive status filter toolkit.")
    parser.add_argument("--log", choices=["quiet", "info", "debug"], default=None, help="Log level (default: $CSF_LOG or info).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Fit the conditional status table from annotated dialogues.")
    p.add_argument("--corpus", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=defaults.DEFAULT_ALPHA, help="Laplace smoothing added to every cell.")
    p.add_argument("--exclude-object", action="append", metavar="O")
    p.add_argument("--exclude-dialogue", action="append", metavar="D")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="Run the filter for one object through one dialogue.")
    p.add_argument("--table", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--dialogue", required=True)
    p.add_argument("--object", required=True)
    p.add_argument("--prior", default=defaults.DEFAULT_PRIOR, help="'uniform', 'informed' or 'pI,pA,pF'.")
    p.add_argument("--mode", choices=[m.value for m in UpdateMode], default=defaults.DEFAULT_MODE)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="Leave-one-out evaluation of the models plus McNemar comparisons.")
    p.add_argument("--corpus", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--models", default=",".join(defaults.DEFAULT_MODELS), help="Comma list from u,i,csf,fsm,rb.")
    p.add_argument("--seed", type=int, default=defaults.DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.add_argument("--prior", default=defaults.DEFAULT_PRIOR, help="Prior of the 'csf' model.")
    p.add_argument("--mode", choices=[m.value for m in UpdateMode], default=defaults.DEFAULT_MODE)
    p.add_argument("--alpha", type=float, default=defaults.DEFAULT_ALPHA)
    p.add_argument("--fsm-decay", choices=[d.value for d in DecayPolicy], default=defaults.DEFAULT_FSM_DECAY)
    p.add_argument("--workers", type=int, default=defaults.DEFAULT_WORKERS)
    p.add_argument("--score-tied-gold", action="store_true", help="Score tied cells with the lower-status tie-break.")
    p.add_argument("--exact-mcnemar", action="store_true", help="Binomial p-values instead of chi-square.")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="Re-derive paired statistics from a stored report.")
    p.add_argument("--report", required=True)
    p.add_argument("--pairs", action="append", metavar="A,B")
    p.add_argument("--exact-mcnemar", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("agreement", help="Fleiss' kappa of the annotators' topic calls.")
    p.add_argument("--corpus", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_agreement)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log)
    try:
        return args.func(args)
    except CsfError as e:
        _print_error(str(e))
        return e.exit_code
    except ValueError as e:
        _print_error(str(e))
        return 3


def run() -> None:
    sys.exit(main())
