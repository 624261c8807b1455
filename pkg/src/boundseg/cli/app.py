"""CLI application for boundseg.

Provides commands: reconstruct, score, make-targets, perturb, rollout-sim,
gen-corpus. Every command builds its whole output before writing it to
stdout; failures print one JSON object to stderr and exit non-zero.
"""

import argparse
import dataclasses
import json
import logging
import sys
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from boundseg.boundary.codec import parse, parse_lenient, serialize, truncate_at_end_marker
from boundseg.boundary.patterns import BoundaryOutput, OutputPattern
from boundseg.boundary.reconstruct import ReconstructionResult, reconstruct
from boundseg.boundary.targets import make_targets, output_reduction
from boundseg.core.errors import BoundsegError, InputError, InvariantViolation
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.dataset.io import (
    DatasetRecord,
    IoFailure,
    dumps_dataset,
    load_dataset,
    load_outputs,
    load_predictions,
    save_dataset,
)
from boundseg.dataset.synthetic import CorpusSpec, generate_synthetic_corpus
from boundseg.metrics.scores import EvalReport, evaluate, mean_report
from boundseg.perturb.candidate import Candidate
from boundseg.perturb.edits import perturbation_pool
from boundseg.perturb.search import NoPerturbations, best_intermediate
from boundseg.rollout.config import MediumMode, RolloutConfig
from boundseg.rollout.policies.base import Policy
from boundseg.rollout.policies.noisy_oracle import NoisyOraclePolicy
from boundseg.rollout.policies.registry import PolicyRegistry
from boundseg.rollout.policies.replay import ReplayPolicy
from boundseg.rollout.policies.static import StaticPolicy
from boundseg.rollout.simulation import simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3

_MEAN_ROW_ID = "__mean__"
_DEFAULT_NOISE = 2


def _dumps(obj: object) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def _read_text(path: Path) -> str:
    # bytes, so "\r\n" is kept and offsets stay exact
    try:
        return path.read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise IoFailure(f"Cannot read {path}: {e}") from e


def _segments_json(doc: Document, result: ReconstructionResult) -> list[dict]:
    return [
        {"label": s.label, "start": s.start, "end": s.end, "text": doc.text[s.start:s.end]}
        for s in result.segments
    ]


def _by_id(records: Sequence[DatasetRecord]) -> dict[str, DatasetRecord]:
    index: dict[str, DatasetRecord] = {}
    for record in records:
        if record.id in index:
            raise InputError(f"Duplicate document id {record.id!r}")
        index[record.id] = record
    return index


def _parse_raw(
    raw: str, label_set: LabelSet, pattern: OutputPattern, end_marker: str
) -> BoundaryOutput | None:
    return parse_lenient(truncate_at_end_marker(raw, end_marker), label_set, pattern).output


def reconstruct_command(
    doc_path: Path,
    boundaries_path: Path,
    pattern: OutputPattern,
    label_set: LabelSet,
    doc_id: str | None = None,
) -> str:
    """Recover segments of a plain-text document from a boundary-output file."""
    doc = Document(doc_id or doc_path.stem, _read_text(doc_path))
    out = parse(_read_text(boundaries_path), label_set, pattern)
    result = reconstruct(doc, out)
    return _dumps({
        "id": doc.id,
        "segments": _segments_json(doc, result),
        "discarded": [{"index": d.index, "reason": d.reason} for d in result.discarded],
    }) + "\n"


def score_command(
    pred_path: Path,
    gold_path: Path,
    label_set: LabelSet,
    window: int | None = None,
    pattern: OutputPattern | None = None,
    end_marker: str = "<eos>",
    workers: int = 1,
) -> str:
    """One metric row per gold document plus a corpus-mean row.

    Without a pattern, pred_path holds segmentations in the dataset format;
    with one, it holds raw boundary outputs that are reconstructed first.
    Documents missing from the predictions score as empty predictions.
    """
    gold = load_dataset(gold_path, label_set)
    preds: dict[str, Segmentation | ReconstructionResult]
    if pattern is None:
        preds = {r.id: r.segmentation for r in _by_id(load_predictions(pred_path)).values()}
        supplied = set(preds)
    else:
        raw = load_outputs(pred_path)
        supplied = set(raw)
        preds = {}
        for record in gold:
            if record.id in raw:
                out = _parse_raw(raw[record.id], label_set, pattern, end_marker)
                if out is not None:
                    preds[record.id] = reconstruct(record.document, out)
    unknown = sorted(supplied - {r.id for r in gold})
    if unknown:
        logger.warning("Ignoring predictions for unknown documents: %s", unknown)

    def score(record: DatasetRecord) -> EvalReport:
        pred = preds.get(record.id, ReconstructionResult.empty())
        return evaluate(record.document, pred, record.segmentation, window, label_set)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(score, gold))
    else:
        reports = [score(r) for r in gold]

    lines = [_dumps(rep.as_row(r.id)) for r, rep in zip(gold, reports)]
    lines.append(_dumps(mean_report(reports).as_row(_MEAN_ROW_ID, with_average=True)))
    logger.info("Scored %d documents", len(reports))
    return "\n".join(lines) + "\n"


def make_targets_command(
    dataset_path: Path,
    pattern: OutputPattern,
    label_set: LabelSet,
    seed: int = 0,
) -> str:
    """Boundary-output training targets, one JSON line per document."""
    lines = []
    for i, record in enumerate(load_dataset(dataset_path, label_set)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        out = make_targets(record.document, record.segmentation, pattern, rng)
        lines.append(_dumps({
            "id": record.id,
            "output": serialize(out),
            "reduction": round(output_reduction(record.document, record.segmentation, out), 6),
        }))
    return "".join(line + "\n" for line in lines)


def perturb_command(
    candidate_path: Path,
    gold_path: Path,
    pattern: OutputPattern,
    label_set: LabelSet,
    steps: int = 1,
    end_marker: str = "<eos>",
) -> str:
    """Legal perturbation pool and best intermediate candidate per document."""
    gold = _by_id(load_dataset(gold_path, label_set))
    lines = []
    for doc_id, raw in load_outputs(candidate_path).items():
        record = gold.get(doc_id)
        if record is None:
            raise InputError(f"No gold segmentation for candidate {doc_id!r}")
        doc, seg = record.document, record.segmentation
        out = _parse_raw(raw, label_set, pattern, end_marker)
        if out is None:
            raise InputError(f"{doc_id}: candidate has no valid boundary line")
        cand = Candidate.build(doc, seg, out, label_set)
        pool = [
            {**p.as_dict(), "reward": round(Candidate.build(doc, seg, edited, label_set).reward, 6)}
            for p, edited in perturbation_pool(doc, cand.output, cand.recon, label_set)
        ]
        try:
            best, gain = best_intermediate(doc, cand, seg, label_set, steps=steps)
            chosen = {
                "output": serialize(best.output),
                "reward": round(best.reward, 6),
                "gain": round(gain, 6),
            }
        except NoPerturbations:
            chosen = None
        lines.append(_dumps({
            "id": doc_id,
            "reward": round(cand.reward, 6),
            "pool": pool,
            "chosen": chosen,
        }))
    return "".join(line + "\n" for line in lines)


def build_policy(
    name: str,
    records: Sequence[DatasetRecord],
    config: RolloutConfig,
    label_set: LabelSet,
    noise: int = _DEFAULT_NOISE,
    replay_path: Path | None = None,
    static_path: Path | None = None,
) -> Policy:
    """Instantiate a registered policy from command-line arguments."""
    policy_cls = PolicyRegistry().get(name)
    if policy_cls is NoisyOraclePolicy:
        return NoisyOraclePolicy(
            {r.id: r.segmentation for r in records},
            label_set=label_set,
            pattern=config.pattern,
            noise=noise,
            seed=config.seed,
            end_marker=config.end_marker,
        )
    if policy_cls is ReplayPolicy:
        if replay_path is None:
            raise InputError("The replay policy needs --replay FILE")
        return ReplayPolicy(replay_path)
    if policy_cls is StaticPolicy:
        if static_path is None:
            raise InputError("The static policy needs --static FILE")
        return StaticPolicy.from_file(static_path)
    raise InputError(f"Policy {name!r} cannot be built from the command line")


def rollout_sim_command(
    policy_name: str,
    iterations: int,
    label_set: LabelSet,
    config: RolloutConfig,
    dataset_path: Path | None = None,
    noise: int = _DEFAULT_NOISE,
    replay_path: Path | None = None,
    static_path: Path | None = None,
) -> str:
    """Run the rollout loop and return its SimulationReport as JSON lines.

    Without a dataset, a default synthetic corpus seeded by config.seed is used.
    """
    if dataset_path is not None:
        records = load_dataset(dataset_path, label_set)
    else:
        records = generate_synthetic_corpus(CorpusSpec(labels=label_set.names, seed=config.seed))
    policy = build_policy(policy_name, records, config, label_set, noise, replay_path, static_path)
    report = simulate(records, policy, config, iterations, label_set)
    return report.to_jsonl()


def gen_corpus_command(spec: CorpusSpec, out_path: Path | None = None) -> str:
    """Generate a corpus; write it to out_path, or return it for stdout."""
    records = generate_synthetic_corpus(spec)
    if out_path is None:
        return dumps_dataset(records)
    save_dataset(records, out_path)
    return ""


def _config_overrides(args: argparse.Namespace) -> dict:
    names = (
        "m", "temperature", "k", "batch_size", "enable_intermediate", "perturb_steps",
        "medium_mode", "end_marker", "pattern", "seed", "select_top_k", "workers",
        "gold_injection",
    )
    return {n: getattr(args, n) for n in names if getattr(args, n) is not None}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundseg",
        description="Boundary-generation structured text segmentation toolkit",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true",
        help="Enable verbose logging",
    )
    parser.add_argument(
        "--labels", default=None,
        help="Comma-separated label set (default: built-in labels)",
    )
    patterns = [p.value for p in OutputPattern]

    subparsers = parser.add_subparsers(dest="command")

    # reconstruct
    rec = subparsers.add_parser("reconstruct", help="Recover segments from boundary output")
    rec.add_argument("--pattern", choices=patterns, default=OutputPattern.START.value)
    rec.add_argument("--doc", type=Path, required=True, help="Plain-text document")
    rec.add_argument("--boundaries", type=Path, required=True, help="Boundary-output lines")
    rec.add_argument("--id", default=None, help="Document id (default: file stem)")

    # score
    score = subparsers.add_parser("score", help="Score predictions against gold")
    score.add_argument("--pred", type=Path, required=True, help="Predicted segmentations")
    score.add_argument("--gold", type=Path, required=True, help="Gold dataset")
    score.add_argument("--window", type=int, default=None, help="P_k window")
    score.add_argument(
        "--pattern", choices=patterns, default=None,
        help="Read --pred as raw boundary outputs in this pattern",
    )
    score.add_argument("--end-marker", default="<eos>")
    score.add_argument("--workers", type=int, default=1)

    # make-targets
    targets = subparsers.add_parser("make-targets", help="Synthesize boundary-output targets")
    targets.add_argument("--dataset", type=Path, required=True, help="Gold dataset")
    targets.add_argument("--pattern", choices=patterns, default=OutputPattern.START.value)
    targets.add_argument("--seed", type=int, default=0)

    # perturb
    perturb = subparsers.add_parser("perturb", help="Search intermediate candidates")
    perturb.add_argument("--candidate", type=Path, required=True, help="Raw boundary outputs")
    perturb.add_argument("--gold", type=Path, required=True, help="Gold dataset")
    perturb.add_argument("--pattern", choices=patterns, default=OutputPattern.START.value)
    perturb.add_argument("--steps", type=int, choices=(1, 2), default=1)
    perturb.add_argument("--end-marker", default="<eos>")

    # rollout-sim
    sim = subparsers.add_parser("rollout-sim", help="Simulate rollouts with a policy")
    sim.add_argument("--config", type=Path, default=None, help="TOML rollout config")
    sim.add_argument("--policy", choices=PolicyRegistry().names, default="noisy-oracle")
    sim.add_argument("--iterations", type=int, default=10)
    sim.add_argument("--dataset", type=Path, default=None, help="Gold dataset")
    sim.add_argument("--replay", type=Path, default=None, help="Recorded outputs for replay")
    sim.add_argument("--static", type=Path, default=None, help="Fixed outputs for the static policy")
    sim.add_argument("--noise", type=int, default=_DEFAULT_NOISE)
    sim.add_argument("--m", type=int)
    sim.add_argument("--temperature", type=float)
    sim.add_argument("--k", type=int)
    sim.add_argument("--batch-size", type=int)
    sim.add_argument("--enable-intermediate", action=argparse.BooleanOptionalAction)
    sim.add_argument("--perturb-steps", type=int)
    sim.add_argument("--medium-mode", choices=[mm.value for mm in MediumMode])
    sim.add_argument("--end-marker")
    sim.add_argument("--pattern", choices=patterns)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--select-top-k", action=argparse.BooleanOptionalAction)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--gold-injection", action=argparse.BooleanOptionalAction)

    # gen-corpus
    gen = subparsers.add_parser("gen-corpus", help="Generate a synthetic corpus")
    gen.add_argument("--spec", type=Path, default=None, help="TOML corpus spec")
    gen.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
    gen.add_argument("--n-docs", type=int, default=None)
    gen.add_argument("--seed", type=int, default=None)

    return parser


def _run(args: argparse.Namespace) -> str:
    label_set = LabelSet()
    if args.labels:
        label_set = LabelSet(tuple(n.strip() for n in args.labels.split(",")))

    if args.command == "reconstruct":
        return reconstruct_command(
            args.doc, args.boundaries, OutputPattern(args.pattern), label_set, args.id
        )
    if args.command == "score":
        pattern = OutputPattern(args.pattern) if args.pattern else None
        return score_command(
            args.pred, args.gold, label_set, args.window, pattern, args.end_marker, args.workers
        )
    if args.command == "make-targets":
        return make_targets_command(args.dataset, OutputPattern(args.pattern), label_set, args.seed)
    if args.command == "perturb":
        return perturb_command(
            args.candidate, args.gold, OutputPattern(args.pattern), label_set,
            args.steps, args.end_marker,
        )
    if args.command == "rollout-sim":
        base = RolloutConfig.from_file(args.config) if args.config else RolloutConfig()
        config = RolloutConfig.from_mapping(_config_overrides(args), base=base)
        return rollout_sim_command(
            args.policy, args.iterations, label_set, config,
            args.dataset, args.noise, args.replay, args.static,
        )
    # gen-corpus
    spec = CorpusSpec.from_file(args.spec) if args.spec else CorpusSpec()
    overrides = {"n_docs": args.n_docs, "seed": args.seed}
    if args.labels:
        overrides["labels"] = label_set.names
    spec = dataclasses.replace(spec, **{k: v for k, v in overrides.items() if v is not None})
    return gen_corpus_command(spec, args.out)


def main(argv: list[str] | None = None) -> int:
    """CLI entry point. Returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.WARNING)

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        output = _run(args)
    except InvariantViolation as e:
        print(_dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_INVARIANT
    except (BoundsegError, ValueError) as e:
        print(_dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_INPUT

    sys.stdout.write(output)
    return EXIT_OK
