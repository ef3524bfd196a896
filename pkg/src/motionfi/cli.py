"""Command-line surface: simulate, count, train, classify, eval.

Every command is a pure function of its input files, flags, and the seed;
reruns produce byte-identical outputs. All randomness flows from the one
``--seed`` flag (or the scene's own seed for simulation), fanned out to
subsystems through labeled seed derivation.
"""
from __future__ import annotations

import argparse
import io as _stringio
import sys
import zlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .dsp import Envelope, FilterSpec, energy, lowpass
from .errors import InputError, MotionFiError
from .evaluate import cross_validate
from .features import extract_features
from .io import (
    SCHEMA_VERSION,
    load_model,
    load_scene,
    read_dataset,
    read_trace,
    save_model,
    write_json,
    read_json,
    write_trace,
    atomic_write_text,
)
from .segmenter import SegmenterConfig, count_error_ratio, segment_motions
from .svm import train
from .voting import VoteConfig, vote


def subsystem_seed(root: int, label: str) -> int:
    """Stable per-subsystem seed derived from the root seed and a label."""
    tag = zlib.crc32(label.encode())
    return int(np.random.SeedSequence([root, tag]).generate_state(1)[0])


def _merge(flag_value, config_section: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config_section:
        return config_section[key]
    return default


def _require_option(value, name: str):
    if value is None:
        raise InputError(f"{name} is required (flag or config file)")
    return value


class PipelineOptions:
    """Filter, segmenter, and voting options resolved from flags + config."""

    def __init__(self, args):
        config = read_json(args.config) if args.config else {}
        filt = config.get("filter", {})
        seg = config.get("segmenter", {})
        vote_cfg = config.get("vote", {})
        self.filter_spec = FilterSpec(
            cutoff_hz=float(_merge(getattr(args, "cutoff_hz", None), filt, "cutoff_hz", 10.0)),
            taps=int(_merge(getattr(args, "taps", None), filt, "taps", 101)),
        )
        self.t_min_s = _merge(getattr(args, "t_min_s", None), seg, "t_min_s", None)
        self.t_max_s = _merge(getattr(args, "t_max_s", None), seg, "t_max_s", None)
        self.template_len = _merge(getattr(args, "template_len", None), seg, "template_len", None)
        self.conv_threshold = _merge(
            getattr(args, "conv_threshold", None), seg, "conv_threshold", None
        )
        self.max_iter = int(_merge(getattr(args, "max_iter", None), seg, "max_iter", 50))
        self.vote_k = int(_merge(getattr(args, "k", None), vote_cfg, "k", 3))
        self.seed = args.seed

    def segmenter_config(self, sample_rate: float) -> SegmenterConfig:
        return SegmenterConfig(
            t_min_s=float(_require_option(self.t_min_s, "t_min_s")),
            t_max_s=float(_require_option(self.t_max_s, "t_max_s")),
            sample_rate=sample_rate,
            template_len=None if self.template_len is None else int(self.template_len),
            convergence_threshold=None
            if self.conv_threshold is None
            else float(self.conv_threshold),
            max_iterations=self.max_iter,
        )

    def config_dict(self) -> dict:
        return {
            "filter": {"cutoff_hz": self.filter_spec.cutoff_hz, "taps": self.filter_spec.taps},
            "segmenter": {
                "t_min_s": self.t_min_s,
                "t_max_s": self.t_max_s,
                "template_len": self.template_len,
                "conv_threshold": self.conv_threshold,
                "max_iter": self.max_iter,
            },
            "vote": {"k": self.vote_k},
        }


def _filtered_envelope(trace, spec: FilterSpec) -> Envelope:
    return lowpass(energy(trace), spec)


def _count_one(trace_path: Path, options: PipelineOptions):
    trace = read_trace(trace_path)
    raw = energy(trace)
    filtered = lowpass(raw, options.filter_spec)
    config = options.segmenter_config(trace.sample_rate)
    result = segment_motions(filtered.samples, config)

    truth = trace.ground_truth
    truth_count = truth.n_cycles if truth and truth.n_cycles > 0 else None
    report = {
        "schema_version": SCHEMA_VERSION,
        "seed": options.seed,
        "source": trace_path.name,
        "count": result.count,
        "boundaries": [int(b) for b in result.segmentation.boundaries],
        "converged": result.converged,
        "iterations": result.iterations,
        "per_iteration_costs": list(result.per_iteration_costs),
        "total_cost": result.segmentation.total_cost,
        "ground_truth_count": truth_count,
        "error_ratio_pct": None
        if truth_count is None
        else count_error_ratio(result.count, truth_count),
        "config": options.config_dict(),
    }
    return report, raw, filtered, result


def _plot_csv(raw: Envelope, filtered: Envelope, boundaries) -> str:
    marks = np.zeros(len(raw), dtype=np.int64)
    for b in boundaries:
        if b < len(raw):
            marks[b] = 1
    buf = _stringio.StringIO()
    buf.write("t,raw,filtered,boundary\n")
    fs = raw.sample_rate
    for k in range(len(raw)):
        buf.write(f"{k / fs!r},{raw.samples[k]!r},{filtered.samples[k]!r},{marks[k]}\n")
    return buf.getvalue()


def _majority(labels: list[str], seed: int) -> str:
    counts = Counter(labels)
    top = max(counts.values())
    tied = [label for label in dict.fromkeys(labels) if counts[label] == top]
    if len(tied) == 1:
        return tied[0]
    rng = np.random.default_rng(seed)
    return tied[int(rng.integers(len(tied)))]


def _classify_one(trace_path: Path, model, options: PipelineOptions):
    trace = read_trace(trace_path)
    filtered = _filtered_envelope(trace, options.filter_spec)
    config = options.segmenter_config(trace.sample_rate)
    result = segment_motions(filtered.samples, config)

    segments = list(result.segmentation.segments(filtered.samples))
    rows = np.vstack([extract_features(seg).to_array() for seg in segments])
    labels = model.predict(rows)

    k = options.vote_k
    windows = []
    fallback = False
    if len(labels) < k:
        fallback = True
        seed = subsystem_seed(options.seed, f"vote/{trace_path.name}/0")
        windows.append(
            {"segments": list(range(len(labels))), "label": _majority(labels, seed), "partial": True}
        )
    else:
        for w, start in enumerate(range(0, len(labels), k)):
            chunk = labels[start : start + k]
            seed = subsystem_seed(options.seed, f"vote/{trace_path.name}/{w}")
            if len(chunk) == k:
                label = vote(chunk, VoteConfig(k=k, seed=seed))
                partial = False
            else:
                label = _majority(chunk, seed)
                partial = True
                fallback = True
            windows.append(
                {"segments": list(range(start, start + len(chunk))), "label": label, "partial": partial}
            )

    truth = trace.ground_truth
    report = {
        "schema_version": SCHEMA_VERSION,
        "seed": options.seed,
        "source": trace_path.name,
        "count": result.count,
        "segment_labels": labels,
        "votes": windows,
        "vote_k": k,
        "fallback": fallback,
        "ground_truth_label": truth.label if truth else None,
        "config": options.config_dict(),
    }
    return report


def _input_traces(path_arg: str) -> list[Path]:
    path = Path(path_arg)
    if path.is_dir():
        traces = sorted(path.glob("*.csv"))
        if not traces:
            raise InputError(f"{path}: no .csv traces found")
        return traces
    return [path]


def _run_many(paths, worker):
    if len(paths) == 1:
        return [worker(paths[0])]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(worker, paths))


def cmd_simulate(args) -> int:
    scene = load_scene(args.scene)
    from .backscatter import synth_trace

    trace = synth_trace(scene, duration=args.duration)
    out = Path(args.out)
    csv_path = out if out.suffix == ".csv" else out.with_suffix(".csv")
    write_trace(csv_path, trace, seed=scene.rng_seed)
    print(f"wrote {csv_path} ({len(trace)} samples, {trace.ground_truth.n_cycles} cycles)")
    return 0


def cmd_count(args) -> int:
    options = PipelineOptions(args)
    paths = _input_traces(args.trace)
    multi = len(paths) > 1

    def worker(trace_path: Path):
        report, raw, filtered, result = _count_one(trace_path, options)
        if multi:
            out_dir = Path(args.out)
            report_path = out_dir / f"{trace_path.stem}.report.json"
        else:
            report_path = Path(args.out)
        write_json(report_path, report)
        if args.plot:
            if multi:
                plot_path = Path(args.plot) / f"{trace_path.stem}.plot.csv"
            else:
                plot_path = Path(args.plot)
            atomic_write_text(plot_path, _plot_csv(raw, filtered, result.segmentation.boundaries))
        return report

    for report in _run_many(paths, worker):
        ratio = report["error_ratio_pct"]
        suffix = "" if ratio is None else f" (error ratio {ratio:+.2f}%)"
        print(f"{report['source']}: count={report['count']}{suffix}")
    return 0


def cmd_train(args) -> int:
    dataset = read_dataset(args.dataset)
    model = train(dataset, c_reg=args.c_reg)
    predicted = model.predict(dataset.features)
    accuracy = float(np.mean([p == t for p, t in zip(predicted, dataset.labels)]))
    model.metadata["training_accuracy"] = accuracy
    save_model(args.out, model)
    print(f"wrote {args.out} ({len(model.classes)} classes, training accuracy {accuracy:.4f})")
    return 0


def cmd_classify(args) -> int:
    options = PipelineOptions(args)
    model = load_model(args.model)
    paths = _input_traces(args.trace)
    multi = len(paths) > 1

    def worker(trace_path: Path):
        report = _classify_one(trace_path, model, options)
        if multi:
            report_path = Path(args.out) / f"{trace_path.stem}.report.json"
        else:
            report_path = Path(args.out)
        write_json(report_path, report)
        return report

    for report in _run_many(paths, worker):
        voted = ",".join(w["label"] for w in report["votes"])
        print(f"{report['source']}: segments={report['count']} voted=[{voted}]")
    return 0


def cmd_eval(args) -> int:
    dataset = read_dataset(args.dataset)
    fold_seed = subsystem_seed(args.seed, "folds")
    report = cross_validate(dataset, n_folds=args.folds, c_reg=args.c_reg, seed=fold_seed)
    payload = {"schema_version": SCHEMA_VERSION, "seed": args.seed, "c_reg": args.c_reg}
    payload.update(report.to_dict())

    if args.traces:
        options = PipelineOptions(args)
        ratios = []
        for trace_path in _input_traces(args.traces):
            count_report, _, _, _ = _count_one(trace_path, options)
            if count_report["error_ratio_pct"] is not None:
                ratios.append(count_report["error_ratio_pct"])
        payload["counting_error_ratios"] = ratios

    write_json(args.out, payload)
    print(f"wrote {args.out} (accuracy {payload['accuracy']:.4f} over {args.folds} folds)")
    return 0


def _add_filter_flags(sub):
    sub.add_argument("--cutoff-hz", type=float, default=None, help="low-pass cutoff (Hz)")
    sub.add_argument("--taps", type=int, default=None, help="low-pass tap count (odd)")


def _add_segmenter_flags(sub):
    sub.add_argument("--t-min-s", type=float, default=None, help="minimum cycle duration (s)")
    sub.add_argument("--t-max-s", type=float, default=None, help="maximum cycle duration (s)")
    sub.add_argument("--template-len", type=int, default=None, help="template length (samples)")
    sub.add_argument("--conv-threshold", type=float, default=None, help="convergence threshold")
    sub.add_argument("--max-iter", type=int, default=None, help="maximum alternation rounds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motionfi",
        description="Simulate backscatter traces, count repetitions, classify motions.",
    )
    parser.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    parser.add_argument("--config", default=None, help="JSON config with filter/segmenter/vote sections")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", help="synthesize a trace from a scene file")
    sim.add_argument("scene", help="scene JSON path")
    sim.add_argument("--duration", type=float, default=None, help="trace length (s); default: exact cycles")
    sim.add_argument("--out", required=True, help="output trace path (.csv; sidecar .json)")
    sim.set_defaults(handler=cmd_simulate)

    cnt = commands.add_parser("count", help="count repetitions in a trace or directory")
    cnt.add_argument("trace", help="trace CSV or directory of traces")
    _add_filter_flags(cnt)
    _add_segmenter_flags(cnt)
    cnt.add_argument("--out", required=True, help="report JSON path (directory in batch mode)")
    cnt.add_argument("--plot", default=None, help="plot CSV path (directory in batch mode)")
    cnt.set_defaults(handler=cmd_count)

    trn = commands.add_parser("train", help="train the one-vs-one cubic SVM")
    trn.add_argument("dataset", help="feature CSV path")
    trn.add_argument("--c-reg", type=float, default=1.0, help="regularization parameter")
    trn.add_argument("--out", required=True, help="model JSON path")
    trn.set_defaults(handler=cmd_train)

    cls = commands.add_parser("classify", help="label the segments of a trace")
    cls.add_argument("trace", help="trace CSV or directory of traces")
    cls.add_argument("--model", required=True, help="model JSON path")
    _add_filter_flags(cls)
    _add_segmenter_flags(cls)
    cls.add_argument("--k", type=int, default=None, help="votes per decision (odd)")
    cls.add_argument("--out", required=True, help="report JSON path (directory in batch mode)")
    cls.set_defaults(handler=cmd_classify)

    evl = commands.add_parser("eval", help="stratified cross-validation report")
    evl.add_argument("dataset", help="feature CSV path")
    evl.add_argument("--folds", type=int, default=10, help="fold count")
    evl.add_argument("--c-reg", type=float, default=1.0, help="regularization parameter")
    evl.add_argument("--traces", default=None, help="directory of traces for counting error ratios")
    _add_filter_flags(evl)
    _add_segmenter_flags(evl)
    evl.set_defaults(handler=cmd_eval)
    evl.add_argument("--out", required=True, help="report JSON path")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except MotionFiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FloatingPointError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
