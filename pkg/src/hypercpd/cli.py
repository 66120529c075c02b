"""Command-line entry point: ``hypercpd generate|detect|eval|spectrum``.

Every subcommand accepts ``--config FILE`` holding ``key = value`` lines
whose keys are the :class:`RunConfig` field names; explicit flags win over
the file. Errors are reported as one JSON object on stderr with a nonzero
exit status.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import evalharness, ingest, lad, pipeline, spectral, synthgen

logger = logging.getLogger("hypercpd")


@dataclass
class RunConfig:
    method: str = pipeline.CB_GADGET
    k: int = 100
    window: int = 20
    fraction: float = 0.03
    count: int | None = None
    convention: str = lad.CHANGE_MAX
    largest_component: str = "auto"
    laplacian: str = "combinatorial"
    tolerance: int = 2
    seed: int = 0
    datasets: int = 50
    num_snapshots: int = 150
    edges_per_snapshot: int = 120
    p_in: float = 0.9
    reassign_fraction: float = 0.2
    new_cluster_fraction: float = 0.2
    workers: int = 1
    start: int | None = None
    end: int | None = None
    min_records: int = 0
    top_n: int | None = None
    window_len: int = 10

    def validate(self) -> None:
        if self.k < 1 or self.window < 1:
            raise ValueError("k and window must be at least 1")
        if self.method not in pipeline.METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(pipeline.METHODS)}")
        if self.convention not in lad.CHANGE_CONVENTIONS:
            raise ValueError(f"unknown change-score convention {self.convention!r}")
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")

    def spectrum_options(self) -> pipeline.SpectrumOptions:
        return pipeline.SpectrumOptions(self.method, self.k, self.largest_component, self.laplacian)

    def scenario(self) -> synthgen.ScenarioConfig:
        base = synthgen.default_scenario(self.seed)
        return dataclasses.replace(
            base,
            num_snapshots=self.num_snapshots,
            edges_per_snapshot=self.edges_per_snapshot,
            p_in=self.p_in,
            reassign_fraction=self.reassign_fraction,
            new_cluster_fraction=self.new_cluster_fraction,
        )


_FIELD_TYPES = {"int": int, "float": float, "str": str}


def _coerce(name: str, raw: str):
    f = {f.name: f for f in fields(RunConfig)}.get(name)
    if f is None:
        raise ValueError(f"unknown config key {name!r}")
    raw = raw.strip()
    if raw.lower() in ("", "none", "null"):
        return None
    base = str(f.type).split("|")[0].strip()
    return _FIELD_TYPES[base](raw)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = _coerce(key.replace("-", "_"), value)
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _header_meta(cfg: RunConfig, **extra) -> dict:
    return {"config": dataclasses.asdict(cfg), **extra}


def _write_meta(path: Path, meta: dict) -> None:
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def dataset_name(index: int) -> str:
    return f"dataset_{index:03d}"


# -- generate ----------------------------------------------------------------

def cmd_generate(cfg: RunConfig, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    written = []
    for i in range(cfg.datasets):
        snaps, truth = synthgen.generate_sequence(scenario, i)
        stem = out_dir / dataset_name(i)
        ingest.write_jsonl(stem.with_suffix(".jsonl"), synthgen.sequence_records(snaps))
        truth_path = stem.with_suffix(".truth.json")
        truth_json = truth.to_json()
        truth_json["seed"] = [cfg.seed, i]
        truth_path.write_text(json.dumps(truth_json) + "\n", encoding="utf-8")
        written.append(stem.with_suffix(".jsonl"))
    return written


# -- detect / spectrum ---------------------------------------------------------

def load_sequence(path, cfg: RunConfig) -> ingest.SnapshotSequence:
    records = ingest.read_jsonl(path)
    if cfg.min_records:
        records = ingest.filter_active_times(records, cfg.min_records)
    if cfg.top_n:
        records = ingest.filter_top_entities(records, cfg.top_n, cfg.window_len)
    if not records:
        raise ValueError(f"{path}: no usable records")
    start = cfg.start if cfg.start is not None else min(r.t for r in records)
    end = cfg.end if cfg.end is not None else max(r.t for r in records)
    return ingest.window_snapshots(records, start, end)


def compute_spectra(seq: ingest.SnapshotSequence, cfg: RunConfig):
    opts = cfg.spectrum_options()
    spectra = pipeline.sequence_spectra(seq.snapshots, opts, cfg.workers, seq.times)
    return spectra, pipeline.effective_k(opts, len(seq.universe))


def write_scores_csv(path, result: pipeline.DetectionResult) -> None:
    predicted = set(result.predicted)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["t", "Z", "Zhat", "is_predicted_change"])
        for t, z, zh in zip(result.times, result.z, result.zhat):
            w.writerow([t, repr(float(z)), repr(float(zh)), int(t in predicted)])


def read_scores_csv(path) -> tuple[list[int], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [int(r["t"]) for r in rows], np.array([float(r["Zhat"]) for r in rows])


def cmd_detect(cfg: RunConfig, input_path: Path, out_path: Path) -> pipeline.DetectionResult:
    seq = load_sequence(input_path, cfg)
    spectra, k = compute_spectra(seq, cfg)
    result = pipeline.detect(
        spectra, k, cfg.window, cfg.convention,
        fraction=cfg.fraction, count=cfg.count, times=seq.times,
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_scores_csv(out_path, result)
    _write_meta(
        out_path.with_suffix(".meta.json"),
        _header_meta(cfg, input=input_path.name, k_effective=k,
                     empty_snapshots=[t for t, e in zip(seq.times, seq.empty) if e],
                     eigen_seed=spectral.EIGEN_SEED),
    )
    return result


def cmd_spectrum(cfg: RunConfig, input_path: Path, out_path: Path) -> None:
    seq = load_sequence(input_path, cfg)
    spectra, k = compute_spectra(seq, cfg)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    spectral.write_spectra_csv(out_path, seq.times, [spectral.pad_spectrum(s, k) for s in spectra])


# -- eval ----------------------------------------------------------------------

def cmd_eval(cfg: RunConfig, scores_dir: Path, truth_dir: Path, out_path: Path,
             breakdown: Path | None = None) -> evalharness.EvaluationReport:
    """Score every ``<dataset>.<method>.csv`` against ``<dataset>.truth.json``."""
    report = evalharness.EvaluationReport()
    files = sorted(scores_dir.glob("*.csv"))
    if not files:
        raise FileNotFoundError(f"no score files in {scores_dir}")
    by_method: dict[str, list[tuple[str, Path]]] = {}
    for f in files:
        dataset, _, method = f.stem.partition(".")
        if method not in pipeline.METHODS:
            continue
        by_method.setdefault(method, []).append((dataset, f))
    if not by_method:
        raise FileNotFoundError(f"no <dataset>.<method>.csv files in {scores_dir}")
    for method in [m for m in pipeline.METHODS if m in by_method]:
        for dataset, f in by_method[method]:
            truth_path = truth_dir / f"{dataset}.truth.json"
            if not truth_path.exists():
                raise FileNotFoundError(f"missing ground truth {truth_path}")
            truth = json.loads(truth_path.read_text(encoding="utf-8"))["changes"]
            times, zhat = read_scores_csv(f)
            # scores are indexed by position; map truth times onto positions
            pos = {t: i for i, t in enumerate(times)}
            truth_idx = [pos[t] for t in truth if t in pos]
            scores = evalharness.score_run(zhat, truth_idx, cfg.fraction, cfg.count, tol=cfg.tolerance)
            report.add(method, dataset, scores)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    report.write_table(out_path)
    if breakdown is not None:
        report.write_breakdown(breakdown)
    return report


# -- argument parsing ----------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file mirroring RunConfig")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


def _add_detect_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=pipeline.METHODS)
    p.add_argument("--k", type=int, help="embedding size (ignored for clique)")
    p.add_argument("--window", type=int, help="LAD context window")
    p.add_argument("--fraction", type=float)
    p.add_argument("--count", type=int, help="predict exactly this many change points")
    p.add_argument("--convention", choices=lad.CHANGE_CONVENTIONS)
    p.add_argument("--largest-component", dest="largest_component", choices=("auto", "on", "off"))
    p.add_argument("--laplacian", choices=("combinatorial", "normalized"))
    p.add_argument("--start", type=int)
    p.add_argument("--end", type=int)
    p.add_argument("--min-records", dest="min_records", type=int)
    p.add_argument("--top-n", dest="top_n", type=int)
    p.add_argument("--window-len", dest="window_len", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercpd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write synthetic benchmark datasets")
    _add_common(g)
    g.add_argument("--out", type=Path, required=True, help="output directory")
    g.add_argument("--datasets", type=int)
    g.add_argument("--num-snapshots", dest="num_snapshots", type=int)
    g.add_argument("--edges-per-snapshot", dest="edges_per_snapshot", type=int)
    g.add_argument("--p-in", dest="p_in", type=float)
    g.add_argument("--reassign-fraction", dest="reassign_fraction", type=float)
    g.add_argument("--new-cluster-fraction", dest="new_cluster_fraction", type=float)

    d = sub.add_parser("detect", help="score change points for one or many datasets")
    _add_common(d)
    _add_detect_opts(d)
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="temporal hyperedge JSONL (.gz ok)")
    src.add_argument("--input-dir", type=Path, help="directory of *.jsonl datasets")
    d.add_argument("--out", type=Path, required=True,
                   help="score CSV (with --input) or output directory (with --input-dir)")
    d.add_argument("--methods", help="comma-separated methods for --input-dir runs")

    e = sub.add_parser("eval", help="aggregate detection scores into a comparison table")
    _add_common(e)
    e.add_argument("--scores-dir", type=Path, required=True)
    e.add_argument("--truth-dir", type=Path, required=True)
    e.add_argument("--out", type=Path, required=True)
    e.add_argument("--breakdown", type=Path, help="optional per-dataset CSV")
    e.add_argument("--fraction", type=float)
    e.add_argument("--count", type=int)
    e.add_argument("--tolerance", type=int)

    s = sub.add_parser("spectrum", help="dump per-snapshot spectra as CSV")
    _add_common(s)
    _add_detect_opts(s)
    s.add_argument("--input", type=Path, required=True)
    s.add_argument("--out", type=Path, required=True)
    return parser


def run(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.command == "generate":
        paths = cmd_generate(cfg, args.out)
        logger.info("wrote %d datasets to %s", len(paths), args.out)
    elif args.command == "detect":
        if args.input is not None:
            cmd_detect(cfg, args.input, args.out)
        else:
            methods = args.methods.split(",") if args.methods else [cfg.method]
            inputs = sorted(args.input_dir.glob("*.jsonl")) + sorted(args.input_dir.glob("*.jsonl.gz"))
            if not inputs:
                raise FileNotFoundError(f"no *.jsonl files in {args.input_dir}")
            for path in inputs:
                stem = path.name.split(".")[0]
                for m in methods:
                    mcfg = dataclasses.replace(cfg, method=m.strip())
                    mcfg.validate()
                    cmd_detect(mcfg, path, args.out / f"{stem}.{mcfg.method}.csv")
    elif args.command == "eval":
        cmd_eval(cfg, args.scores_dir, args.truth_dir, args.out, args.breakdown)
    elif args.command == "spectrum":
        cmd_spectrum(cfg, args.input, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except Exception as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
