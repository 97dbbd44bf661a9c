"""Command line entry point: ``cosigma {analyze,simulate,parse}``.

Settings come from an INI-style config file (``--config``); the
``[analyze]`` / ``[simulate]`` / ``[parse]`` section is read for the
matching subcommand, with ``[DEFAULT]`` shared.  Keys are the long flag
names without dashes prefix (``slice-years = 5``) and any flag given on the
command line overrides the file.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from cosigma import export
from cosigma.bib_ingest import ARTICLE, Corpus, filter_corpus, parse_export_file
from cosigma.cocite_graph import SelectionThreshold, TopN, Triple, build_network
from cosigma.errors import ConfigInvalidError, CosigmaError, EmptyCorpusError
from cosigma.growth_sim import GrowthConfig, Mechanism, compare_mechanisms, simulate
from cosigma.metrics import SELECTORS, BurstParams, compute_metrics, pearson_matrix, rank_candidates

logger = logging.getLogger("cosigma")

ANALYSIS_OUTPUTS = {
    "metrics": ("metrics.csv", export.METRICS_COLUMNS),
    "ranking": ("ranking.csv", export.RANKING_COLUMNS),
    "correlation": ("correlation.csv", [""] + export.CORRELATION_COLUMNS),
    "edges": ("edges.csv", export.EDGE_COLUMNS),
    "bursts": ("bursts.csv", export.BURST_COLUMNS),
}


@dataclass
class PipelineConfig:
    inputs: list[Path]
    out: Path
    doc_types: list[str] | None = field(default_factory=lambda: [ARTICLE])
    years: tuple[int, int] | None = None
    slice_years: int = 5
    threshold: SelectionThreshold = field(default_factory=lambda: TopN(30))
    burst: BurstParams = field(default_factory=BurstParams)
    normalization: str = "max"
    burst_mode: str = "total"
    rank_by: str = "sigma2"
    k: int = 10

    def validate(self) -> None:
        if not self.inputs:
            raise ConfigInvalidError("no input files")
        missing = [str(p) for p in self.inputs if not p.exists()]
        if missing:
            raise ConfigInvalidError(f"input files not found: {missing}")
        if self.k < 1:
            raise ConfigInvalidError("k must be >= 1")
        if self.slice_years < 1:
            raise ConfigInvalidError("slice-years must be >= 1")
        if self.rank_by not in SELECTORS:
            raise ConfigInvalidError(f"rank-by must be one of {SELECTORS}")
        if self.normalization not in ("max", "minmax"):
            raise ConfigInvalidError("normalization must be max or minmax")
        if self.burst_mode not in ("total", "strongest"):
            raise ConfigInvalidError("burst-mode must be total or strongest")

    def echo(self) -> dict:
        d = asdict(self)
        d["inputs"] = [str(p) for p in self.inputs]
        d["out"] = str(self.out)
        d["threshold"] = {"kind": type(self.threshold).__name__, **asdict(self.threshold)}
        return d


class _Outputs:
    """Tracks written files so a failed run can remove them."""

    def __init__(self, out: Path) -> None:
        self.out = out
        self.paths: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.out / name
        self.paths.append(p)
        return p

    def rollback(self) -> None:
        for p in self.paths:
            p.unlink(missing_ok=True)


def load_corpus(paths: Sequence[Path]) -> Corpus:
    records, issues, lost = [], [], 0
    for p in paths:
        c = parse_export_file(p.read_bytes())
        records.extend(c.records)
        issues.extend(f"{p.name}: {i}" for i in c.issues)
        lost += c.lost_refs
    return Corpus(records, issues, lost)


def run_analysis(cfg: PipelineConfig) -> dict:
    """Run ingest -> slicing -> network -> metrics -> exports. Returns the manifest."""
    cfg.validate()
    timings = {}
    t0 = time.perf_counter()
    raw = load_corpus(cfg.inputs)
    corpus = filter_corpus(raw, cfg.doc_types, cfg.years)
    corpus = Corpus(corpus.dated, corpus.issues, corpus.lost_refs)
    if not corpus.records:
        raise EmptyCorpusError("no records left after filtering")
    timings["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    net, slices = build_network(corpus, cfg.slice_years, cfg.threshold)
    net.check()
    if not net.nodes:
        raise EmptyCorpusError("no cited references pass the selection threshold")
    timings["network"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    metrics = compute_metrics(net, cfg.burst, cfg.normalization, cfg.burst_mode)
    ranked = rank_candidates(metrics, cfg.rank_by, cfg.k)
    corr = pearson_matrix(metrics, export.CORRELATION_COLUMNS) if len(metrics) >= 2 else None
    timings["metrics"] = time.perf_counter() - t0

    cfg.out.mkdir(parents=True, exist_ok=True)
    outs = _Outputs(cfg.out)
    try:
        export.write_metrics_csv(outs.path("metrics.csv"), metrics)
        export.write_ranking_csv(outs.path("ranking.csv"), ranked)
        if corr is None:
            n = len(export.CORRELATION_COLUMNS)
            corr = [[None] * n for _ in range(n)]
        export.write_correlation_csv(outs.path("correlation.csv"), corr)
        export.write_edges_csv(outs.path("edges.csv"), net)
        export.write_bursts_csv(outs.path("bursts.csv"), metrics)
        export.write_network_graphml(outs.path("network.graphml"), net)
        with open(outs.path("corpus.ndjson"), "w", encoding="utf-8") as fh:
            corpus.dump_ndjson(fh)
        for name, header in ANALYSIS_OUTPUTS.values():
            got = export.read_csv_header(cfg.out / name)
            if got != header:
                raise CosigmaError(f"{name}: header {got} != {header}")
        manifest = {
            "command": "analyze",
            "config": cfg.echo(),
            "corpus": {**corpus.stats(), "records_parsed": len(raw)},
            "parse_loss": {"malformed_records": len(raw.issues), "unparseable_refs": raw.lost_refs,
                           "issues": raw.issues},
            "network": {"slices": [str(s.slices[0]) for s in slices],
                        "slice_sizes": [[len(s.nodes), len(s.edges)] for s in slices],
                        "nodes": len(net.nodes), "edges": len(net.edges)},
            "timings_s": timings,
            "outputs": sorted(p.name for p in outs.paths) + ["manifest.json"],
        }
        with open(outs.path("manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
    except BaseException:
        outs.rollback()
        raise
    return manifest


@dataclass
class SimulationConfig:
    base: GrowthConfig
    mechanisms: list[Mechanism]
    runs: int
    out: Path

    def validate(self) -> None:
        if self.runs < 1:
            raise ConfigInvalidError("runs must be >= 1")
        if not 1 <= len(self.mechanisms) <= 2:
            raise ConfigInvalidError("give one mechanism, or two to compare")
        for m in self.mechanisms:
            GrowthConfig(**{**asdict(self.base), "mechanism": m}).validate()


def run_simulation(cfg: SimulationConfig) -> dict:
    cfg.validate()
    cfg.out.mkdir(parents=True, exist_ok=True)
    outs = _Outputs(cfg.out)
    t0 = time.perf_counter()
    try:
        if len(cfg.mechanisms) == 2:
            a = GrowthConfig(**{**asdict(cfg.base), "mechanism": cfg.mechanisms[0]})
            b = GrowthConfig(**{**asdict(cfg.base), "mechanism": cfg.mechanisms[1]})
            summary = compare_mechanisms(a, b, cfg.runs)
            per_run = list(zip(summary.results_a, summary.results_b))
        else:
            summary = None
            per_run = []
            for i in range(cfg.runs):
                seed = (cfg.base.rng_seed + i) % 2**64
                per_run.append((simulate(GrowthConfig(**{**asdict(cfg.base), "mechanism": cfg.mechanisms[0],
                                                        "rng_seed": seed})),))
        fh, w = export._writer(outs.path("nodes.csv"))
        with fh:
            w.writerow(export.SIM_COLUMNS)
            for run, results in enumerate(per_run):
                for res in results:
                    for a in res.added:
                        w.writerow([run, a.mechanism.value, a.node, a.step, a.degree, export.fmt(a.centrality)])
        for run, results in enumerate(per_run):
            for res in results:
                name = f"network_run{run:03d}_{res.config.mechanism.value}.graphml"
                export.write_sim_graphml(outs.path(name), res.adjacency, res.community)
        manifest = {
            "command": "simulate",
            "config": {**asdict(cfg.base), "mechanisms": [m.value for m in cfg.mechanisms],
                       "runs": cfg.runs, "out": str(cfg.out)},
        }
        manifest["config"].pop("mechanism")
        if summary is not None:
            fh, w = export._writer(outs.path("summary.csv"))
            with fh:
                w.writerow(export.SUMMARY_COLUMNS)
                for r in summary.runs:
                    w.writerow([r.run, summary.mechanism_a.value, summary.mechanism_b.value,
                                export.fmt(r.median_a), export.fmt(r.median_b), export.fmt(r.ratio)])
            manifest["comparison"] = {"median_ratio": summary.median_ratio, "wins_a": summary.wins_a,
                                      "runs": cfg.runs}
        manifest["timings_s"] = {"simulate": time.perf_counter() - t0}
        manifest["outputs"] = sorted(p.name for p in outs.paths) + ["manifest.json"]
        with open(outs.path("manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
    except BaseException:
        outs.rollback()
        raise
    return manifest


# -- argument / config plumbing ---------------------------------------------

def _read_config(path: str | None, section: str) -> dict[str, str]:
    if not path:
        return {}
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise ConfigInvalidError(f"cannot read config file {path}")
    base = Path(path).resolve().parent
    values = dict(cp[section]) if cp.has_section(section) else dict(cp.defaults())
    if "input" in values:
        values["input"] = ",".join(str(base / p.strip()) for p in values["input"].split(",") if p.strip())
    if "out" in values:
        values["out"] = str(base / values["out"])
    return values


def _settings(args: argparse.Namespace, section: str) -> dict[str, str]:
    settings = _read_config(args.config, section)
    cli = {k.replace("_", "-"): v for k, v in vars(args).items()
           if v is not None and k not in ("command", "config", "verbose", "func")}
    if "threshold" in cli:
        settings.pop("top-n", None)
    if "top-n" in cli:
        settings.pop("threshold", None)
    if "input" in cli:
        cli["input"] = ",".join(cli["input"])
    settings.update({k: str(v) for k, v in cli.items()})
    return settings


def _years(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def _pipeline_config(s: dict[str, str]) -> PipelineConfig:
    try:
        if "top-n" in s:
            threshold: SelectionThreshold = TopN(int(s["top-n"]))
        elif "threshold" in s:
            threshold = Triple.parse(s["threshold"])
        else:
            threshold = TopN(30)
        doc_types = s.get("doc-types", ARTICLE)
        return PipelineConfig(
            inputs=[Path(p.strip()) for p in s.get("input", "").split(",") if p.strip()],
            out=Path(s.get("out", "cosigma_out")),
            doc_types=None if doc_types.lower() == "all" else [d.strip() for d in doc_types.split(",")],
            years=_years(s["years"]) if "years" in s else None,
            slice_years=int(s.get("slice-years", 5)),
            threshold=threshold,
            burst=BurstParams(float(s.get("burst-s", 2.0)), float(s.get("burst-gamma", 1.0))),
            normalization=s.get("normalization", "max"),
            burst_mode=s.get("burst-mode", "total"),
            rank_by=s.get("rank-by", "sigma2"),
            k=int(s.get("k", 10)),
        )
    except ValueError as exc:
        raise ConfigInvalidError(str(exc)) from exc


def _simulation_config(s: dict[str, str]) -> SimulationConfig:
    try:
        mechs = [Mechanism.parse(m) for m in s.get("mechanisms", "brokerage,preferential").split(",")]
        base = GrowthConfig(
            mechanism=mechs[0],
            seed_communities=int(s.get("seed-communities", 4)),
            seed_size=int(s.get("seed-size", 10)),
            intra_p=float(s.get("intra-p", 0.6)),
            steps=int(s.get("steps", 30)),
            links_per_node=int(s.get("links-per-node", 2)),
            rng_seed=int(s.get("rng-seed", 0)),
        )
        return SimulationConfig(base, mechs, int(s.get("runs", 1)), Path(s.get("out", "cosigma_sim")))
    except ValueError as exc:
        raise ConfigInvalidError(str(exc)) from exc


def _cmd_analyze(args: argparse.Namespace) -> dict:
    return run_analysis(_pipeline_config(_settings(args, "analyze")))


def _cmd_simulate(args: argparse.Namespace) -> dict:
    return run_simulation(_simulation_config(_settings(args, "simulate")))


def _cmd_parse(args: argparse.Namespace) -> dict:
    s = _settings(args, "parse")
    paths = [Path(p.strip()) for p in s.get("input", "").split(",") if p.strip()]
    if not paths:
        raise ConfigInvalidError("no input files")
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise ConfigInvalidError(f"input files not found: {missing}")
    corpus = load_corpus(paths)
    if "out" in s:
        with open(s["out"], "w", encoding="utf-8") as fh:
            corpus.dump_ndjson(fh)
    else:
        corpus.dump_ndjson(sys.stdout)
    return {"command": "parse", "corpus": corpus.stats(),
            "parse_loss": {"malformed_records": len(corpus.issues), "unparseable_refs": corpus.lost_refs}}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cosigma", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--out", help="output directory (parse: output file)")

    a = sub.add_parser("analyze", parents=[common], help="full pipeline on field-tagged exports")
    a.add_argument("--input", action="append", help="export file; repeatable")
    a.add_argument("--slice-years", type=int)
    a.add_argument("--threshold", help="c,cc,ccv selection triple, e.g. 3,3,20")
    a.add_argument("--top-n", type=int, help="keep the N most cited refs per slice")
    a.add_argument("--burst-s", type=float)
    a.add_argument("--burst-gamma", type=float)
    a.add_argument("--burst-mode", choices=["total", "strongest"])
    a.add_argument("--normalization", choices=["max", "minmax"])
    a.add_argument("--rank-by", choices=list(SELECTORS))
    a.add_argument("--k", type=int, help="number of ranked candidates")
    a.add_argument("--doc-types", help="comma list, or 'all' (default Article)")
    a.add_argument("--years", help="inclusive range, e.g. 1985-2007")
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("simulate", parents=[common], help="growth simulator")
    s.add_argument("--mechanisms", help="brokerage, preferential or uniform; two to compare")
    s.add_argument("--seed-communities", type=int)
    s.add_argument("--seed-size", type=int)
    s.add_argument("--intra-p", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--links-per-node", type=int)
    s.add_argument("--rng-seed", type=int)
    s.add_argument("--runs", type=int)
    s.set_defaults(func=_cmd_simulate)

    r = sub.add_parser("parse", parents=[common], help="parse exports to normalized NDJSON")
    r.add_argument("--input", action="append")
    r.set_defaults(func=_cmd_parse)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except CosigmaError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    summary = {k: v for k, v in result.items() if k in ("command", "corpus", "network", "comparison")}
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
