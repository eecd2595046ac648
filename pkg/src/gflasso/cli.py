"""Command-line entry point: ``gflasso {simulate,graph,fit,evaluate,experiment}``.

Every command writes ``manifest.json`` into its output directory with the
resolved settings. Exit codes: 0 success, 2 bad configuration or input
content, 3 unreadable or unwritable files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from gflasso import __version__
from gflasso.baselines import ridge, single_marker
from gflasso.data import (CoefficientMatrix, load_coefficients, load_matrix, save_matrix, write_tsv)
from gflasso.errors import ConfigurationError, GFlassoError, ParseError
from gflasso.estimator import FitConfig, FitSpec, build_qp, fit
from gflasso.evaluation import count_nonzero, prediction_error, roc, write_records
from gflasso.experiment import Protocol, run_protocol, write_outputs
from gflasso.graph import TraitGraph, build_graph, read_edges, write_edges
from gflasso.qp import dump_qp
from gflasso.selection import SearchConfig, select_and_fit
from gflasso.simulation import SimulationSpec, simulate

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _budget(text: str) -> float:
    v = float(text)
    if math.isnan(v) or v < 0:
        raise argparse.ArgumentTypeError(f"budget must be >= 0 or inf, got {text}")
    return v


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--config", default=None, help="JSON file of defaults; flags override it")

    p = argparse.ArgumentParser(prog="gflasso", description="Graph-guided fused lasso for multi-trait association.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate a genotype/phenotype dataset")
    s.add_argument("--spec", default=None, help="simulation spec JSON")

    g = sub.add_parser("graph", parents=[common], help="threshold trait correlations into an edge list")
    g.add_argument("--phenotypes", required=False)
    g.add_argument("--rho", type=float, default=None)

    f = sub.add_parser("fit", parents=[common], help="fit one estimator")
    f.add_argument("--genotypes")
    f.add_argument("--phenotypes")
    f.add_argument("--family", choices=["lasso", "gc", "gw1", "gw2", "ridge", "single_marker"])
    f.add_argument("--s1", type=_budget, default=None)
    f.add_argument("--s2", type=_budget, default=None)
    f.add_argument("--rho", type=float, default=None)
    f.add_argument("--graph", default=None, help="edge-list TSV")
    f.add_argument("--search", choices=["gradient", "grid"], default=None)
    f.add_argument("--grid", default=None, help="grid points as 's1:s2,s1:s2,...'")
    f.add_argument("--folds", type=int, default=None)
    f.add_argument("--holdout", type=int, default=None)
    f.add_argument("--ridge-reg", type=float, default=None)
    f.add_argument("--standardize", action="store_true", default=None,
                   help="standardize phenotype columns before fitting")
    f.add_argument("--dump-qp", action="store_true", default=None, help="also write the assembled QP")

    e = sub.add_parser("evaluate", parents=[common], help="score coefficient files")
    e.add_argument("--coef", action="append", default=None, help="coefficient TSV (repeatable)")
    e.add_argument("--truth", default=None)
    e.add_argument("--test-genotypes", default=None)
    e.add_argument("--test-phenotypes", default=None)
    e.add_argument("--train-genotypes", default=None, help="source of centering means for test genotypes")
    e.add_argument("--level", choices=["pair", "snp"], default=None)
    e.add_argument("--roc-out", action="store_true", default=None)

    x = sub.add_parser("experiment", parents=[common], help="run a replicated simulation protocol")
    x.add_argument("--protocol", default=None, help="protocol JSON")
    x.add_argument("--replicates", type=int, default=None)
    return p


def _resolve(args: argparse.Namespace) -> dict:
    """Config-file values, overridden by every flag given on the command line."""
    cfg = {}
    if args.config:
        cfg = _read_json(args.config)
        if not isinstance(cfg, dict):
            raise ConfigurationError(f"{args.config}: config must be a JSON object")
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            cfg[k] = v
    cfg.setdefault("seed", 0)
    cfg.setdefault("jobs", 1)
    cfg.setdefault("out", ".")
    return cfg


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _require(cfg: dict, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigurationError(f"missing required setting(s): {', '.join('--' + k.replace('_', '-') for k in missing)}")


def _write_manifest(out: Path, cfg: dict, extra: dict | None = None) -> None:
    manifest = {"command": cfg["command"], "version": __version__,
                "config": {k: v for k, v in sorted(cfg.items()) if k != "out"}}
    manifest.update(extra or {})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


def _outdir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg: dict) -> None:
    spec = SimulationSpec.from_dict(_read_json(cfg["spec"])) if cfg.get("spec") else SimulationSpec()
    data = simulate(spec, cfg["seed"])
    out = _outdir(cfg)
    save_matrix(out / "genotypes.tsv", data.genotypes)
    save_matrix(out / "phenotypes.tsv", data.phenotypes)
    write_tsv(out / "truth.tsv", data.genotypes.snp_ids, data.phenotypes.trait_ids, data.truth.true_beta,
              corner="snp")
    if data.test_genotypes.n_individuals:
        save_matrix(out / "test_genotypes.tsv", data.test_genotypes)
        save_matrix(out / "test_phenotypes.tsv", data.test_phenotypes)
    (out / "spec.json").write_text(spec.to_json() + "\n")
    _write_manifest(out, cfg, {"spec": spec.to_dict()})


def cmd_graph(cfg: dict) -> None:
    _require(cfg, "phenotypes", "rho")
    y = load_matrix(cfg["phenotypes"], "phenotype")
    graph = build_graph(y, float(cfg["rho"]))
    out = _outdir(cfg)
    write_edges(out / "edges.tsv", graph)
    _write_manifest(out, cfg, {"n_edges": graph.n_edges})


def _parse_grid(text) -> tuple[tuple[float, float], ...]:
    if isinstance(text, list):
        return tuple((float(a), float(b)) for a, b in text)
    try:
        return tuple(tuple(float(v) for v in pt.split(":")) for pt in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad --grid value {text!r}; expected 's1:s2,s1:s2'") from exc


def _graph_for(cfg: dict, y) -> TraitGraph:
    if cfg.get("graph") is not None:
        return read_edges(cfg["graph"], y.trait_ids)
    if cfg.get("rho") is not None:
        return build_graph(y, float(cfg["rho"]))
    raise ConfigurationError(f"family {cfg['family']} needs --graph or --rho")


def cmd_fit(cfg: dict) -> None:
    _require(cfg, "genotypes", "phenotypes", "family")
    x = load_matrix(cfg["genotypes"], "genotype")
    y = load_matrix(cfg["phenotypes"], "phenotype")
    if x.n_individuals != y.n_individuals:
        raise ConfigurationError(f"genotypes have {x.n_individuals} rows, phenotypes {y.n_individuals}")
    if x.sample_ids != y.sample_ids:
        raise ConfigurationError("genotype and phenotype sample ids differ")
    y = y.standardize() if cfg.get("standardize") else y.centered()
    family = cfg["family"]
    out = _outdir(cfg)
    extra: dict = {}

    if family == "single_marker":
        scores = single_marker(x, y)
        b = CoefficientMatrix(scores.scores, "single_marker", x.snp_ids, y.trait_ids)
    elif family == "ridge":
        b = ridge(x, y, float(cfg.get("ridge_reg", 1e-4)))
    else:
        graph = TraitGraph(y.n_traits, (), trait_ids=y.trait_ids) if family == "lasso" else _graph_for(cfg, y)
        extra["n_edges"] = graph.n_edges
        if cfg.get("search"):
            grid = _parse_grid(cfg["grid"]) if cfg.get("grid") is not None else None
            search = SearchConfig(mode=cfg["search"], folds=cfg.get("folds"),
                                  holdout=None if cfg.get("folds") else cfg.get("holdout", 30),
                                  grid=grid, seed=cfg["seed"])
            b, trace = select_and_fit(x, y, graph, family, search, x.snp_ids, y.trait_ids)
            trace.save(out / "trace.tsv")
            extra["chosen"] = {"s1": b.info["s1"], "s2": b.info["s2"]}
        else:
            if cfg.get("s1") is None and (family == "lasso" or cfg.get("s2") is None):
                raise ConfigurationError("give --s1/--s2 budgets or --search")
            spec = FitSpec(family, float(cfg.get("s1", math.inf)), float(cfg.get("s2", math.inf)))
            if cfg.get("dump_qp"):
                dump_qp(build_qp(x, y, graph, spec).problem, out / "qp.txt")
            b = fit(x, y, graph, spec, FitConfig(), x.snp_ids, y.trait_ids)
        extra["certificate"] = {k: b.info[k] for k in ("status", "kkt_residual", "s1_slack", "s2_slack")
                                if k in b.info}
    save_matrix(out / "coefficients.tsv", b)
    _write_manifest(out, cfg, extra)


def cmd_evaluate(cfg: dict) -> None:
    _require(cfg, "coef")
    coefs = [load_coefficients(p) for p in cfg["coef"]]
    truth = load_coefficients(cfg["truth"]).beta if cfg.get("truth") else None
    x_test = y_test = None
    if cfg.get("test_genotypes") or cfg.get("test_phenotypes"):
        _require(cfg, "test_genotypes", "test_phenotypes")
        xt = load_matrix(cfg["test_genotypes"], "genotype")
        y_test = load_matrix(cfg["test_phenotypes"], "phenotype").values
        if cfg.get("train_genotypes"):
            x_test = xt.centered_with(load_matrix(cfg["train_genotypes"], "genotype").means)
        else:
            x_test = xt.centered
    if truth is None and x_test is None:
        raise ConfigurationError("evaluate needs --truth and/or --test-genotypes/--test-phenotypes")
    out = _outdir(cfg)
    rows = []
    for path, b in zip(cfg["coef"], coefs):
        label = b.estimator_tag
        if sum(c.estimator_tag == label for c in coefs) > 1:
            label = f"{label}:{Path(path).stem}"
        is_score = b.estimator_tag == "single_marker"
        row = {"method": label, "auc": math.nan, "pred_error": math.nan, "nonzero": math.nan}
        if truth is not None:
            curve = roc(b.beta if is_score else np.abs(b.beta), truth, cfg.get("level", "pair"))
            row["auc"] = curve.auc
            if cfg.get("roc_out"):
                curve.save(out / f"roc_{label.replace(':', '_')}.tsv")
        if x_test is not None and not is_score:
            row["pred_error"] = prediction_error(b, x_test, y_test)
        if not is_score:
            row["nonzero"] = count_nonzero(b)
        rows.append(row)
    write_records(out / "summary.tsv", rows, ["method", "auc", "pred_error", "nonzero"])
    _write_manifest(out, cfg)


def cmd_experiment(cfg: dict) -> None:
    d = _read_json(cfg["protocol"]) if cfg.get("protocol") else {}
    if cfg.get("replicates") is not None:
        d["replicates"] = cfg["replicates"]
    if "seed" not in d:
        d["seed"] = cfg["seed"]
    protocol = Protocol.from_dict(d)
    out = _outdir(cfg)
    rows = run_protocol(protocol, int(cfg["jobs"]))
    write_outputs(out, protocol, rows)


COMMANDS = {"simulate": cmd_simulate, "graph": cmd_graph, "fit": cmd_fit, "evaluate": cmd_evaluate,
            "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        COMMANDS[args.command](cfg)
    except (GFlassoError, ValueError, KeyError, TypeError) as exc:
        print(f"gflasso {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"gflasso {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
