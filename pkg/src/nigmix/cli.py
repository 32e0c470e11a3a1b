"""Command-line front-end.

Subcommands: ``fit``, ``simulate``, ``evaluate``, ``density-grid``, and
``reproduce`` (runs a named study preset end to end).  Exit codes: 0
success, 2 fit did not converge, 3 input error, 4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import datasets
from ._vbcore import DegenerateFit
from .config import FitConfig
from .distributions import sample_mixture
from .evaluation import adjusted_rand_index, cross_tab, merge_labels
from .io import (
    file_fingerprint,
    ingest_csv,
    make_run_record,
    mixture_spec_from_dict,
    mixture_spec_to_dict,
    read_json,
    result_from_dict,
    run_record_hash,
    write_json,
    write_sample_csv,
)
from .presets import FISH_MERGE_GROUPS, FISH_VARIABLES, simulation_preset

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_INPUT = 3
EXIT_DEGENERATE = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _add_fit_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["unig", "mnig"], default="unig")
    p.add_argument("--g-init", type=int, default=10)
    p.add_argument("--init-mode", choices=["random", "kmeans"], default="kmeans")
    p.add_argument("--hyper-init", type=float, default=1e-8)
    p.add_argument("--prune-threshold", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--columns", type=str, default=None,
                   help="comma-separated column selection")
    p.add_argument("--label-column", type=str, default=None)


def _config_from_args(args) -> FitConfig:
    return FitConfig(
        model=args.model,
        g_init=args.g_init,
        init_mode=args.init_mode,
        hyper_init=args.hyper_init,
        prune_threshold=args.prune_threshold,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        columns=args.columns.split(",") if args.columns else None,
        label_column=args.label_column,
    )


def run_fit(config: FitConfig, data: np.ndarray):
    from .vb_mnig import fit_m
    from .vb_unig import fit

    if config.model == "unig":
        if data.ndim == 2 and data.shape[1] != 1:
            raise CliError("unig model requires one-column data")
        return fit(data.reshape(-1), config)
    return fit_m(data, config)


def cmd_fit(args) -> int:
    config = _config_from_args(args)
    try:
        data, _ = ingest_csv(args.input, config.columns, config.label_column)
    except (FileNotFoundError, ValueError) as exc:
        raise CliError(f"ingestion failed: {exc}") from exc
    t0 = time.perf_counter()
    try:
        result = run_fit(config, data)
    except DegenerateFit as exc:
        raise CliError(f"degenerate fit: {exc}", EXIT_DEGENERATE) from exc
    elapsed = time.perf_counter() - t0

    record = make_run_record(
        config, result, file_fingerprint(args.input), {"fit_seconds": elapsed}
    )
    out = Path(args.output)
    write_json(out, record)
    labels_path = out.with_suffix(".labels.csv")
    with open(labels_path, "w", encoding="utf-8") as fh:
        fh.write("label\n")
        fh.writelines(f"{int(v)}\n" for v in result.labels)
    print(
        f"fit: model={config.model} G={result.n_components} "
        f"iterations={result.iterations} converged={result.converged} "
        f"hash={run_record_hash(record)[:16]}"
    )
    print(f"wrote {out} and {labels_path}")
    return EXIT_OK if result.converged else EXIT_NONCONVERGENCE


def cmd_simulate(args) -> int:
    if args.preset:
        spec, counts = simulation_preset(args.preset)
        if args.n is not None and args.n != sum(counts):
            counts = None  # fall back to categorical draws at the requested n
        n = args.n if args.n is not None else sum(counts)
    else:
        if not args.spec:
            raise CliError("either --preset or --spec is required")
        try:
            spec = mixture_spec_from_dict(read_json(args.spec))
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise CliError(f"invalid mixture spec: {exc}") from exc
        counts = None
        n = args.n if args.n is not None else 300
    sample = sample_mixture(spec, n, args.seed, counts=counts)
    out = Path(args.output)
    write_sample_csv(out, sample)
    sidecar = {
        "spec": mixture_spec_to_dict(spec),
        "seed": args.seed,
        "n": n,
        "counts": list(counts) if counts else None,
        "preset": args.preset,
    }
    write_json(out.with_suffix(".spec.json"), sidecar)
    print(f"wrote {n} rows to {out} (sidecar {out.with_suffix('.spec.json')})")
    return EXIT_OK


def _read_labels(path) -> np.ndarray:
    try:
        data, labels = ingest_csv(path)
    except (FileNotFoundError, ValueError) as exc:
        raise CliError(f"cannot read labels from {path}: {exc}") from exc
    if labels is None:
        if data.shape[1] != 1:
            raise CliError(f"{path}: expected a single label column")
        labels = data[:, 0].astype(int)
    return labels


def cmd_evaluate(args) -> int:
    a = _read_labels(args.labels_a)
    b = _read_labels(args.labels_b)
    if a.shape[0] != b.shape[0]:
        raise CliError("label files have different lengths")
    if args.merge:
        groups = [set(map(int, grp.split("+"))) for grp in args.merge.split(",")]
        a = merge_labels(a, groups)
    ari = adjusted_rand_index(a, b)
    table = cross_tab(a, b)
    print(f"ARI: {ari:.6f}")
    print("cross-tabulation (rows = first file, cols = second):")
    for row in table:
        print("  " + " ".join(f"{int(v):5d}" for v in row))
    return EXIT_OK


def cmd_density_grid(args) -> int:
    from .vb_mnig import fitted_density_m
    from .vb_unig import fitted_density

    try:
        record = read_json(args.model_path)
        result = result_from_dict(record["result"])
    except (FileNotFoundError, KeyError, ValueError) as exc:
        raise CliError(f"cannot load model: {exc}") from exc
    if not result.converged:
        raise CliError("model did not converge", EXIT_NONCONVERGENCE)

    out = Path(args.output)
    if result.model == "unig":
        lo, hi = args.range
        grid = np.linspace(lo, hi, args.points)
        dens = fitted_density(result, grid)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("x,density\n")
            for x, f in zip(grid, dens):
                fh.write(f"{float(x)!r},{float(f)!r}\n")
    else:
        d = result.bundles[0].mu_bar.shape[0]
        if d != 2:
            raise CliError(
                f"lattice export requires 2-dimensional models, got d={d}"
            )
        lo, hi = args.range
        lo2, hi2 = args.range2 if args.range2 else args.range
        xs = np.linspace(lo, hi, args.points)
        ys = np.linspace(lo2, hi2, args.points)
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        grid = np.column_stack([xx.reshape(-1), yy.reshape(-1)])
        dens = fitted_density_m(result, grid)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("x1,x2,density\n")
            for (x, y), f in zip(grid, dens):
                fh.write(f"{float(x)!r},{float(y)!r},{float(f)!r}\n")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    """Run a named study end to end and print its headline numbers."""
    name = args.study
    if name in ("study1", "study2"):
        spec, counts = simulation_preset(name)
        aris = []
        sizes = []
        for rep in range(args.replicates):
            sample = sample_mixture(spec, sum(counts), seed=1000 + rep, counts=counts)
            config = FitConfig(model="unig", g_init=10, seed=rep)
            result = run_fit(config, sample.observations)
            sizes.append(result.n_components)
            aris.append(adjusted_rand_index(sample.labels, result.labels))
        two = sum(1 for g in sizes if g == 2)
        print(
            f"{name}: G=2 in {two}/{len(sizes)} runs, "
            f"mean ARI {np.mean(aris):.3f} (sd {np.std(aris):.3f})"
        )
    elif name in ("study4", "study5"):
        spec, counts = simulation_preset(name)
        sample = sample_mixture(spec, sum(counts), seed=42, counts=counts)
        g_init = 5 if name == "study4" else 10
        config = FitConfig(model="mnig", g_init=g_init, seed=0)
        result = run_fit(config, sample.observations)
        ari = adjusted_rand_index(sample.labels, result.labels)
        print(f"{name}: G={result.n_components}, ARI {ari:.3f}")
    elif name == "faithful":
        data = datasets.load_old_faithful()
        config = FitConfig(model="mnig", g_init=7, seed=0)
        result = run_fit(config, data)
        print(f"faithful: G={result.n_components}")
    elif name == "crabs":
        data, truth = datasets.load_crabs()
        config = FitConfig(model="mnig", g_init=10, seed=0)
        result = run_fit(config, data)
        ari = adjusted_rand_index(truth, result.labels)
        print(f"crabs: G={result.n_components}, ARI {ari:.3f}")
    elif name == "fishcatch":
        data, species = datasets.load_fish(FISH_VARIABLES["paper"])
        config = FitConfig(model="mnig", g_init=10, seed=0)
        result = run_fit(config, data)
        truth = merge_labels(species, FISH_MERGE_GROUPS)
        ari = adjusted_rand_index(truth, result.labels)
        print(f"fishcatch: G={result.n_components}, merged-truth ARI {ari:.3f}")
        print(cross_tab(species, result.labels))
    elif name == "enzyme":
        data = datasets.load_enzyme()
        config = FitConfig(model="unig", g_init=5, seed=0)
        result = run_fit(config, data)
        print(f"enzyme: G={result.n_components}")
    else:
        raise CliError(f"unknown study {name!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nigmix",
        description="Variational clustering with normal inverse Gaussian mixtures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a mixture to a CSV dataset")
    p.add_argument("input")
    p.add_argument("output")
    _add_fit_config_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="draw a dataset from a mixture spec")
    p.add_argument("output")
    p.add_argument("--spec", help="mixture spec JSON")
    p.add_argument("--preset", choices=["study1", "study2", "study4", "study5"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="compare two label files")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.add_argument(
        "--merge",
        help="merge groups applied to the first file, e.g. '1+4,2+3+7'",
    )
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("density-grid", help="export a fitted density on a grid")
    p.add_argument("model_path")
    p.add_argument("output")
    p.add_argument("--range", type=float, nargs=2, required=True)
    p.add_argument("--range2", type=float, nargs=2, default=None)
    p.add_argument("--points", type=int, default=512)
    p.set_defaults(func=cmd_density_grid)

    p = sub.add_parser("reproduce", help="run a named study preset end to end")
    p.add_argument(
        "study",
        choices=[
            "study1", "study2", "study4", "study5",
            "faithful", "crabs", "fishcatch", "enzyme",
        ],
    )
    p.add_argument("--replicates", type=int, default=100)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except datasets.DatasetMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateFit as exc:
        print(f"error: degenerate fit: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
