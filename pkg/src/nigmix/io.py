"""Dataset ingestion and JSON persistence for specs, fits, and run records.

File conventions: matrices travel as headered CSV (UTF-8, comma separated);
models, configurations, and run records travel as JSON with stable field
names.  Result payload hashes exclude wall-clock timings so reruns with
identical inputs are hash-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ._vbcore import FitResult
from .config import FitConfig
from .distributions import LabeledSample, MixtureSpec, MNIGParams, UNIGParams

__all__ = [
    "ingest_csv",
    "write_sample_csv",
    "mixture_spec_to_dict",
    "mixture_spec_from_dict",
    "result_to_dict",
    "result_from_dict",
    "make_run_record",
    "run_record_hash",
    "file_fingerprint",
    "write_json",
    "read_json",
]


def ingest_csv(
    path,
    columns: list[str] | None = None,
    label_column: str | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Read a headered CSV into a row-major float matrix.

    ``columns`` selects and orders the numeric columns (default: all except
    the label column).  Non-numeric cells in selected columns are rejected
    with the offending row index.  Label columns may be non-numeric; string
    labels are coded 1..k in order of first appearance.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = [row for row in reader if row]

    if columns is None:
        columns = [c for c in header if c != label_column]
    if not columns:
        raise ValueError("empty column selection")
    try:
        col_idx = [header.index(c) for c in columns]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    lab_idx = header.index(label_column) if label_column else None

    data = np.empty((len(rows), len(col_idx)))
    raw_labels = []
    for i, row in enumerate(rows):
        for j, c in enumerate(col_idx):
            try:
                data[i, j] = float(row[c])
            except (ValueError, IndexError):
                raise ValueError(
                    f"{path}: non-numeric cell in row {i + 2}, "
                    f"column {columns[j]!r}"
                ) from None
        if lab_idx is not None:
            raw_labels.append(row[lab_idx].strip())

    labels = None
    if lab_idx is not None:
        try:
            labels = np.array([int(float(v)) for v in raw_labels])
        except ValueError:
            seen: dict[str, int] = {}
            labels = np.array(
                [seen.setdefault(v, len(seen) + 1) for v in raw_labels]
            )
    return data, labels


def write_sample_csv(path, sample: LabeledSample) -> None:
    """One observation per row, trailing integer label column."""
    obs = np.atleast_2d(sample.observations)
    d = obs.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(d)] + ["label"])
        for row, lab in zip(obs, sample.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(lab)])


# ---------------------------------------------------------------------------
# Mixture specifications
# ---------------------------------------------------------------------------

def mixture_spec_to_dict(spec: MixtureSpec) -> dict:
    comps = []
    for c in spec.components:
        if isinstance(c, MNIGParams):
            comps.append(
                {
                    "type": "mnig",
                    "mu_t": c.mu_t.tolist(),
                    "beta_t": c.beta_t.tolist(),
                    "sigma_t": c.sigma_t.tolist(),
                    "gamma_t": c.gamma_t,
                }
            )
        else:
            comps.append(
                {
                    "type": "unig",
                    "mu": c.mu,
                    "beta": c.beta,
                    "delta": c.delta,
                    "gamma": c.gamma,
                }
            )
    return {"weights": spec.weights.tolist(), "components": comps}


def mixture_spec_from_dict(d: dict) -> MixtureSpec:
    comps = []
    for c in d["components"]:
        kind = c.get("type", "unig")
        if kind == "mnig":
            comps.append(
                MNIGParams(
                    mu_t=c["mu_t"],
                    beta_t=c["beta_t"],
                    sigma_t=c["sigma_t"],
                    gamma_t=c["gamma_t"],
                )
            )
        elif kind == "unig":
            comps.append(
                UNIGParams(
                    mu=c["mu"], beta=c["beta"], delta=c["delta"], gamma=c["gamma"]
                )
            )
        else:
            raise ValueError(f"unknown component type {kind!r}")
    return MixtureSpec(weights=d["weights"], components=comps)


# ---------------------------------------------------------------------------
# Fit results and run records
# ---------------------------------------------------------------------------

def _hyper_to_dict(h) -> dict:
    d = asdict(h)
    return {k: v.tolist() if isinstance(v, np.ndarray) else v for k, v in d.items()}


def result_to_dict(result: FitResult) -> dict:
    return {
        "model": result.model,
        "surviving": list(result.surviving),
        "hypers": [_hyper_to_dict(h) for h in result.hypers],
        "bundles": [_hyper_to_dict(b) for b in result.bundles],
        "resp": result.resp.tolist(),
        "labels": result.labels.tolist(),
        "iterations": result.iterations,
        "converged": result.converged,
        "trace": result.trace,
        "flags": list(result.flags),
    }


def result_from_dict(d: dict) -> FitResult:
    if d["model"] == "unig":
        from .vb_unig import ComponentHyper, ExpectationBundle

        hypers = [ComponentHyper(**h) for h in d["hypers"]]
        bundles = [ExpectationBundle(**b) for b in d["bundles"]]
    else:
        from .vb_mnig import ComponentHyperM, ExpectationBundleM

        hypers = [
            ComponentHyperM(
                a0=h["a0"],
                a1=np.array(h["a1"]),
                a2=np.array(h["a2"]),
                a3=h["a3"],
                a4=h["a4"],
                V=np.array(h["V"]),
            )
            for h in d["hypers"]
        ]
        bundles = [
            ExpectationBundleM(
                log_pi=b["log_pi"],
                elog_det_prec=b["elog_det_prec"],
                e_prec=np.array(b["e_prec"]),
                mu_bar=np.array(b["mu_bar"]),
                beta_bar=np.array(b["beta_bar"]),
                c_mu=b["c_mu"],
                c_beta=b["c_beta"],
                c_cross=b["c_cross"],
                gamma_t=b["gamma_t"],
                gamma_t_sq=b["gamma_t_sq"],
            )
            for b in d["bundles"]
        ]
    return FitResult(
        model=d["model"],
        surviving=list(d["surviving"]),
        hypers=hypers,
        bundles=bundles,
        resp=np.array(d["resp"]),
        labels=np.array(d["labels"], dtype=int),
        iterations=d["iterations"],
        converged=d["converged"],
        trace=list(d["trace"]),
        flags=list(d["flags"]),
    )


def file_fingerprint(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_run_record(
    config: FitConfig, result: FitResult, fingerprint: str, timings: dict
) -> dict:
    return {
        "config": config.to_dict(),
        "dataset_fingerprint": fingerprint,
        "result": result_to_dict(result),
        "timings": timings,
    }


def run_record_hash(record: dict) -> str:
    """Hash of the reproducible payload (everything except timings)."""
    payload = {k: v for k, v in record.items() if k != "timings"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
