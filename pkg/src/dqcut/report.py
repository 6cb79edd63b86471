"""Report emission: schema-versioned JSON, a delimited summary row, and
matplotlib figures rendered alongside them."""
from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SCHEMA = "dqcut-report/1"

CSV_COLUMNS = [
    "mode",
    "circuit",
    "qubits",
    "two_qubit_gates",
    "topology",
    "k1",
    "k2",
    "postproc",
    "sampling",
    "executed_circuits",
    "iso_instances",
    "swaps",
    "epr_pairs",
    "depth",
    "observable",
    "expectation",
    "ground_truth",
    "absolute_error",
]


def build_report(mode: str, config: dict, circuit_info: dict, topo_info: dict,
                 cut: dict | None = None, iso: dict | None = None,
                 mapping: dict | None = None, result: dict | None = None,
                 timings: dict | None = None) -> dict:
    return {
        "schema": SCHEMA,
        "mode": mode,
        "config": config,
        "circuit": circuit_info,
        "topology": topo_info,
        "cut": cut,
        "iso": iso,
        "mapping": mapping,
        "result": result,
        "timings": timings or {},
    }


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, int) and abs(value) >= 10**15:
        return str(value)  # exact digits survive as a string
    if isinstance(value, float) and value != value:  # NaN
        return None
    return value


def to_json(report: dict) -> str:
    return json.dumps(_json_safe(report), indent=2)


def write_json(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(report) + "\n")


def summary_row(report: dict) -> dict:
    cut = report.get("cut") or {}
    iso = report.get("iso") or {}
    mapping = report.get("mapping") or {}
    result = report.get("result") or {}
    over = (result.get("overheads") or cut) if result else cut
    return {
        "mode": report["mode"],
        "circuit": report["circuit"].get("name", ""),
        "qubits": report["circuit"].get("num_qubits", ""),
        "two_qubit_gates": report["circuit"].get("two_qubit_gates", ""),
        "topology": report["topology"].get("name", ""),
        "k1": cut.get("k1", ""),
        "k2": cut.get("k2", ""),
        "postproc": over.get("postproc", ""),
        "sampling": over.get("sampling", ""),
        "executed_circuits": over.get("executed_circuits", ""),
        "iso_instances": iso.get("instance_count", ""),
        "swaps": mapping.get("swaps", ""),
        "epr_pairs": mapping.get("epr_pairs", ""),
        "depth": mapping.get("depth", ""),
        "observable": result.get("observable", ""),
        "expectation": result.get("expectation", ""),
        "ground_truth": result.get("ground_truth", ""),
        "absolute_error": result.get("absolute_error", ""),
    }


def write_csv(report: dict, path: str) -> None:
    row = summary_row(report)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerow(row)


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def render_figures(report: dict, outdir: str) -> list[str]:
    """Write the figures the report supports; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    cut = report.get("cut")
    if cut and cut.get("marginals"):
        written.append(_marginals_figure(cut, os.path.join(outdir, "cut_marginals.png")))
    if cut:
        written.append(_overheads_figure(cut, report, os.path.join(outdir, "overheads.png")))
    result = report.get("result")
    if result and result.get("ground_truth") is not None:
        written.append(_expectation_figure(result, os.path.join(outdir, "expectation.png")))
    return written


def _marginals_figure(cut: dict, path: str) -> str:
    marginals = cut["marginals"]
    labels = [str(k) for k in marginals]
    values = list(marginals.values())
    avg = sum(values) / len(values)
    critical = set(map(str, cut.get("critical_edges", [])))
    colors = ["#2b7a3d" if lbl in critical else "#b0b0b0" for lbl in labels]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(labels, values, color=colors)
    ax.axhline(avg, color="#d62728", linestyle="--", linewidth=1, label=f"average {avg:.2f}")
    ax.set_xlabel("cut (edge id)")
    ax.set_ylabel("remote gates removed")
    ax.set_title("Per-cut marginal remote-gate removal")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _overheads_figure(cut: dict, report: dict, path: str) -> str:
    labels = ["post-processing", "sampling"]
    values = [max(1, int(cut.get("postproc", 1))), max(1, int(cut.get("sampling", 1)))]
    result = report.get("result") or {}
    over = result.get("overheads") or {}
    if over.get("sampling_with_reuse"):
        labels.append("sampling (reuse)")
        values.append(max(1, int(over["sampling_with_reuse"])))
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(labels, values, color="#1f77b4")
    ax.set_yscale("log")
    ax.set_ylabel("terms")
    ax.set_title(f"Overheads, k1={cut.get('k1')}, k2={cut.get('k2')}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _expectation_figure(result: dict, path: str) -> str:
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.bar(["reconstructed", "ground truth"],
           [result["expectation"], result["ground_truth"]],
           color=["#1f77b4", "#ff7f0e"])
    err = result.get("absolute_error")
    title = "Reconstructed expectation"
    if err is not None:
        title += f" (abs err {err:.2e})"
    ax.set_title(title)
    ax.set_ylim(-1.05, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
