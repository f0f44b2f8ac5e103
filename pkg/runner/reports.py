"""Report emission: one JSON file per experiment, a CSV summary and kernel-grid tables."""
import csv
import json
from pathlib import Path

import numpy as np

from experiments.base import CERTIFICATE_INVALID
from utils.logger import log

__all__ = [
    "EXIT_OK",
    "EXIT_FAILED",
    "EXIT_CONFIG",
    "EXIT_CERTIFICATE",
    "SUMMARY_FIELDS",
    "write_report",
    "write_summary",
    "write_kernel_grid",
    "exit_status",
]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CERTIFICATE = 3

SUMMARY_FIELDS = [
    "experiment_id",
    "status",
    "passed",
    "residual_max",
    "residual_median",
    "budget_total",
    "flags",
    "runtime",
]


def write_report(report, out, threads=1):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{report.experiment_id}.json"
    document = report.to_json(threads)
    with open(path, "w") as fp:
        json.dump(document, fp, indent=2, sort_keys=True)
        fp.write("\n")
    log.debug("wrote %s", path)
    return path


def write_summary(reports, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "summary.csv"
    with open(path, "w", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for report in reports:
            writer.writerow({
                "experiment_id": report.experiment_id,
                "status": report.status,
                "passed": int(report.passed),
                "residual_max": f"{report.residual_max:.6e}",
                "residual_median": f"{report.residual_median:.6e}",
                "budget_total": f"{report.budget_total:.6e}",
                "flags": ";".join(sorted(report.flags)),
                "runtime": f"{report.runtime:.3f}",
            })
    return path


def write_kernel_grid(rows, path):
    """CSV with header x,y,re,im,norm"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(rows, dtype=float), delimiter=",", fmt="%.17g",
               header="x,y,re,im,norm", comments="")
    return path


def exit_status(reports):
    """0 when every report passes, 3 when a certificate is invalid, 1 otherwise"""
    if any(CERTIFICATE_INVALID in report.flags for report in reports):
        return EXIT_CERTIFICATE
    if all(report.passed for report in reports):
        return EXIT_OK
    return EXIT_FAILED
