"""Report assembly and serialization for the command line.

Reports are plain dictionaries under a fixed schema tag.  JSON output is
sorted and indented so that reruns with the same seed produce identical
bytes except for the elapsed-time field; the text renderer is a flat
key/value view of the same payload.  CSV export is offered for tabular
payloads (spectra, gluing residuals).
"""

from __future__ import annotations

import csv
import json
import sys

SCHEMA_VERSION = "floerbench-report-1"


def make_report(command, payload, passed=None, seed=None, elapsed=None):
    report = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "payload": payload,
    }
    if passed is not None:
        report["passed"] = bool(passed)
    if seed is not None:
        report["seed"] = int(seed)
    if elapsed is not None:
        report["elapsed_s"] = round(float(elapsed), 3)
    return report


def emit(report, as_json=False, out=None):
    """Write the report as JSON or flat text, to a file or stdout."""
    if as_json:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = "".join(_render_lines(report))
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for key in obj:
            val = obj[key]
            if isinstance(val, (dict, list)):
                yield f"{prefix}{key}:\n"
                yield from _render_lines(val, prefix + "  ")
            else:
                yield f"{prefix}{key}: {val}\n"
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            if isinstance(val, (dict, list)):
                yield f"{prefix}- [{i}]\n"
                yield from _render_lines(val, prefix + "  ")
            else:
                yield f"{prefix}- {val}\n"
    else:
        yield f"{prefix}{obj}\n"


def write_csv(path, rows, fields=None):
    """Write a list of flat dictionaries as delimited output."""
    if not rows:
        raise ValueError("nothing to write")
    if fields is None:
        fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def pass_line(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    return f"[{tag}] {name}" + (f": {detail}" if detail else "")
