"""
Report files and the certificate ledger.

Reports are canonical JSON: sorted keys, fixed separators, floats rounded
to 12 significant digits, trailing newline. The same inputs and seed
therefore give byte-identical files, and the SHA-256 of those bytes is the
run's digest. Timestamps only ever go to the ledger.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import conf
from .exceptions import InputError
from .models import CertificateRun, CertificateRunKind
from .serializers import GemCertificateSerializer

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "md")

SUMMARY_FIELDS = [
    "kind",
    "family",
    "n",
    "t",
    "m",
    "bound_bits",
    "alpha_effective",
    "epsilon_prime",
    "seed",
    "digest",
]

_LEDGER_KINDS = {
    "patch": CertificateRunKind.PATCH,
    "theorem2": CertificateRunKind.THEOREM2,
    "sequential": CertificateRunKind.SEQUENTIAL,
    "mixed": CertificateRunKind.MIXED,
}


def _stable_float(value: float) -> float | str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    rounded = float(f"{value:.12g}")
    return 0.0 if rounded == 0 else rounded


def to_plain(obj: Any) -> Any:
    """Recursively turn numpy values, complex numbers and tuples into JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _stable_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        value = complex(obj)
        if abs(value.imag) < 1e-12:
            return _stable_float(value.real)
        return {"re": _stable_float(value.real), "im": _stable_float(value.imag)}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def canonical_json_bytes(obj: Any) -> bytes:
    text = json.dumps(
        to_plain(obj),
        sort_keys=True,
        ensure_ascii=True,
        indent=2,
        separators=(", ", ": "),
    )
    return (text + "\n").encode("utf-8")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ----------------------------------------------------------------------
# Payloads
# ----------------------------------------------------------------------


def certificate_payload(certificate, params: dict | None = None) -> dict:
    """Certificate body plus the run parameters echoed under provenance."""
    body = dict(GemCertificateSerializer(certificate).data)
    provenance = dict(body.get("provenance") or {})
    if params:
        provenance["params"] = dict(sorted(params.items()))
    body["provenance"] = provenance
    return to_plain(body)


def summary_row(payload: dict, digest: str = "") -> dict:
    """One flat row for CSV and Markdown summaries."""
    provenance = payload.get("provenance") or {}
    params = provenance.get("params") or {}
    return {
        "kind": payload.get("kind", ""),
        "family": provenance.get("family", params.get("code", "")),
        "n": provenance.get("n", payload.get("n", "")),
        "t": payload.get("t", params.get("t", "")),
        "m": payload.get("m", ""),
        "bound_bits": payload.get("bound_bits", ""),
        "alpha_effective": payload.get("alpha_effective", ""),
        "epsilon_prime": payload.get("epsilon_prime", ""),
        "seed": params.get("seed", ""),
        "digest": digest,
    }


def render(payload: dict, fmt: str = "json") -> bytes:
    """
    Render a payload in one of the report formats.

    JSON is the full canonical body; CSV is a header plus one summary row;
    Markdown is a summary table followed by any scalar results.
    """
    if fmt not in FORMATS:
        raise InputError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")
    body = canonical_json_bytes(payload)
    if fmt == "json":
        return body
    row = summary_row(to_plain(payload), sha256_bytes(body))
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buffer.getvalue().encode("utf-8")
    lines = [
        "| " + " | ".join(SUMMARY_FIELDS) + " |",
        "|" + "---|" * len(SUMMARY_FIELDS),
        "| " + " | ".join(str(row[name]) for name in SUMMARY_FIELDS) + " |",
    ]
    scalars = {
        k: v
        for k, v in sorted(to_plain(payload).items())
        if not isinstance(v, (dict, list)) and k not in row
    }
    if scalars:
        lines.append("")
        lines.extend(f"- **{k}**: {v}" for k, v in scalars.items())
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_report(payload: dict, fmt: str = "json", output: str | Path | None = None) -> tuple[bytes, str]:
    """
    Render and optionally write a report; returns the bytes and the digest
    of the canonical JSON body.
    """
    data = render(payload, fmt)
    digest = sha256_bytes(canonical_json_bytes(payload))
    if output is not None:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        logger.info("wrote %s report to %s (%s)", fmt, path, digest[:12])
    return data, digest


def default_output(name: str, fmt: str) -> Path:
    return Path(conf.get("REPORT_DIR")) / f"{name}.{fmt}"


# ----------------------------------------------------------------------
# Ledger
# ----------------------------------------------------------------------


def record_run(kind: str, payload: dict, *, family: str, n: int, seed: int | None = None) -> CertificateRun:
    """Append a run to the ledger. `payload` is stored exactly as rendered."""
    try:
        ledger_kind = _LEDGER_KINDS[kind]
    except KeyError as exc:
        raise InputError(f"runs of kind {kind!r} are not recorded") from exc
    plain = to_plain(payload)
    bound = plain.get("bound_bits", 0.0)
    if not isinstance(bound, (int, float)):
        # -log2(0) renders as "inf"; the ledger stores the largest finite float
        bound = float(np.finfo(float).max)
    run = CertificateRun.objects.create(
        kind=ledger_kind,
        family=family,
        n=n,
        t=int(plain.get("t", 0) or 0),
        m=int(plain.get("m", 0) or 0),
        bound_bits=float(bound),
        alpha_effective=float(plain.get("alpha_effective", 0.0) or 0.0),
        seed=seed,
        passed=bool(plain.get("passed", True)),
        digest=sha256_bytes(canonical_json_bytes(plain)),
        payload=plain,
    )
    logger.info("recorded %r", run)
    return run
