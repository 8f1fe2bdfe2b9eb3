"""
Tests for report rendering and the certificate ledger.

Tests cover JSON normalisation, canonical bytes and digests, the CSV and
Markdown summaries, certificate payloads and recording runs.
"""

from __future__ import annotations

import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, TestCase

from stabilizers import reports
from stabilizers.codes import make_toric
from stabilizers.entanglement import patch_certificate_toric
from stabilizers.exceptions import InputError
from stabilizers.models import CertificateRun, CertificateRunKind


class PlainValueTests(SimpleTestCase):
    """Test cases for to_plain and canonical_json_bytes."""

    def test_numpy_and_complex_values(self):
        """Test numpy scalars, arrays and complex numbers become JSON types."""
        plain = reports.to_plain(
            {"a": np.int64(3), "b": np.array([1.5, 2.0]), "c": (1, 2), "d": -1 + 0j, "e": 1j}
        )
        self.assertEqual(plain, {"a": 3, "b": [1.5, 2.0], "c": [1, 2], "d": -1.0, "e": {"re": 0.0, "im": 1.0}})

    def test_float_rounding(self):
        """Test floats keep twelve significant digits."""
        self.assertEqual(reports.to_plain(0.1 + 0.2), 0.3)
        self.assertEqual(reports.to_plain(-0.0), 0.0)

    def test_non_finite(self):
        """Test infinities and NaN are written as strings."""
        self.assertEqual(reports.to_plain([math.inf, -math.inf, math.nan]), ["inf", "-inf", "nan"])

    def test_canonical_bytes(self):
        """Test key order does not change the bytes and a newline ends them."""
        a = reports.canonical_json_bytes({"b": 1, "a": [1, 2]})
        b = reports.canonical_json_bytes({"a": [1, 2], "b": 1})
        self.assertEqual(a, b)
        self.assertTrue(a.endswith(b"\n"))
        self.assertEqual(json.loads(a), {"a": [1, 2], "b": 1})


class RenderTests(SimpleTestCase):
    """Test cases for render and write_report."""

    def setUp(self):
        """Set up test data for each test."""
        self.payload = {
            "kind": "patch",
            "t": 0,
            "m": 4,
            "bound_bits": 0.058,
            "alpha_effective": 0.0001,
            "epsilon_prime": 0.01,
            "provenance": {"family": "toric", "n": 800, "params": {"seed": 7}},
        }

    def test_csv(self):
        """Test CSV output is a header and one summary row."""
        lines = reports.render(self.payload, "csv").decode().splitlines()
        self.assertEqual(lines[0], ",".join(reports.SUMMARY_FIELDS))
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].startswith("patch,toric,800,0,4,"))
        digest = reports.sha256_bytes(reports.canonical_json_bytes(self.payload))
        self.assertTrue(lines[1].endswith(digest))

    def test_markdown(self):
        """Test Markdown output starts with the summary table."""
        text = reports.render(self.payload, "md").decode()
        self.assertTrue(text.startswith("| kind | family |"))
        self.assertIn("| patch | toric | 800 |", text)

    def test_unknown_format(self):
        """Test unknown formats are rejected."""
        with self.assertRaises(InputError):
            reports.render(self.payload, "xml")

    def test_write_report(self):
        """Test written bytes match the render and the digest covers the JSON body."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "report.json"
            data, digest = reports.write_report(self.payload, "json", path)
            self.assertEqual(path.read_bytes(), data)
            self.assertEqual(reports.sha256_file(path), digest)


class CertificatePayloadTests(SimpleTestCase):
    """Test cases for certificate_payload."""

    def test_payload_is_deterministic(self):
        """Test two runs of the same certificate give identical bytes."""
        first = reports.certificate_payload(patch_certificate_toric(make_toric(8)), {"L": 8, "t": 0})
        second = reports.certificate_payload(patch_certificate_toric(make_toric(8)), {"t": 0, "L": 8})
        self.assertEqual(reports.canonical_json_bytes(first), reports.canonical_json_bytes(second))
        self.assertEqual(first["kind"], "patch")
        self.assertEqual(first["m"], 1)
        self.assertEqual(first["provenance"]["params"], {"L": 8, "t": 0})
        self.assertEqual(first["witnesses"][0]["type"], "braiding")


class RecordRunTests(TestCase):
    """Test cases for record_run."""

    def test_record_patch_run(self):
        """Test a recorded run keeps the payload and its digest."""
        payload = {"kind": "patch", "t": 0, "m": 2, "bound_bits": 0.029, "alpha_effective": 0.001}
        run = reports.record_run("patch", payload, family="toric", n=200, seed=3)
        self.assertEqual(run.kind, CertificateRunKind.PATCH)
        self.assertEqual(run.m, 2)
        self.assertEqual(run.seed, 3)
        self.assertEqual(run.digest, reports.sha256_bytes(reports.canonical_json_bytes(payload)))
        self.assertEqual(CertificateRun.objects.get(pk=run.pk).payload["bound_bits"], 0.029)

    def test_infinite_bound(self):
        """Test an infinite bound is stored as the largest finite float."""
        run = reports.record_run("mixed", {"bound_bits": math.inf}, family="honeycomb", n=8)
        self.assertEqual(run.bound_bits, float(np.finfo(float).max))

    def test_unknown_kind(self):
        """Test only certificate kinds are recorded."""
        with self.assertRaises(InputError):
            reports.record_run("e0", {}, family="toric", n=8)
