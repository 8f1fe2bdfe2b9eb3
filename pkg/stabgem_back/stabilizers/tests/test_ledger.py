"""
Tests for the certificate ledger model and its filters.

Tests cover the custom queryset methods, string representations, derived
fields and the FilterSet behind `stabgem report list`.
"""

from __future__ import annotations

from django.test import TestCase

from stabilizers.filters import CertificateRunFilter
from stabilizers.models import CertificateRun, CertificateRunKind
from stabilizers.serializers import CertificateRunSerializer


def make_run(**fields) -> CertificateRun:
    defaults = {
        "kind": CertificateRunKind.PATCH,
        "family": "toric",
        "n": 200,
        "t": 0,
        "m": 4,
        "bound_bits": 0.058,
        "alpha_effective": 0.00029,
        "digest": "0" * 64,
        "payload": {},
    }
    defaults.update(fields)
    return CertificateRun.objects.create(**defaults)


class CertificateRunQuerySetTests(TestCase):
    """Test cases for CertificateRunQuerySet and the manager shortcuts."""

    def setUp(self):
        """Set up test data for each test."""
        self.patch = make_run()
        self.deep = make_run(t=2, m=1, bound_bits=0.0145)
        self.mixed = make_run(
            kind=CertificateRunKind.MIXED, family="honeycomb", n=16, bound_bits=3.0, passed=False
        )

    def test_for_kind(self):
        """Test filtering by certificate kind."""
        self.assertEqual(set(CertificateRun.objects.for_kind(CertificateRunKind.PATCH)), {self.patch, self.deep})

    def test_for_family_and_depth(self):
        """Test chaining family and depth filters."""
        runs = CertificateRun.objects.for_family("toric").for_depth(2)
        self.assertEqual(list(runs), [self.deep])

    def test_passed(self):
        """Test failed runs are excluded."""
        self.assertNotIn(self.mixed, CertificateRun.objects.passed())

    def test_min_bound_and_best(self):
        """Test the bound threshold and the best bound aggregate."""
        self.assertEqual(list(CertificateRun.objects.with_min_bound(1.0)), [self.mixed])
        self.assertEqual(CertificateRun.objects.for_family("toric").best_bound(), 0.058)
        self.assertEqual(CertificateRun.objects.for_family("ghz").best_bound(), 0.0)

    def test_str_and_bound_per_qubit(self):
        """Test the listing text and the derived bits per qubit."""
        self.assertEqual(str(self.mixed), "Mixed-state syndrome bound honeycomb n=16 t=0: 3.0000 bits")
        self.assertAlmostEqual(self.mixed.bound_per_qubit, 3.0 / 16)
        self.assertIn("bound_per_qubit", CertificateRunSerializer(self.patch).data)


class CertificateRunFilterTests(TestCase):
    """Test cases for CertificateRunFilter."""

    def setUp(self):
        """Set up test data for each test."""
        self.toric = make_run()
        self.honeycomb = make_run(kind=CertificateRunKind.SEQUENTIAL, family="honeycomb", n=36, bound_bits=4.0)
        self.ghz = make_run(kind=CertificateRunKind.MIXED, family="ghz", n=4, t=1, bound_bits=1.0)

    def filtered(self, data: dict) -> set[CertificateRun]:
        runs = CertificateRunFilter(data=data, queryset=CertificateRun.objects.all())
        self.assertTrue(runs.is_valid(), runs.errors)
        return set(runs.qs)

    def test_kind(self):
        """Test the kind choice filter."""
        self.assertEqual(self.filtered({"kind": "SEQUENTIAL"}), {self.honeycomb})

    def test_family_in(self):
        """Test comma-separated families."""
        self.assertEqual(self.filtered({"family__in": "toric, ghz"}), {self.toric, self.ghz})

    def test_depth_range_and_bound(self):
        """Test depth bounds combined with a minimum bound."""
        self.assertEqual(self.filtered({"t__gte": 1}), {self.ghz})
        self.assertEqual(self.filtered({"min_bound": 2.0, "t__lte": 0}), {self.honeycomb})

    def test_invalid_kind(self):
        """Test an unknown kind makes the filter invalid."""
        runs = CertificateRunFilter(data={"kind": "BOGUS"}, queryset=CertificateRun.objects.all())
        self.assertFalse(runs.is_valid())
