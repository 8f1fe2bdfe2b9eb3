"""
Tests for qubit layouts and regions.

Tests cover torus distances, thickening against a brute-force distance
scan, mesh coverage, patch packings and cluster splitting.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilizers.codes import chain_layout, toric_layout
from stabilizers.exceptions import ConfigurationError, InputError
from stabilizers.geometry import (
    MeshSpec,
    Region,
    box,
    build_mesh,
    connected_components,
    gap_centers,
    intersection_squares,
    partition_into_patches,
    region_distance,
    thicken,
    translation_map,
)

TORIC5 = toric_layout(5)


class RegionTests(SimpleTestCase):
    """Test cases for Region set operations."""

    def setUp(self):
        """Set up test data for each test."""
        self.a = Region.of([3, 1, 2, 2], "a")
        self.b = Region.of([2, 5], "b")

    def test_qubits_sorted_and_unique(self):
        """Test ids are deduplicated and sorted."""
        self.assertEqual(self.a.qubits, (1, 2, 3))
        self.assertEqual(len(self.a), 3)
        self.assertIn(2, self.a)

    def test_set_algebra(self):
        """Test union, intersection and difference."""
        self.assertEqual(self.a.union(self.b).qubits, (1, 2, 3, 5))
        self.assertEqual(self.a.intersection(self.b).qubits, (2,))
        self.assertEqual(self.a.difference(self.b).qubits, (1, 3))
        self.assertFalse(self.a.is_disjoint(self.b))
        self.assertTrue(Region.of([2]).issubset(self.a))


class LatticeLayoutTests(SimpleTestCase):
    """Test cases for LatticeLayout distances."""

    def test_toric_nearest_neighbours(self):
        """Test adjacent edges of the toric layout sit sqrt(2) apart."""
        # h(0,0) at (1, 0) and v(0,0) at (0, 1)
        self.assertAlmostEqual(TORIC5.distance(0, 25), math.sqrt(2))

    def test_periodic_wrap(self):
        """Test distances are taken over the nearest periodic image."""
        # h(0,0) at (1, 0) and h(4,0) at (9, 0) on a period of 10
        self.assertAlmostEqual(TORIC5.distance(0, 4), 2.0)

    def test_open_layout_extent(self):
        """Test an open chain has extent length times spacing."""
        np.testing.assert_allclose(chain_layout(5).extent, [5.0, 1.0])

    def test_rejects_bad_positions(self):
        """Test positions must be an (n, 2) array."""
        from stabilizers.geometry import LatticeLayout

        with self.assertRaises(InputError):
            LatticeLayout([1.0, 2.0, 3.0])

    def test_diameter_of_star(self):
        """Test the four edges around a vertex span a diameter of 2."""
        # vertex (0, 0): h(0,0), h(4,0), v(0,0), v(0,4)
        self.assertAlmostEqual(TORIC5.diameter([0, 4, 25, 45]), 2.0)


class ThickenTests(SimpleTestCase):
    """Test cases for thicken."""

    def brute_force(self, layout, region, w):
        return tuple(
            q
            for q in range(layout.n)
            if any(layout.distance(q, r) <= w + 1e-9 for r in region)
        )

    def test_zero_width_is_identity(self):
        """Test w = 0 returns the region itself."""
        region = Region.of([0, 7, 30])
        self.assertEqual(thicken(TORIC5, region, 0).qubits, region.qubits)

    def test_single_edge_width_one(self):
        """Test one edge thickened by 1 keeps only itself."""
        self.assertEqual(thicken(TORIC5, Region.of([0]), 1).qubits, (0,))

    def test_matches_distance_scan(self):
        """Test thickening agrees with a pairwise distance scan."""
        for w in (1.5, 2, 3.2):
            self.assertEqual(
                thicken(TORIC5, Region.of([0]), w).qubits,
                self.brute_force(TORIC5, [0], w),
            )

    def test_empty_region(self):
        """Test an empty region stays empty."""
        self.assertEqual(len(thicken(TORIC5, Region(), 3)), 0)

    def test_negative_width_raises(self):
        """Test negative widths are rejected."""
        with self.assertRaises(InputError):
            thicken(TORIC5, Region.of([0]), -1)

    @settings(max_examples=50, deadline=None)
    @given(st.sets(st.integers(0, TORIC5.n - 1), min_size=1, max_size=6))
    def test_monotone_in_width(self, qubits):
        """Test thicken(R, 1) is contained in thicken(R, 2)."""
        region = Region.of(qubits)
        small = thicken(TORIC5, region, 1)
        self.assertTrue(region.issubset(small))
        self.assertTrue(small.issubset(thicken(TORIC5, region, 2)))

    @settings(max_examples=30, deadline=None)
    @given(st.sets(st.integers(0, TORIC5.n - 1), min_size=1, max_size=4))
    def test_composition_is_monotone(self, qubits):
        """Test thickening a thickened region only grows it."""
        region = Region.of(qubits)
        once = thicken(TORIC5, region, 2)
        self.assertTrue(once.issubset(thicken(TORIC5, once, 2)))
        self.assertTrue(thicken(TORIC5, once, 2).issubset(thicken(TORIC5, region, 4)))


class ShapeTests(SimpleTestCase):
    """Test cases for box and connected_components."""

    def test_box_around_vertex(self):
        """Test a unit box around a vertex holds its four edges."""
        region = box(TORIC5, (4.0, 4.0), 1.0, 1.0)
        self.assertEqual(len(region), 4)
        self.assertEqual(region.bounds, (3.0, 3.0, 5.0, 5.0))

    def test_connected_components_on_chain(self):
        """Test a gap in a chain splits the region in two."""
        blocks = connected_components(chain_layout(6), [0, 1, 3, 4, 5], 1.0)
        self.assertEqual([b.qubits for b in blocks], [(0, 1), (3, 4, 5)])

    def test_connected_components_empty(self):
        """Test an empty region has no components."""
        self.assertEqual(connected_components(chain_layout(3), [], 1.0), [])


class MeshTests(SimpleTestCase):
    """Test cases for MeshSpec, build_mesh and intersection_squares."""

    def setUp(self):
        """Set up test data for each test."""
        self.layout = toric_layout(12)
        self.spec = MeshSpec(4, 2)

    def test_invalid_spec_raises(self):
        """Test nonpositive sizes raise ConfigurationError."""
        with self.assertRaises(ConfigurationError):
            MeshSpec(0, 1)
        with self.assertRaises(ConfigurationError):
            MeshSpec(2, -1)

    def test_square_larger_than_layout_raises(self):
        """Test a square that does not fit raises ConfigurationError."""
        with self.assertRaises(ConfigurationError):
            build_mesh(toric_layout(2), MeshSpec(10, 1))

    def test_full_layout_square(self):
        """Test a square covering the layout leaves an empty mesh."""
        squares, mesh = build_mesh(toric_layout(2), MeshSpec(4, 1))
        self.assertEqual(len(squares), 1)
        self.assertEqual(len(squares[0]), 8)
        self.assertEqual(len(mesh), 0)

    def test_exact_cover(self):
        """Test every qubit lies in exactly one square or in the mesh."""
        squares, mesh = build_mesh(self.layout, self.spec)
        self.assertEqual(len(squares), 16)
        seen = list(mesh.qubits)
        for square in squares:
            seen.extend(square.qubits)
        self.assertEqual(sorted(seen), list(range(self.layout.n)))

    def test_squares_separated_and_small(self):
        """Test squares keep the separation and their diameter bound."""
        squares, _ = build_mesh(self.layout, self.spec)
        for square in squares:
            self.assertLessEqual(self.layout.diameter(square), math.sqrt(2) * 4)
        for a, b in itertools.combinations(squares[:6], 2):
            self.assertGreaterEqual(region_distance(self.layout, a, b), 2)

    def test_deterministic(self):
        """Test repeated builds return the same squares."""
        first, _ = build_mesh(self.layout, self.spec)
        second, _ = build_mesh(self.layout, self.spec)
        self.assertEqual([s.qubits for s in first], [s.qubits for s in second])

    def test_shifted_mesh_intersection(self):
        """Test the intersection pieces partition the common mesh."""
        shifted = self.spec.shifted(3, 3)
        _, mesh1 = build_mesh(self.layout, self.spec)
        _, mesh2 = build_mesh(self.layout, shifted)
        pieces = intersection_squares(self.layout, self.spec, shifted)
        self.assertTrue(pieces)
        covered = Region().union(*pieces)
        self.assertEqual(covered.qubits, mesh1.intersection(mesh2).qubits)
        self.assertEqual(sum(len(p) for p in pieces), len(covered))

    def test_gap_centers(self):
        """Test gap strips are centred between squares, the last one running to the edge."""
        layout = toric_layout(16)
        spec = MeshSpec(4, 5)
        self.assertEqual(gap_centers(layout, spec, 1), [6.5, 15.5, 27.0])
        self.assertEqual(gap_centers(layout, spec.shifted(5, 5), 0), [11.5, 20.5, 32.0])
        with self.assertRaises(InputError):
            gap_centers(layout, spec, 2)


class TranslationTests(SimpleTestCase):
    """Test cases for translation_map."""

    def test_lattice_shift_is_bijection(self):
        """Test a shift by one lattice step permutes the toric qubits."""
        image = translation_map(TORIC5, (2, 0))
        self.assertIsNotNone(image)
        self.assertEqual(sorted(image.tolist()), list(range(TORIC5.n)))
        # h(4, j) wraps to h(0, j)
        self.assertEqual(image[4], 0)
        self.assertEqual(image[0], 1)

    def test_half_step_leaves_lattice(self):
        """Test a shift onto vertex positions has no image."""
        self.assertIsNone(translation_map(TORIC5, (1, 0)))

    def test_open_layout_edge(self):
        """Test an open chain has no translation pushing qubits off its end."""
        self.assertIsNone(translation_map(chain_layout(4), (1, 0)))
        np.testing.assert_array_equal(translation_map(chain_layout(4), (0, 0)), range(4))


class PatchTests(SimpleTestCase):
    """Test cases for partition_into_patches."""

    def test_whole_layout_patch(self):
        """Test a patch the size of the layout gives one patch."""
        patches = partition_into_patches(toric_layout(3), 6, 1)
        self.assertEqual(len(patches), 1)
        self.assertEqual(len(patches[0]), 18)

    def test_too_small_layout(self):
        """Test a patch that does not fit returns an empty list."""
        self.assertEqual(partition_into_patches(toric_layout(2), 8, 2), [])

    def test_nonpositive_arguments_raise(self):
        """Test patch size and gap must be positive."""
        with self.assertRaises(ConfigurationError):
            partition_into_patches(TORIC5, 0, 1)

    def test_patch_count_large_torus(self):
        """Test toric L=40 at t=0 holds at least n/100 patches."""
        layout = toric_layout(40)
        patches = partition_into_patches(layout, 8, 2)
        self.assertGreaterEqual(len(patches), layout.n // 100)
        self.assertEqual(len(patches), 64)
        members = [q for p in patches for q in p.qubits]
        self.assertEqual(len(members), len(set(members)))

    def test_patches_farther_than_gap(self):
        """Test every pair of patches is separated by more than the gap."""
        layout = toric_layout(12)
        patches = partition_into_patches(layout, 8, 2)
        self.assertEqual(len(patches), 4)
        for a, b in itertools.combinations(patches, 2):
            self.assertGreater(region_distance(layout, a, b), 2)

    def test_deterministic(self):
        """Test repeated partitions agree."""
        first = partition_into_patches(TORIC5, 4, 1)
        second = partition_into_patches(TORIC5, 4, 1)
        self.assertEqual([p.qubits for p in first], [p.qubits for p in second])
