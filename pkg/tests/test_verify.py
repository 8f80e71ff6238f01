import math

import numpy as np
import pytest

from circlepattern import (
    AngleAssignment,
    contact_graph,
    flower_check,
    solve_euclidean,
    solve_spherical,
    verify_pattern,
)
from circlepattern import shapes
from circlepattern.errors import MalformedPattern
from circlepattern.verify import CirclePattern, count_interstices

PI = math.pi


@pytest.fixture(scope="module")
def descartes(tetra_mod=None):
    t = shapes.tetrahedron()
    th = AngleAssignment.constant(t, 0.0)
    cfg, _ = solve_euclidean(t, th, 0)
    return CirclePattern.from_euclidean(t, th, cfg)


@pytest.fixture(scope="module")
def octa_third_pi():
    t = shapes.octahedron()
    th = AngleAssignment.constant(t, PI / 3)
    cfg, _ = solve_spherical(t, th)
    return CirclePattern.from_spherical(t, th, cfg)


class TestVerifyPattern:
    def test_descartes_instance(self, descartes):
        rep = verify_pattern(descartes)
        assert rep.passed
        assert rep.contact_graph_ok
        assert rep.interstice_count == 4  # three curvilinear gaps + outer
        assert rep.irreducible_ok
        assert rep.empty_triple_ok

    def test_octahedron_no_interstices(self, octa_third_pi):
        rep = verify_pattern(octa_third_pi)
        assert rep.passed
        assert rep.interstice_count == 0
        assert rep.non_adjacent_disjoint_ok
        assert rep.irreducible_ok

    def test_inflated_disk_fails_disjointness(self, octa_third_pi):
        # inflate one disk until it genuinely overlaps its antipode (this
        # pattern has a comfortable disjointness margin, I = 2)
        p = octa_third_pi
        bad = CirclePattern(
            p.triangulation, p.theta, p.mode, p.centers.copy(),
            p.radii * np.where(np.arange(6) == 0, 2.5, 1.0), p.marked_face
        )
        rep = verify_pattern(bad)
        assert not rep.passed
        assert not rep.non_adjacent_disjoint_ok
        antipode = next(
            v for v in range(6) if not p.triangulation.has_edge(0, v) and v != 0
        )
        assert (0, antipode) in rep.offending_pairs

    def test_resolution_doubling_stable(self, descartes):
        lo = verify_pattern(descartes, boundary_samples=2048, interior_grid=128)
        hi = verify_pattern(descartes, boundary_samples=4096, interior_grid=256)
        for field in ("passed", "contact_graph_ok", "non_adjacent_disjoint_ok",
                      "irreducible_ok", "flower_ok", "lens_relation_ok",
                      "empty_triple_ok"):
            assert getattr(lo, field) == getattr(hi, field)

    def test_malformed_rejected(self, descartes):
        with pytest.raises(MalformedPattern):
            CirclePattern(
                descartes.triangulation, descartes.theta, "euclidean",
                descartes.centers, -descartes.radii
            )


class TestFlower:
    def test_solved_octahedron_all_vertices(self, octa_third_pi):
        for v in range(6):
            ok, witness = flower_check(octa_third_pi, v)
            assert ok, (v, witness)

    def test_displaced_disk_fails_with_witness(self):
        # the flower cover is robust to shrinking here (the tiny disks sit
        # inside their own stars), so force the failure by pushing a disk
        # out of its star region entirely
        t = shapes.octahedron()
        th = AngleAssignment.constant(t, PI / 4)
        cfg, _ = solve_euclidean(t, th, 0)
        p = CirclePattern.from_euclidean(t, th, cfg)
        v = next(u for u in range(6) if u not in p.marked_face)
        centers = p.centers.copy()
        centers[v] += 1.0
        bad = CirclePattern(t, th, "euclidean", centers, p.radii, p.marked_face)
        ok, witness = flower_check(bad, v)
        assert not ok
        assert witness is not None

    def test_euclidean_boundary_vertices(self, descartes):
        # marked-face vertices use the unbounded outer region as their star
        for v in descartes.marked_face:
            ok, witness = flower_check(descartes, v)
            assert ok, (v, witness)


class TestContactGraph:
    def test_solved_instance_isomorphic(self, descartes):
        _, ok, missing, extra, nested = contact_graph(descartes)
        assert ok and not missing and not extra and not nested

    def test_separated_circles_lose_edge(self, descartes):
        p = descartes
        centers = p.centers.copy()
        far = next(v for v in range(4) if v not in p.marked_face)
        centers[far] += 50.0
        bad = CirclePattern(p.triangulation, p.theta, p.mode, centers, p.radii,
                            p.marked_face)
        _, ok, missing, extra, _ = contact_graph(bad)
        assert not ok
        assert any(far in e for e in missing)

    def test_concentric_equal_circles_are_nested_not_edges(self, descartes):
        p = descartes
        t = p.triangulation
        centers = np.zeros(4, dtype=complex)
        radii = np.ones(4)
        bad = CirclePattern(t, p.theta, "euclidean", centers, radii)
        edges, ok, missing, extra, nested = contact_graph(bad)
        assert not ok
        # concentric equal pairs have inversive distance -1: nested class
        assert len(nested) == 6 and len(edges) == 0


class TestInterstices:
    def test_grid_stability_on_descartes(self, descartes):
        for grid in (256, 512, 1024):
            n, _ = count_interstices(descartes, grid=grid)
            assert n == 4

    def test_sphere_samples_stability(self, octa_third_pi):
        for samples in (10000, 20000, 40000):
            n, _ = count_interstices(octa_third_pi, sphere_samples=samples)
            assert n == 0

    def test_shrunken_pattern_shows_interstices(self, octa_third_pi):
        p = octa_third_pi
        bad = CirclePattern(
            p.triangulation, p.theta, p.mode, p.centers.copy(), p.radii * 0.8,
            p.marked_face
        )
        n, samples = count_interstices(bad)
        assert n > 0
        assert samples


class TestThreeCircleRelations:
    def test_lens_relation_sampled(self):
        """Random mutually intersecting triples with a detected containment
        always satisfy the angle relation."""
        from circlepattern.triples import containment_angle_check

        rng = np.random.default_rng(41)
        detected = 0
        tried = 0
        while detected < 100 and tried < 20000:
            tried += 1
            d = rng.uniform(0.2, 1.8)
            centers = [0j, d + 0j]
            radii = [1.0, 1.0]
            corners_y = math.sqrt(max(1.0 - (d / 2) ** 2, 0.0))
            c3 = complex(d / 2 + rng.normal(0, 0.2), rng.normal(0, 0.2))
            r3 = corners_y + rng.uniform(0.05, 0.8)
            centers.append(c3)
            radii.append(r3)
            try:
                recs = containment_angle_check("euclidean", centers, radii)
            except Exception:
                continue
            for rec in recs:
                if rec.contained and not rec.single_point:
                    detected += 1
                    assert rec.lhs - rec.rhs >= -1e-9
        assert detected == 100

    def test_empty_triple_sampled(self):
        """Admissible triples with angle sum below pi never share a point."""
        from circlepattern.triples import (
            TripleSpec,
            place_triple,
            triple_intersection_empty,
        )

        rng = np.random.default_rng(43)
        done = 0
        while done < 100:
            th = rng.uniform(0.0, PI, 3)
            if th.sum() >= PI - 1e-9:
                continue
            radii = tuple(rng.uniform(0.1, 2.0, 3))
            spec = TripleSpec("euclidean", radii, tuple(th))
            centers = list(place_triple(spec))
            assert triple_intersection_empty("euclidean", centers, list(radii))
            done += 1
