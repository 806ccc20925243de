"""The angle metric d(alpha, beta) = arccos B(alpha, beta) on Z_+^n.

The limiting jet angles turn the multi-index lattice into a metric space:
adjacent points are orthogonal, the lattice splits into 2^n mutually
orthogonal parity cosets, |cos d| is controlled by the normalized multiset
difference, and shifting both points along an axis drives them toward
collinearity.

Run:  python demos/04_lattice_geometry.py
"""
import math

from spectraljet import (
    angle_distance,
    coset_of,
    distance_comparison_check,
    enumerate_multiindices,
    from_indices,
    run_triple_suite,
    stabilization_scan,
    verify_metric_axioms,
)

print("=== a few distances (n = 2) ===")
for ia, ib in (([1, 1], [2, 2]), ([1], [2]), ([1, 2], [1, 2]),
               ([1, 1], [1, 1, 2, 2]), ([1, 1, 1], [1])):
    a, b = from_indices(ia, 2), from_indices(ib, 2)
    d = angle_distance(a, b)
    print(f"d({a.text() or 'empty':10s}, {b.text() or 'empty':10s})"
          f" = {d.radians:.6f} rad   (cos = {d.exact_cos.value:+.6f})")
print(f"arccos(1/3) = {math.acos(1/3):.6f}: second jets along different axes")

print()
print("=== parity cosets ===")
points = enumerate_multiindices(2, 2)
for coset in sorted({coset_of(m) for m in points}):
    members = [m.text() or "empty" for m in points if coset_of(m) == coset]
    print(f"coset {coset}: {', '.join(members)}")
print("points in different cosets sit at right angles; 2^n cosets in all")

print()
print("=== distance comparison |cos d| <= 1 - delta d0/(|a|+|b|) ===")
for ia, ib in (([1, 1], [2, 2]), ([1, 1, 1, 1], [1, 1]), ([1, 2, 2], [1])):
    a, b = from_indices(ia, 2), from_indices(ib, 2)
    chk = distance_comparison_check(a, b)
    print(f"pair ({a.text()}, {b.text()}): lhs = {chk.lhs:.4f}"
          f" <= rhs = {chk.rhs:.4f}  [{'OK' if chk.holds else 'VIOLATED'}]")

print()
print("=== metric axioms on random triples ===")
report = verify_metric_axioms(n=3, max_degree=8, sample_count=4000, seed=42)
print(f"{report.triples_checked} triples: {report.triangle_violations} triangle"
      f" violations, max slack {report.max_triangle_slack:+.2e}"
      f" (worst triple {report.worst_triple})")

rows, suite = run_triple_suite(n=3, max_degree=8, count=4000, seed=42)
print(f"comparison inequality margin on the sample:"
      f" min (1-|cos d|)(|a|+|b|)/d0 = {suite.min_comparison_margin:.4f}"
      f"  (tested delta = 0.25)")

print()
print("=== stabilization along an axis ===")
a, b = from_indices([1, 1], 2), from_indices([2, 2], 2)
scan = stabilization_scan(a, b, 1, 10)
angles = "  ".join(f"{d.radians:.4f}" for d in scan.diagonal)
print(f"d(a + k e_1, b + k e_1): {angles}")
print(f"limit {scan.diagonal_limit:.6f} rad; one-sided shifts instead tend to"
      f" pi/2 = {scan.one_sided_limit:.6f}")
