"""Tracing one kernel row as a cheapest path.

Shows the full single-row trace on a synthetic ear with four immature
tip kernels per row: neighbour graph, endpoint rule (second bottom-most
to second topmost), Dijkstra, and the consecutive-prefix subtraction of
under-sized tip kernels.
"""

from maizekpr import build_adjacency, count_kpr_single, filter_masks, select_endpoints
from maizekpr.synth import SyntheticEarSpec, generate_ear

spec = SyntheticEarSpec(rows=12, kernels_per_row=28, immature_tip=4, jitter_px=6.0, seed=21)
candidates, truth = generate_ear(spec)
kernels = filter_masks(candidates)

graph = build_adjacency(kernels)
edges = len(graph.adjacency) // 2
print(f"{len(kernels)} kernels, {edges} graph edges "
      f"({2 * edges / len(kernels):.2f} per kernel after angle pruning)")

start, end = select_endpoints(kernels)
by_id = {k.id: k for k in kernels}
print(f"start kernel {start} at y={by_id[start].center[1]:.0f} (second bottom-most)")
print(f"end   kernel {end} at y={by_id[end].center[1]:.0f} (second topmost)")

path = count_kpr_single(kernels)
print(f"\npath: {path.raw_count} kernels over {path.total_length:.0f} px")
print(f"immature tip run: {path.immature_count} (areas below 2000 px)")
print(f"kernels-per-row: {path.mature_count}  (truth: {truth.mature_per_row})")
