"""Stress-testing the counter against its construction oracle.

Sweeps center jitter from 0 to 20% of the column pitch over 40 ears per
level and reports how often the three-path estimate lands within one
kernel of the construction truth. Jitter-free ears must be exact.
"""

import numpy as np

from maizekpr import filter_masks, three_path_kpr
from maizekpr.synth import SyntheticEarSpec, generate_ear

rng = np.random.default_rng(2)
base_pitch = SyntheticEarSpec().col_spacing

print(f"{'jitter':>10} {'exact':>7} {'within 1':>9} {'mean |err|':>11}")
for frac in (0.0, 0.05, 0.10, 0.15, 0.20):
    errors = []
    for i in range(40):
        spec = SyntheticEarSpec(
            rows=int(rng.integers(10, 18)),
            kernels_per_row=int(rng.integers(20, 40)),
            immature_tip=int(rng.integers(0, 4)),
            jitter_px=frac * base_pitch,
            seed=3000 + i,
        )
        candidates, truth = generate_ear(spec)
        res = three_path_kpr(filter_masks(candidates), truth.height)
        errors.append(res.kpr_rounded - truth.mature_per_row)
    errors = np.array(errors)
    print(f"{frac * 100:9.0f}% {np.mean(errors == 0):7.1%} "
          f"{np.mean(np.abs(errors) <= 1):9.1%} {np.abs(errors).mean():11.3f}")
