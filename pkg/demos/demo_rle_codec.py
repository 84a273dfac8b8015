"""Round-tripping masks through the column-major run-length codec.

The contract files store every kernel mask as alternating
background/foreground run counts over the column-major pixel sequence,
starting with a (possibly zero) background run. This walkthrough encodes
a small mask by hand, shows the counts, and verifies the decode.
"""

import numpy as np

from maizekpr import mask_stats, rle_decode, rle_encode

mask = np.zeros((5, 4), dtype=bool)
mask[1:4, 1:3] = True  # a 2x3 block
mask[0, 3] = True      # plus a lone pixel top-right

print("mask (1 = foreground):")
print(mask.astype(int))

counts = rle_encode(mask)
print("\nrun counts (column-major, background first):", counts)
print("sum of counts:", sum(counts), "= 4 x 5 pixels")

back = rle_decode(counts, width=4, height=5)
print("\ndecode(encode(mask)) identical:", bool((back == mask).all()))

area, bbox = mask_stats(mask)
print(f"area {area} px, tight bbox (x, y, w, h) = {bbox}")
