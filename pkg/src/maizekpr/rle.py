"""Column-major run-length codec for binary masks.

Masks are numpy bool arrays of shape ``(height, width)``. Run counts
alternate background/foreground segments of the flattened column-major
(Fortran-order) pixel sequence and always begin with a background run,
which may have length zero when the very first pixel is foreground. This
is the uncompressed COCO convention, and it is the on-disk format of the
mask contract files, so the encoder is canonical: apart from that single
optional leading zero it never emits a zero-length run.
"""

from __future__ import annotations

import numpy as np

from .errors import SumMismatchError


def rle_decode(counts, width: int, height: int) -> np.ndarray:
    """Rebuild a ``(height, width)`` bool mask from column-major run counts.

    Raises SumMismatchError when the counts do not sum to width * height.
    """
    if width < 1 or height < 1:
        raise ValueError(f"mask dimensions must be positive, got {width}x{height}")
    arr = np.asarray(counts, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("counts must be a flat sequence")
    if arr.size and arr.min() < 0:
        raise ValueError("counts must be non-negative")
    total = int(arr.sum())
    if total != width * height:
        raise SumMismatchError(
            f"counts sum to {total}, expected {width}x{height}={width * height}"
        )
    values = (np.arange(arr.size) % 2).astype(bool)
    flat = np.repeat(values, arr)
    return flat.reshape((height, width), order="F")


def rle_encode(mask) -> list[int]:
    """Encode a bool mask into column-major run counts.

    Inverse of :func:`rle_decode`. The output is canonical: no interior
    zero counts, and a leading zero only when pixel (0, 0) is foreground.
    """
    arr = np.asarray(mask, dtype=bool)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("mask must be a non-empty 2-D array")
    flat = arr.ravel(order="F")
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], changes, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return [int(r) for r in runs]


def foreground_segments(counts, width: int, height: int):
    """Half-open ``(starts, ends)`` index arrays of the foreground runs.

    Indices address the flattened column-major pixel sequence; pixel ``i``
    sits at column ``i // height``, row ``i % height``. Cheap segment-level
    view used by candidate validation and cropped decoding, which avoids
    materialising full-frame masks for large images.
    """
    arr = np.asarray(counts, dtype=np.int64)
    total = int(arr.sum())
    if total != width * height:
        raise SumMismatchError(
            f"counts sum to {total}, expected {width}x{height}={width * height}"
        )
    ends = np.cumsum(arr)
    starts = ends - arr
    return starts[1::2], ends[1::2]
