"""Dataset ingestion and preparation.

Handles the IDX binary container (big-endian magic and dimension header,
raw unsigned-byte payload), the standard preprocessing for training
(per-feature mean centering plus a bias row of ones at the bottom of the
data block), and seeded synthetic datasets for the regression and
staircase experiments. Pixels are scaled to [0, 1] before centering so
error magnitudes stay predictable.

File I/O is single-threaded; everything after loading is pure.
"""

from __future__ import annotations

import enum
import math
import random
import struct
from array import array
from dataclasses import dataclass
from typing import Iterator

from .activations import Activation, ActivationKind, apply_activation
from .backend import kernels as _K
from .errors import BadMagicError, ShapeMismatchError, TruncatedFileError
from .matrix import Matrix, _zero_buf

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


@dataclass
class RawDataset:
    """Images as a (n_pixels x n_samples) matrix in [0, 1], labels as ints."""

    images: Matrix
    labels: list[int]

    def __post_init__(self):
        if self.images.cols != len(self.labels):
            raise ShapeMismatchError(
                f"{self.images.cols} images but {len(self.labels)} labels"
            )


class LabelEncoding(enum.Enum):
    ZERO_ONE = "zero-one"          # one-hot in {0, 1}, pairs with softmax
    PLUS_MINUS_ONE = "plus-minus"  # one-hot in {-1, +1}, pairs with tanh


@dataclass
class PreparedDataset:
    """Mean-centered features with a bias row, one-hot targets, and the
    feature mean used (kept so test data reuses the training statistics)."""

    x_block: Matrix       # (n_features+1) x m, last row all ones
    y_block: Matrix       # n_classes x m
    feature_mean: Matrix  # n_features x 1


def _read_header(blob: bytes, path, expect_magic: int, n_dims: int) -> tuple:
    header_len = 4 * (1 + n_dims)
    if len(blob) < header_len:
        raise TruncatedFileError(f"{path}: file shorter than its {header_len}-byte header")
    fields = struct.unpack_from(f">{1 + n_dims}I", blob, 0)
    magic = fields[0]
    if magic != expect_magic:
        raise BadMagicError(
            f"{path}: magic 0x{magic:08x}, expected 0x{expect_magic:08x}"
        )
    return fields[1:]


def load_idx_images(path) -> Matrix:
    """Load an IDX3 image file into a (rows*cols) x count matrix scaled to [0, 1].

    Pixels of one image occupy one column. Raises BadMagicError for a wrong
    record type, TruncatedFileError when the payload is shorter than the
    header declares, and OSError for plain I/O failures.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    count, rows, cols = _read_header(blob, path, _IDX_IMAGES_MAGIC, 3)
    n_pixels = rows * cols
    payload = blob[16:]
    if len(payload) < count * n_pixels:
        raise TruncatedFileError(
            f"{path}: header declares {count} images of {rows}x{cols} but the "
            f"payload holds only {len(payload)} bytes"
        )
    if count == 0 or n_pixels == 0:
        raise TruncatedFileError(f"{path}: empty image file")
    out = _zero_buf(n_pixels * count)
    _K.pixels_to_features(payload[: count * n_pixels], n_pixels, count, out)
    return Matrix._raw(n_pixels, count, out)


def load_idx_labels(path) -> list[int]:
    """Load an IDX1 label file into a list of small non-negative ints."""
    with open(path, "rb") as fh:
        blob = fh.read()
    (count,) = _read_header(blob, path, _IDX_LABELS_MAGIC, 1)
    payload = blob[8:]
    if len(payload) < count:
        raise TruncatedFileError(
            f"{path}: header declares {count} labels but the payload holds "
            f"only {len(payload)} bytes"
        )
    return list(payload[:count])


def save_idx_images(images: Matrix, rows: int, cols: int, path) -> None:
    """Write a (rows*cols) x count matrix of [0, 1] values as an IDX3 file.

    Each entry is rounded to the nearest byte; values that came from
    load_idx_images round-trip bit-exactly.
    """
    if images.rows != rows * cols:
        raise ShapeMismatchError(
            f"matrix has {images.rows} pixel rows, expected {rows}x{cols}={rows * cols}"
        )
    count = images.cols
    payload = bytearray(rows * cols * count)
    data = images.data
    n_pixels = images.rows
    for k in range(count):
        base = k * n_pixels
        for p in range(n_pixels):
            v = int(round(data[p * count + k] * 255.0))
            payload[base + p] = min(255, max(0, v))
    with open(path, "wb") as fh:
        fh.write(struct.pack(">4I", _IDX_IMAGES_MAGIC, count, rows, cols))
        fh.write(bytes(payload))


def save_idx_labels(labels, path) -> None:
    for v in labels:
        if not (0 <= int(v) <= 255):
            raise ValueError(f"label {v} does not fit in one byte")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">2I", _IDX_LABELS_MAGIC, len(labels)))
        fh.write(bytes(int(v) for v in labels))


def one_hot(labels, num_classes: int, encoding: LabelEncoding) -> Matrix:
    lo = 0.0 if encoding is LabelEncoding.ZERO_ONE else -1.0
    m = len(labels)
    buf = array("d", [lo]) * (num_classes * m)
    for k, label in enumerate(labels):
        if not (0 <= label < num_classes):
            raise ValueError(f"label {label} outside [0, {num_classes})")
        buf[label * m + k] = 1.0
    return Matrix._raw(num_classes, m, buf)


def prepare(
    raw: RawDataset,
    encoding: LabelEncoding,
    feature_mean: Matrix | None = None,
    num_classes: int | None = None,
) -> PreparedDataset:
    """Center features, append the bias row, and one-hot encode labels.

    With feature_mean absent the per-feature mean is computed from raw (the
    training path); passing the training mean back in reuses it unchanged
    (the test path: statistics are never recomputed).
    """
    images = raw.images
    if feature_mean is None:
        mean_buf = _zero_buf(images.rows)
        _K.row_means(images.data, images.rows, images.cols, mean_buf)
        feature_mean = Matrix._raw(images.rows, 1, mean_buf)
    elif feature_mean.shape != (images.rows, 1):
        raise ShapeMismatchError(
            f"feature_mean shape {feature_mean.shape} != ({images.rows}, 1)"
        )
    centered = _zero_buf(images.size)
    _K.center_rows(images.data, images.rows, images.cols, feature_mean.data, centered)
    x_block = Matrix._raw(images.rows, images.cols, centered).with_bias_row()
    if num_classes is None:
        num_classes = max(raw.labels) + 1 if raw.labels else 1
    y_block = one_hot(raw.labels, num_classes, encoding)
    return PreparedDataset(x_block=x_block, y_block=y_block, feature_mean=feature_mean)


def make_staircase_dataset(
    m: int,
    w_true: float,
    act: Activation,
    x_range: tuple[float, float] = (-5.0, 5.0),
    seed: int = 0,
) -> tuple[Matrix, Matrix]:
    """Single-variable regression data y = staircase(w_true * x).

    x is sampled uniformly from x_range with the given seed; the returned
    x block carries the bias row. Identical seeds give bitwise-identical
    datasets.
    """
    if m < 1:
        raise ValueError(f"need at least one sample, got {m}")
    if act.kind is not ActivationKind.STAIRCASE:
        raise ValueError(f"expected a staircase activation, got {act.kind.value}")
    lo, hi = x_range
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"bad x_range {x_range}")
    rng = random.Random(f"staircase:{seed}")
    xs = Matrix(1, m, [rng.uniform(lo, hi) for _ in range(m)])
    y_block = apply_activation(act, xs.scale(w_true))
    return xs.with_bias_row(), y_block


def batch_iterator(
    prepared: PreparedDataset,
    batch_size: int,
    seed: int = 0,
    shuffle: bool = True,
) -> Iterator[tuple[Matrix, Matrix]]:
    """One epoch of (x, y) column batches; the final batch may be short.

    Columns are optionally shuffled by a generator seeded from seed; every
    column appears exactly once per epoch.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    m = prepared.x_block.cols
    order = list(range(m))
    if shuffle:
        random.Random(f"batches:{seed}").shuffle(order)
    for start in range(0, m, batch_size):
        idx = order[start:start + batch_size]
        yield prepared.x_block.gather_columns(idx), prepared.y_block.gather_columns(idx)


def subset(prepared: PreparedDataset, n: int) -> PreparedDataset:
    """First n columns of a prepared dataset (deterministic truncation)."""
    if n < 1:
        raise ValueError(f"subset size must be >= 1, got {n}")
    n = min(n, prepared.x_block.cols)
    idx = list(range(n))
    return PreparedDataset(
        x_block=prepared.x_block.gather_columns(idx),
        y_block=prepared.y_block.gather_columns(idx),
        feature_mean=prepared.feature_mean,
    )
