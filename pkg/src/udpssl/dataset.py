"""Dataset ingestion, normalization, subsampling and semi-supervised splits.

All randomized operations take an integer seed and use the PCG64 generator,
so results are reproducible bit-for-bit across platforms and runs; the OS
random source is never consulted.  Datasets are immutable after
construction (the underlying arrays are marked read-only) and safe to share
across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArgumentError,
    BalanceError,
    ConsistencyError,
    FormatError,
    LengthError,
    ParseError,
)

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass(frozen=True)
class Dataset:
    """A row-major feature matrix with optional integer class labels.

    Attributes
    ----------
    features : (M, d) float64 array, finite entries only.
    labels : (M,) int array with values in [0, class_count), or None.
    class_count : number of classes C (0 when unlabeled).
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    class_count: int = 0

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        if feats.ndim != 2:
            raise ArgumentError(f"features must be 2-D, got shape {feats.shape}")
        if feats.shape[1] < 1:
            raise ArgumentError("features must have at least one column")
        if not np.isfinite(feats).all():
            raise ArgumentError("features contain NaN or Inf entries")
        feats.flags.writeable = False
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labs = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
            if labs.shape != (feats.shape[0],):
                raise ConsistencyError(
                    f"labels length {labs.shape} does not match {feats.shape[0]} rows"
                )
            if labs.size and (labs.min() < 0 or labs.max() >= self.class_count):
                raise ArgumentError(
                    f"labels must lie in [0, {self.class_count})"
                )
            labs.flags.writeable = False
            object.__setattr__(self, "labels", labs)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset in the given index order (labels carried along)."""
        indices = np.asarray(indices, dtype=np.int64)
        labels = self.labels[indices] if self.labels is not None else None
        return Dataset(self.features[indices], labels, self.class_count)

    def without_labels(self) -> "Dataset":
        return Dataset(self.features, None, 0)


@dataclass(frozen=True)
class SemiSplit:
    """Labeled / unlabeled / test partition of one source dataset.

    ``unlabeled`` carries no labels; the true labels of those rows are kept
    in ``audit_unlabeled_labels`` for metrics and audits only.  Training
    code receives the split and can only ever see ``unlabeled.features``.
    """

    labeled: Dataset
    unlabeled: Dataset
    test: Dataset
    audit_unlabeled_labels: np.ndarray = field(repr=False, default=None)

    def stacked_features(self) -> np.ndarray:
        """Labeled rows first, then unlabeled: the row order graphs are built on."""
        return np.vstack([self.labeled.features, self.unlabeled.features])


def _read_be32(buf: bytes, offset: int, path: str) -> int:
    if offset + 4 > len(buf):
        raise LengthError(f"{path}: truncated header")
    return struct.unpack_from(">I", buf, offset)[0]


def load_idx(images_path, labels_path) -> Dataset:
    """Load an IDX image/label file pair into a Dataset.

    Pixels are scaled from [0, 255] to [0, 1].  The image file must carry
    magic 0x00000803 (count, rows, cols header), the label file 0x00000801.
    """
    with open(images_path, "rb") as f:
        img_buf = f.read()
    with open(labels_path, "rb") as f:
        lab_buf = f.read()

    magic = _read_be32(img_buf, 0, str(images_path))
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(f"{images_path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}")
    count = _read_be32(img_buf, 4, str(images_path))
    rows = _read_be32(img_buf, 8, str(images_path))
    cols = _read_be32(img_buf, 12, str(images_path))
    expected = 16 + count * rows * cols
    if len(img_buf) != expected:
        raise LengthError(
            f"{images_path}: payload is {len(img_buf)} bytes, header implies {expected}"
        )

    magic = _read_be32(lab_buf, 0, str(labels_path))
    if magic != IDX_LABEL_MAGIC:
        raise FormatError(f"{labels_path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}")
    lab_count = _read_be32(lab_buf, 4, str(labels_path))
    if len(lab_buf) != 8 + lab_count:
        raise LengthError(
            f"{labels_path}: payload is {len(lab_buf)} bytes, header implies {8 + lab_count}"
        )
    if lab_count != count:
        raise ConsistencyError(
            f"image count {count} != label count {lab_count}"
        )
    if count == 0:
        raise FormatError(f"{images_path}: empty dataset")

    pixels = np.frombuffer(img_buf, dtype=np.uint8, offset=16)
    features = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0
    labels = np.frombuffer(lab_buf, dtype=np.uint8, offset=8).astype(np.int64)
    return Dataset(features, labels, int(labels.max()) + 1)


def write_idx(ds: Dataset, images_path, labels_path, image_shape=None) -> None:
    """Write a Dataset as an IDX image/label pair (inverse of load_idx).

    Features are expected in [0, 1] and are quantized back to bytes with
    rounding; an exact round-trip holds for data loaded from IDX files.
    """
    if ds.labels is None:
        raise ArgumentError("write_idx requires labels")
    m, d = ds.features.shape
    if image_shape is None:
        side = int(round(d ** 0.5))
        if side * side != d:
            raise ArgumentError(f"{d} columns is not square; pass image_shape")
        image_shape = (side, side)
    rows, cols = image_shape
    if rows * cols != d:
        raise ArgumentError(f"image_shape {image_shape} does not match {d} columns")
    pixels = np.clip(np.rint(ds.features * 255.0), 0, 255).astype(np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, m, rows, cols))
        f.write(pixels.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABEL_MAGIC, m))
        f.write(ds.labels.astype(np.uint8).tobytes())


def load_csv(path, has_labels: bool = True) -> Dataset:
    """Load a headerless comma-separated file: d float columns, then an
    integer label column when ``has_labels``.
    """
    rows = []
    labels = []
    width = None
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
                if has_labels and width < 2:
                    raise FormatError(f"{path}:{lineno}: need at least one feature and a label")
            elif len(cells) != width:
                raise FormatError(
                    f"{path}:{lineno}: row has {len(cells)} cells, expected {width}"
                )
            if has_labels:
                feat_cells, label_cell = cells[:-1], cells[-1]
                try:
                    labels.append(int(label_cell))
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: bad label {label_cell!r}") from exc
            else:
                feat_cells = cells
            try:
                rows.append([float(c) for c in feat_cells])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric cell") from exc
    if not rows:
        raise FormatError(f"{path}: empty file")
    features = np.asarray(rows, dtype=np.float64)
    if has_labels:
        labs = np.asarray(labels, dtype=np.int64)
        if labs.min() < 0:
            raise ParseError(f"{path}: negative label")
        return Dataset(features, labs, int(labs.max()) + 1)
    return Dataset(features, None, 0)


def save_csv(ds: Dataset, path) -> None:
    """Write features (and labels, if present) as CSV with round-trip precision."""
    with open(path, "w") as f:
        for i in range(ds.n_rows):
            cells = [f"{v:.17g}" for v in ds.features[i]]
            if ds.labels is not None:
                cells.append(str(int(ds.labels[i])))
            f.write(",".join(cells) + "\n")


def filter_classes(ds: Dataset, keep) -> Dataset:
    """Keep rows whose label is in ``keep``; labels re-indexed densely in
    keep order; relative row order preserved.
    """
    if ds.labels is None:
        raise ArgumentError("filter_classes requires labels")
    keep = list(keep)
    if not keep:
        raise ArgumentError("keep must be non-empty")
    present = set(np.unique(ds.labels).tolist())
    unknown = [c for c in keep if c not in present]
    if unknown:
        raise ArgumentError(f"unknown classes {unknown}")
    remap = {c: i for i, c in enumerate(keep)}
    mask = np.isin(ds.labels, keep)
    new_labels = np.asarray([remap[int(c)] for c in ds.labels[mask]], dtype=np.int64)
    return Dataset(ds.features[mask], new_labels, len(keep))


def subsample(ds: Dataset, n: int, seed: int) -> Dataset:
    """Draw n rows uniformly without replacement (PCG64-deterministic)."""
    if n > ds.n_rows:
        raise ArgumentError(f"cannot draw {n} rows from {ds.n_rows}")
    rng = np.random.Generator(np.random.PCG64(seed))
    indices = rng.choice(ds.n_rows, size=n, replace=False)
    return ds.take(indices)


def split_semi(
    ds: Dataset,
    n_labeled: int,
    n_unlabeled: int,
    seed: int,
    test: Dataset | None = None,
) -> SemiSplit:
    """Partition into a class-balanced labeled set, an unlabeled set, and a
    test set.

    The labeled set takes ``n_labeled // C`` rows per class plus one extra
    for the first ``n_labeled % C`` class ids (balanced to within one).
    Unlabeled rows are drawn uniformly from the remainder.  The rest is the
    test partition unless an external ``test`` dataset is supplied.  The
    unlabeled partition carries no labels; its true labels are retained
    separately for audit only.
    """
    if ds.labels is None:
        raise ArgumentError("split_semi requires labels")
    c = ds.class_count
    if n_labeled < c:
        raise ArgumentError(f"need at least one labeled row per class ({c})")
    if n_labeled + n_unlabeled > ds.n_rows:
        raise ArgumentError(
            f"{n_labeled}+{n_unlabeled} rows requested from {ds.n_rows}"
        )
    rng = np.random.Generator(np.random.PCG64(seed))

    base, extra = divmod(n_labeled, c)
    labeled_parts = []
    for cls in range(c):
        quota = base + (1 if cls < extra else 0)
        pool = np.flatnonzero(ds.labels == cls)
        if len(pool) < quota:
            raise BalanceError(
                f"class {cls} has {len(pool)} rows, needs {quota} labeled"
            )
        labeled_parts.append(rng.permutation(pool)[:quota])
    labeled_idx = np.sort(np.concatenate(labeled_parts))

    remainder = np.setdiff1d(np.arange(ds.n_rows), labeled_idx, assume_unique=False)
    remainder = rng.permutation(remainder)
    unlabeled_idx = np.sort(remainder[:n_unlabeled])
    rest_idx = np.sort(remainder[n_unlabeled:])

    labeled = ds.take(labeled_idx)
    unlabeled_full = ds.take(unlabeled_idx)
    unlabeled = unlabeled_full.without_labels()
    if test is None:
        if len(rest_idx) == 0:
            raise ArgumentError("no rows left for the test partition; pass an external test set")
        test = ds.take(rest_idx)
    return SemiSplit(
        labeled=labeled,
        unlabeled=unlabeled,
        test=test,
        audit_unlabeled_labels=unlabeled_full.labels,
    )


def normalize(ds: Dataset, mode: str) -> Dataset:
    """Normalize features: ``unit_range`` rescales the whole matrix to
    [0, 1]; ``zscore`` standardizes per column (zero-variance columns map
    to zero); ``none`` is the identity.
    """
    if mode == "none":
        return ds
    x = ds.features
    if mode == "unit_range":
        lo, hi = x.min(), x.max()
        span = hi - lo
        if span == 0.0:
            out = np.zeros_like(x)
        else:
            out = (x - lo) / span
    elif mode == "zscore":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        out = np.where(std > 0, (x - mean) / np.where(std > 0, std, 1.0), 0.0)
    else:
        raise ArgumentError(f"unknown normalization mode {mode!r}")
    return Dataset(out, ds.labels, ds.class_count)
