"""I/O for BSDS segmentation files, label rasters and dataset directories.

The BSDS human segmentations ship as `.seg` text files: "key value" header
lines terminated by a bare ``data`` line, then one run per line -- four
integers ``s r c1 c2`` meaning label ``s`` occupies row ``r``, columns
``c1..c2`` inclusive.  Labels are 0-based in the files; this package reserves
0 for background, so the +1 shift happens here at the I/O boundary and
nowhere else.

Parse errors are precise: every failure names the 1-based line it was
detected on, with distinct exception types for a garbled header, a malformed
run line, a run outside the declared grid, overlapping runs, and incomplete
coverage.

Label maps also round-trip through single-channel lossless PNG (8-bit when
labels fit, 16-bit otherwise), with a seeded random color rendering available
for human viewing.

A *dataset directory* holds one subdirectory per image id containing the
member segmentation files (`.seg` or `.png`), plus an optional
``confidences.txt`` sidecar with lines ``member-filename confidence``
(``#`` comments allowed); members without a sidecar entry default to
confidence 1.0.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .types import LabelMap, SegmentationGroup, normalize_labels, region_count


class SegParseError(ValueError):
    """A `.seg` file failed to parse; ``line`` is the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = int(line)
        super().__init__(f"line {line}: {message}")


class HeaderError(SegParseError):
    """Missing or garbled header (bad key value, no ``data`` terminator)."""


class RunFormatError(SegParseError):
    """A data line is not four integers."""


class RunBoundsError(SegParseError):
    """A run lies outside the declared width/height or has negative label."""


class OverlapError(SegParseError):
    """A run covers a pixel an earlier run already covered."""


class CoverageError(SegParseError):
    """The runs ended without covering every pixel."""


@dataclass(frozen=True)
class SegFileHeader:
    """Parsed `.seg` header; unknown keys are preserved in ``extras``."""

    width: int
    height: int
    segments: int
    format: str | None = None
    extras: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for name in ("width", "height", "segments"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        object.__setattr__(
            self, "extras", tuple((str(k), str(v)) for k, v in self.extras)
        )


_REQUIRED_KEYS = ("width", "height", "segments")


def parse_seg_full(data: bytes | str) -> tuple[LabelMap, SegFileHeader]:
    """Parse a `.seg` file into a label map plus its header."""
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise HeaderError(1, f"not a text file: {exc}") from None
    else:
        text = data

    fields: dict[str, int] = {}
    fmt: str | None = None
    extras: list[tuple[str, str]] = []
    grid: np.ndarray | None = None
    width = height = 0
    last_line = 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        last_line = lineno
        if grid is None:
            if line == "data":
                missing = [k for k in _REQUIRED_KEYS if k not in fields]
                if missing:
                    raise HeaderError(
                        lineno, f"header missing {', '.join(missing)}"
                    )
                width = fields["width"]
                height = fields["height"]
                grid = np.full((height, width), -1, dtype=np.int64)
                continue
            key, _, value = line.partition(" ")
            value = value.strip()
            if key in _REQUIRED_KEYS:
                try:
                    number = int(value)
                except ValueError:
                    raise HeaderError(
                        lineno, f"{key} needs an integer value, got {value!r}"
                    ) from None
                if number < 1:
                    raise HeaderError(lineno, f"{key} must be >= 1, got {number}")
                fields[key] = number
            elif key == "format":
                fmt = value
            else:
                extras.append((key, value))
        else:
            parts = line.split()
            if len(parts) != 4:
                raise RunFormatError(
                    lineno, f"expected 4 integers 's r c1 c2', got {line!r}"
                )
            try:
                s, r, c1, c2 = (int(p) for p in parts)
            except ValueError:
                raise RunFormatError(
                    lineno, f"expected 4 integers 's r c1 c2', got {line!r}"
                ) from None
            if s < 0:
                raise RunBoundsError(lineno, f"negative label {s}")
            if not (0 <= r < height):
                raise RunBoundsError(
                    lineno, f"row {r} outside 0..{height - 1}"
                )
            if not (0 <= c1 <= c2 < width):
                raise RunBoundsError(
                    lineno,
                    f"columns {c1}..{c2} invalid for width {width}",
                )
            span = grid[r, c1 : c2 + 1]
            if (span != -1).any():
                first = c1 + int(np.argmax(span != -1))
                raise OverlapError(
                    lineno, f"pixel (row {r}, col {first}) covered twice"
                )
            grid[r, c1 : c2 + 1] = s

    if grid is None:
        raise HeaderError(last_line, "no 'data' line found")
    uncovered = int((grid == -1).sum())
    if uncovered:
        raise CoverageError(last_line, f"{uncovered} pixels left uncovered")

    header = SegFileHeader(
        width=width,
        height=height,
        segments=fields["segments"],
        format=fmt,
        extras=tuple(extras),
    )
    # files store 0-based labels; 0 is reserved for background internally
    return LabelMap(grid + 1), header


def parse_seg(data: bytes | str) -> LabelMap:
    """Parse a `.seg` file into a label map (labels shifted to 1-based)."""
    label_map, _ = parse_seg_full(data)
    return label_map


_RESERVED_KEYS = frozenset(_REQUIRED_KEYS) | {"format", "data"}


def write_seg(label_map: LabelMap, extras=()) -> bytes:
    """Serialize a background-free label map as BSDS `.seg` bytes.

    Labels are normalized, shifted back to 0-based, and emitted as maximal
    row-major runs; ``parse_seg(write_seg(m))`` partition-equals ``m``.
    """
    norm = normalize_labels(label_map)
    if (norm.labels == 0).any():
        raise ValueError(
            "the .seg format has no background concept; label 0 present"
        )
    height, width = norm.shape
    zero_based = norm.labels.astype(np.int64) - 1

    lines = ["format ascii cr"]
    for key, value in extras:
        key = str(key)
        if key in _RESERVED_KEYS:
            raise ValueError(f"extra header key {key!r} is reserved")
        lines.append(f"{key} {value}")
    lines.append(f"width {width}")
    lines.append(f"height {height}")
    lines.append(f"segments {region_count(norm)}")
    lines.append("data")
    for r in range(height):
        row = zero_based[r]
        breaks = np.flatnonzero(row[1:] != row[:-1]) + 1
        start = 0
        for end in (*breaks.tolist(), width):
            lines.append(f"{row[start]} {r} {start} {end - 1}")
            start = end
    return ("\n".join(lines) + "\n").encode("ascii")


def write_label_image(label_map: LabelMap, dest, bits: int | None = None):
    """Write labels as a single-channel lossless PNG (pixel value = label).

    ``bits`` may be 8 or 16; by default the smallest depth that fits is
    chosen.  Labels above 65535 cannot be stored this way.
    """
    arr = label_map.labels
    top = int(arr.max()) if arr.size else 0
    if bits is None:
        bits = 8 if top <= 255 else 16
    if bits == 8:
        if top > 255:
            raise ValueError(
                f"label {top} does not fit 8 bits; pass bits=16"
            )
        image = Image.fromarray(arr.astype(np.uint8), mode="L")
    elif bits == 16:
        if top > 65535:
            raise ValueError(f"label {top} does not fit 16 bits")
        image = Image.fromarray(arr.astype(np.uint16))
    else:
        raise ValueError(f"bits must be 8 or 16, got {bits}")
    image.save(dest, format="PNG")


_LABEL_MODES = ("L", "I", "I;16")


def read_label_image(source) -> LabelMap:
    """Read a label map from a single-channel lossless raster.

    Accepts a path, a file object, or raw bytes.  Multi-channel or float
    images are rejected: their pixel values are not label semantics.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(bytes(source))
    with Image.open(source) as image:
        if image.mode not in _LABEL_MODES:
            raise ValueError(
                f"image mode {image.mode!r} is not a single-channel "
                f"integer raster; expected one of {_LABEL_MODES}"
            )
        arr = np.asarray(image, dtype=np.int64)
    return LabelMap(arr)


def render_label_colors(label_map: LabelMap, seed: int = 0) -> np.ndarray:
    """(H, W, 3) uint8 color render with a seeded random palette; 0 is black."""
    rng = np.random.default_rng(seed)
    top = int(label_map.labels.max()) if label_map.labels.size else 0
    palette = rng.integers(48, 256, size=(top + 1, 3), dtype=np.uint8)
    if top >= 0:
        palette[0] = 0
    return palette[label_map.labels]


def save_color_render(label_map: LabelMap, dest, seed: int = 0):
    """Write the color rendering of a label map as an RGB PNG."""
    Image.fromarray(render_label_colors(label_map, seed=seed), mode="RGB").save(
        dest, format="PNG"
    )


MEMBER_SUFFIXES = (".seg", ".png")
CONFIDENCE_SIDECAR = "confidences.txt"


def _read_member(path: Path) -> LabelMap:
    if path.suffix.lower() == ".seg":
        return parse_seg(path.read_bytes())
    return read_label_image(str(path))


def load_group(dataset_root, image_id: str) -> SegmentationGroup:
    """Load every human segmentation of one image, with confidences.

    Members are the `.seg`/`.png` files in ``dataset_root/image_id``, in
    lexicographic filename order (stable across platforms), normalized on
    load.  Confidences come from the optional ``confidences.txt`` sidecar
    and default to 1.0.
    """
    directory = Path(dataset_root) / image_id
    if not directory.is_dir():
        raise FileNotFoundError(f"no image directory {directory}")
    names = sorted(
        p.name
        for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in MEMBER_SUFFIXES
    )
    if not names:
        raise FileNotFoundError(f"no segmentation members in {directory}")

    confidences = dict.fromkeys(names, 1.0)
    sidecar = directory / CONFIDENCE_SIDECAR
    if sidecar.is_file():
        for lineno, raw in enumerate(
            sidecar.read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.rsplit(None, 1)
            if len(parts) != 2:
                raise ValueError(
                    f"{sidecar}:{lineno}: expected 'member-filename confidence'"
                )
            name, value = parts
            if name not in confidences:
                raise FileNotFoundError(
                    f"{sidecar}:{lineno}: references missing member {name!r}"
                )
            try:
                p = float(value)
            except ValueError:
                raise ValueError(
                    f"{sidecar}:{lineno}: confidence {value!r} is not a number"
                ) from None
            if not (0.0 <= p <= 1.0):
                raise ValueError(
                    f"{sidecar}:{lineno}: confidence {p} outside [0, 1]"
                )
            confidences[name] = p

    members = tuple(normalize_labels(_read_member(directory / n)) for n in names)
    return SegmentationGroup(
        image_id=image_id,
        members=members,
        confidences=tuple(confidences[n] for n in names),
    )


def list_image_ids(dataset_root) -> tuple[str, ...]:
    """Sorted image ids (= subdirectory names) of a dataset directory."""
    root = Path(dataset_root)
    if not root.is_dir():
        raise FileNotFoundError(f"no dataset directory {root}")
    return tuple(sorted(p.name for p in root.iterdir() if p.is_dir()))
