"""Stimulus, fixation and result file formats.

Rasters are PGM (P2/P5, maxval 255 or 65535). Human fixations are CSV with
header ``subject,x,y,onset,duration`` in pixels and seconds.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import (MalformedData, MalformedHeader, MissingColumn,
                     TruncatedData, UnparsableRow, UnsupportedMaxval)
from .foa import Fixation, Scanpath
from .mass import Frame

log = logging.getLogger(__name__)

_WHITESPACE = b" \t\r\n\v\f"
CSV_COLUMNS = ("subject", "x", "y", "onset", "duration")


def _header_tokens(data):
    """Read the four PGM header tokens; returns ``(tokens, offset_after_maxval)``."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < 4:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        if pos >= n:
            raise MalformedHeader(f"header ends early at byte {pos}")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((data[start:pos], start))
    return tokens, pos


def parse_pgm(data):
    """Decode PGM bytes into ``(array of ints, maxval)``."""
    tokens, pos = _header_tokens(data)
    magic = tokens[0][0]
    if magic not in (b"P2", b"P5"):
        raise MalformedHeader(f"unsupported magic {magic!r} at byte 0 (only P2/P5 grayscale)")
    values = []
    for tok, off in tokens[1:]:
        if not tok.isdigit():
            raise MalformedHeader(f"expected an integer at byte {off}, got {tok!r}")
        values.append(int(tok))
    width, height, maxval = values
    if width < 1 or height < 1:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if maxval not in (255, 65535):
        raise UnsupportedMaxval(f"maxval {maxval} (supported: 255, 65535)")
    count = width * height

    if magic == b"P5":
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise MalformedHeader(f"missing whitespace after maxval at byte {pos}")
        pos += 1
        dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(data) - pos < need:
            raise TruncatedData(f"expected {need} data bytes from byte {pos}, got {len(data) - pos}")
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
    else:
        body = data[pos:].split()
        if len(body) < count:
            raise TruncatedData(f"expected {count} samples, got {len(body)}")
        try:
            arr = np.array([int(t) for t in body[:count]], dtype=np.int64)
        except ValueError:
            bad = next(i for i, t in enumerate(body[:count]) if not t.isdigit())
            raise MalformedData(f"sample {bad} is not an integer: {body[bad]!r}")
        if len(body) > count and not body[count].startswith(b"#"):
            raise MalformedData(f"{len(body) - count} trailing samples")
    if arr.size and arr.max() > maxval:
        raise MalformedData(f"sample {int(np.argmax(arr))} exceeds maxval {maxval}")
    return arr.reshape(height, width), maxval


def load_pgm(path, timestamp=0.0):
    """Load a grayscale PGM as a :class:`Frame` with brightness in [0, 1]."""
    arr, maxval = parse_pgm(Path(path).read_bytes())
    return Frame(arr / float(maxval), timestamp)


def write_pgm(path, samples, maxval=255, binary=True):
    samples = np.asarray(samples)
    if maxval not in (255, 65535):
        raise UnsupportedMaxval(f"maxval {maxval}")
    if samples.min() < 0 or samples.max() > maxval:
        raise ValueError("samples out of range")
    h, w = samples.shape
    if binary:
        dtype = ">u2" if maxval == 65535 else "u1"
        payload = b"P5\n%d %d\n%d\n" % (w, h, maxval) + samples.astype(dtype).tobytes()
    else:
        lines = [" ".join(str(int(v)) for v in row) for row in samples]
        payload = ("P2\n%d %d\n%d\n" % (w, h, maxval) + "\n".join(lines) + "\n").encode()
    Path(path).write_bytes(payload)


def load_frames(path, fps=25.0):
    """A PGM file (static image) or a directory of PGM frames sorted by name."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.pgm"))
        if not files:
            raise FileNotFoundError(f"no .pgm frames in {path}")
        return [load_pgm(f, i / fps) for i, f in enumerate(files)]
    return [load_pgm(path)]


def load_fixations_csv(path, grid):
    """Read human fixations grouped by subject.

    Returns ``(scanpaths, n_clamped)``: a dict subject -> :class:`Scanpath`
    sorted by onset, and the number of rows whose coordinates were clamped
    into the retina.
    """
    path = Path(path)
    paths = {}
    clamped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise MissingColumn(f"{path}: missing column(s) {', '.join(missing)}")
        reader.fieldnames = header
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                subject = row["subject"].strip()
                x, y, onset, dur = (float(row[c]) for c in ("x", "y", "onset", "duration"))
            except (TypeError, ValueError, AttributeError) as exc:
                raise UnparsableRow(lineno, f"{path}: {exc}") from None
            if not all(np.isfinite(v) for v in (x, y, onset, dur)) or dur <= 0 or not subject:
                raise UnparsableRow(lineno, f"{path}: invalid values {dict(row)}")
            cx = min(max(x, 0.0), grid.width - 1.0)
            cy = min(max(y, 0.0), grid.height - 1.0)
            if (cx, cy) != (x, y):
                clamped += 1
            rows.setdefault(subject, []).append(Fixation(cx, cy, onset, dur))
    if clamped:
        log.warning("%s: clamped %d fixation(s) into the %dx%d retina", path, clamped,
                    grid.width, grid.height)
    for subject, fixes in rows.items():
        fixes.sort(key=lambda f: f.onset)
        paths[subject] = Scanpath(fixes, stimulus=path.stem)
    return paths, clamped


def scanpath_to_dict(path):
    return {
        "stimulus": path.stimulus,
        "seed": path.seed,
        "model": path.model,
        "fixations": [
            {"x": f.x, "y": f.y, "onset": f.onset, "duration": f.duration}
            for f in path.fixations
        ],
    }


def write_scanpath_json(path, scanpath):
    Path(path).write_text(json.dumps(scanpath_to_dict(scanpath), indent=2, sort_keys=True) + "\n")


def read_scanpath_json(path):
    doc = json.loads(Path(path).read_text())
    fixes = [Fixation(float(f["x"]), float(f["y"]), float(f["onset"]), float(f["duration"]))
             for f in doc["fixations"]]
    return Scanpath(fixes, stimulus=doc.get("stimulus", ""), seed=doc.get("seed"),
                    model=doc.get("model"))


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".scale.json")


def write_field_pgm(path, values):
    """16-bit P5 min-max scaled raster plus a ``.scale.json`` sidecar with the range.

    A constant field is written as all zeros; the sidecar keeps its value.
    """
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        q = np.rint((values - lo) / (hi - lo) * 65535.0).astype(np.int64)
    else:
        q = np.zeros(values.shape, dtype=np.int64)
    write_pgm(path, q, maxval=65535, binary=True)
    sidecar_path(path).write_text(json.dumps({"min": lo, "max": hi, "maxval": 65535},
                                             sort_keys=True) + "\n")


def read_field_pgm(path):
    q, maxval = parse_pgm(Path(path).read_bytes())
    scale = json.loads(sidecar_path(path).read_text())
    lo, hi = scale["min"], scale["max"]
    return lo + q / float(maxval) * (hi - lo)


write_saliency_pgm = write_field_pgm
read_saliency_pgm = read_field_pgm


@dataclass
class StimulusRecord:
    id: str
    frame_paths: List[Path]
    fixation_files: List[Path] = field(default_factory=list)
    category: Optional[str] = None


def scan_dataset(stimulus_dir, fixation_dir=None):
    """Pair stimuli with ground-truth CSVs by id.

    A stimulus is either ``<id>.pgm`` or a directory ``<id>/`` of PGM frames.
    Returns ``(matched records, unmatched stimulus ids)``.
    """
    stimulus_dir = Path(stimulus_dir)
    records = []
    for entry in sorted(stimulus_dir.iterdir()):
        if entry.is_file() and entry.suffix == ".pgm":
            records.append(StimulusRecord(entry.stem, [entry]))
        elif entry.is_dir():
            frames = sorted(entry.glob("*.pgm"))
            if frames:
                records.append(StimulusRecord(entry.name, frames))
    if fixation_dir is None:
        return records, []
    fixation_dir = Path(fixation_dir)
    matched, unmatched = [], []
    for rec in records:
        csv_path = fixation_dir / f"{rec.id}.csv"
        if csv_path.is_file():
            rec.fixation_files = [csv_path]
            matched.append(rec)
        else:
            unmatched.append(rec.id)
    return matched, unmatched
