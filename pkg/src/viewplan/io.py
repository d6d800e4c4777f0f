"""File formats: camera transforms, embedding tables, PPM images, reports.

All formats are text or simple binary so runs stay diffable and
reproducible: reports are deterministic key/value documents, floats are
written with ``repr`` (shortest round-trip form), and every report embeds a
fingerprint of its input files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import shlex
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distances import FeatureVector
from .geometry import CameraPose, Vec3, ViewRecord
from .renderer import ColorImage


@dataclass(frozen=True)
class TransformsDocument:
    """Parsed camera file: one view per frame plus the shared field of view."""

    views: tuple
    camera_angle_x: float


def _orthonormalize(m: np.ndarray, frame_id: str) -> np.ndarray:
    det = float(np.linalg.det(m))
    if det <= 0.0:
        raise ValueError(f"frame {frame_id!r}: rotation determinant {det} is not positive")
    err = np.abs(m.T @ m - np.eye(3)).max()
    if err <= 1e-6:
        return m
    warnings.warn(
        f"frame {frame_id!r}: rotation off-orthonormal by {err:.3g}; "
        "projecting to the nearest rotation",
        stacklevel=3,
    )
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] *= -1
        r = u @ vt
    return r


def parse_transforms(path) -> TransformsDocument:
    """Read a synthetic-camera transforms file (frames with 4x4 matrices).

    View ids are the frame file-path stems; positions come from the
    translation column and rotations from the upper-left 3x3 block, which is
    re-orthonormalized (with a warning) when it drifts.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "camera_angle_x" not in doc:
        raise ValueError(f"{path}: missing camera_angle_x")
    if "frames" not in doc or not isinstance(doc["frames"], list):
        raise ValueError(f"{path}: missing frames list")

    views = []
    seen = set()
    for frame in doc["frames"]:
        if "file_path" not in frame or "transform_matrix" not in frame:
            raise ValueError(f"{path}: frame missing file_path or transform_matrix")
        vid = Path(frame["file_path"]).stem
        if vid in seen:
            raise ValueError(f"{path}: duplicate frame id {vid!r}")
        seen.add(vid)
        m = np.asarray(frame["transform_matrix"], dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"{path}: frame {vid!r} transform is {m.shape}, expected (4, 4)")
        rotation = _orthonormalize(m[:3, :3], vid)
        position = Vec3.from_array(m[:3, 3])
        views.append(ViewRecord(id=vid, pose=CameraPose(position=position, rotation=rotation)))
    return TransformsDocument(views=tuple(views), camera_angle_x=float(doc["camera_angle_x"]))


def write_transforms(doc: TransformsDocument, path) -> None:
    """Serialize a transforms document back to the camera-file format."""
    frames = []
    for v in doc.views:
        rot = np.asarray(v.pose.rotation) if v.pose.rotation is not None else np.eye(3)
        m = np.eye(4)
        m[:3, :3] = rot
        m[:3, 3] = v.pose.position.as_array()
        frames.append({"file_path": f"./frames/{v.id}", "transform_matrix": m.tolist()})
    payload = {"camera_angle_x": doc.camera_angle_x, "frames": frames}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def parse_embeddings(path) -> dict:
    """Read an embeddings table into id -> FeatureVector.

    Accepts the flat text table (header ``id,f0,...``) or an equivalent JSON
    object mapping ids to arrays.  All rows must share one dimension; zero
    vectors and duplicate ids are rejected.
    """
    path = Path(path)
    rows: list[tuple[str, list[float]]] = []
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: expected an object mapping id to array")
        rows = [(str(k), [float(x) for x in v]) for k, v in doc.items()]
    else:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty embeddings table") from None
            if not header or header[0] != "id":
                raise ValueError(f"{path}: first column must be 'id'")
            width = len(header)
            if width < 2:
                raise ValueError(f"{path}: table has no feature columns")
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != width:
                    raise ValueError(
                        f"{path}:{lineno}: ragged row ({len(rec)} fields, expected {width})"
                    )
                rows.append((rec[0], [float(x) for x in rec[1:]]))

    out: dict[str, FeatureVector] = {}
    dim = None
    for vid, vals in rows:
        if vid in out:
            raise ValueError(f"{path}: duplicate id {vid!r}")
        if dim is None:
            dim = len(vals)
        elif len(vals) != dim:
            raise ValueError(f"{path}: id {vid!r} has dim {len(vals)}, expected {dim}")
        try:
            out[vid] = FeatureVector(tuple(vals))
        except ValueError as exc:
            raise ValueError(f"{path}: id {vid!r}: {exc}") from None
    if not out:
        raise ValueError(f"{path}: no embedding rows")
    return out


def write_embeddings(features: Mapping[str, FeatureVector], path) -> None:
    """Write the flat text table, rows sorted by id."""
    items = sorted(features.items())
    dim = items[0][1].dim
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + [f"f{i}" for i in range(dim)])
        for vid, feat in items:
            writer.writerow([vid] + [repr(v) for v in feat.values])


def _read_ppm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise ValueError("truncated header")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def read_ppm(path) -> ColorImage:
    """Read a P6 (binary) or P3 (text) image with maxval 255."""
    path = Path(path)
    data = path.read_bytes()
    try:
        magic, pos = _read_ppm_token(data, 0)
        if magic not in (b"P3", b"P6"):
            raise ValueError(f"unsupported magic {magic!r}")
        wtok, pos = _read_ppm_token(data, pos)
        htok, pos = _read_ppm_token(data, pos)
        mtok, pos = _read_ppm_token(data, pos)
        width, height, maxval = int(wtok), int(htok), int(mtok)
        if width < 1 or height < 1:
            raise ValueError("image dimensions must be positive")
        if maxval != 255:
            raise ValueError(f"only maxval 255 is supported, got {maxval}")
        count = width * height * 3
        if magic == b"P6":
            pos += 1  # single whitespace after maxval
            raw = data[pos : pos + count]
            if len(raw) < count:
                raise ValueError(f"truncated payload: {len(raw)} of {count} bytes")
            vals = np.frombuffer(raw, dtype=np.uint8).astype(float)
        else:
            toks = data[pos:].split()
            if len(toks) < count:
                raise ValueError(f"truncated payload: {len(toks)} of {count} values")
            vals = np.array([int(t) for t in toks[:count]], dtype=float)
            if vals.min() < 0 or vals.max() > 255:
                raise ValueError("sample out of range")
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    pixels = vals.reshape(height, width, 3) / 255.0
    return ColorImage(width=width, height=height, pixels=pixels)


def write_ppm(image: ColorImage, path) -> None:
    """Write binary P6 with maxval 255."""
    raw = np.rint(image.pixels * 255.0).clip(0, 255).astype(np.uint8)
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + raw.tobytes())


def fingerprint_files(paths: Iterable) -> str:
    """sha256 over the labeled byte content of the given input files."""
    h = hashlib.sha256()
    for p in paths:
        p = Path(p)
        h.update(p.name.encode())
        h.update(b"\0")
        h.update(p.read_bytes())
        h.update(b"\0")
    return "sha256:" + h.hexdigest()


def fmt(value) -> str:
    """Deterministic scalar formatting for reports."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def fmt_seq(values) -> str:
    return " ".join(fmt(v) for v in values)


def flags_line(tokens: Sequence[str]) -> str:
    """Canonical, shell-splittable form of the run's flag list."""
    return " ".join(shlex.quote(t) for t in tokens)


def write_report(path, items: Sequence[tuple]) -> None:
    """Write a report as deterministic ``key: value`` lines."""
    lines = [f"{k}: {v}" for k, v in items]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_report(path) -> list:
    """Parse a report back into (key, value) pairs."""
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(": ")
        pairs.append((key, value))
    return pairs
