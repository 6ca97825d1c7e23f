"""Image, signal and report I/O.

PGM (P2/P5, up to 16 bits) is the canonical lossless format; PNG is read
and written through Pillow.  Signals are plain CSV, one sample per line.
"""
import io as _io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, FormatError, ParseError
from .transform import FeatureMap, ImageF, as_samples

REPORT_SCHEMA = 1
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
SIGNAL_HEADER = "index,value"
_META_RE = re.compile(r"#\s*([A-Za-z_][\w-]*)\s*:\s*(.*)$")


def _read_bytes(src):
    if src == "-" or src is None:
        return sys.stdin.buffer.read()
    if hasattr(src, "read"):
        data = src.read()
        return data.encode() if isinstance(data, str) else data
    return Path(src).read_bytes()


def sniff(data):
    """Return ``"pgm"``, ``"png"`` or ``"csv"`` for a raw payload."""
    if data[:2] in (b"P2", b"P5"):
        return "pgm"
    if data.startswith(PNG_MAGIC):
        return "png"
    return "csv"


# -- PGM --------------------------------------------------------------------

def _pgm_header(data):
    """Parse magic, width, height and maxval; return them with comments and offset."""
    tokens, comments, pos = [], [], 2
    while len(tokens) < 3:
        if pos >= len(data):
            raise CorruptFileError("PGM header ends early")
        c = data[pos:pos + 1]
        if c == b"#":
            end = data.find(b"\n", pos)
            end = len(data) if end < 0 else end
            comments.append(data[pos + 1:end].decode("latin-1").strip())
            pos = end + 1
        elif c.isspace():
            pos += 1
        else:
            m = re.compile(rb"\d+").match(data, pos)
            if m is None:
                raise CorruptFileError(f"bad PGM header byte {c!r} at offset {pos}")
            tokens.append(int(m.group()))
            pos = m.end()
    # exactly one whitespace byte separates maxval from binary data
    return tokens, comments, pos + 1


def read_pgm(data):
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError("not a P2/P5 PGM file")
    (width, height, maxval), comments, offset = _pgm_header(data)
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise CorruptFileError(f"invalid PGM geometry {width}x{height}, maxval {maxval}")
    count = width * height
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        payload = data[offset:offset + need]
        if len(payload) < need:
            raise CorruptFileError(f"PGM payload truncated: {len(payload)} of {need} bytes")
        raw = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    else:
        try:
            raw = np.array(data[offset - 1:].split(), dtype=np.int64)
        except ValueError:
            raise CorruptFileError("non-numeric sample in P2 payload") from None
        if raw.size < count:
            raise CorruptFileError(f"PGM payload truncated: {raw.size} of {count} samples")
        raw = raw[:count]
    if raw.max(initial=0) > maxval:
        raise CorruptFileError("PGM sample exceeds declared maxval")
    samples = raw.reshape(height, width) / maxval
    return ImageF(samples, bit_depth=maxval.bit_length(), comments=tuple(comments))


def _quantize(samples, maxval):
    return np.rint(np.clip(samples, 0.0, 1.0) * maxval).astype(np.int64)


def write_pgm(samples, depth=8, comments=(), ascii=False):
    """Encode [0, 1] samples as PGM bytes with ``maxval = 2**depth - 1``."""
    if not 1 <= depth <= 16:
        raise FormatError(f"PGM depth must be 1..16 bits, got {depth}")
    samples = np.atleast_2d(as_samples(samples))
    maxval = (1 << depth) - 1
    q = _quantize(samples, maxval)
    height, width = q.shape
    head = [("P2" if ascii else "P5")]
    head += [f"# {c}" for c in comments]
    head += [f"{width} {height}", str(maxval)]
    header = ("\n".join(head) + "\n").encode("latin-1")
    if ascii:
        body = "\n".join(" ".join(str(v) for v in row) for row in q) + "\n"
        return header + body.encode("ascii")
    dtype = ">u2" if maxval > 255 else "u1"
    return header + q.astype(dtype).tobytes()


# -- PNG --------------------------------------------------------------------

def read_png(data):
    from PIL import Image

    try:
        im = Image.open(_io.BytesIO(data))
        im.load()
    except OSError as exc:
        raise CorruptFileError(f"unreadable PNG: {exc}") from None
    mode = im.mode
    if mode in ("I;16", "I;16B", "I"):
        arr = np.asarray(im, dtype=np.float64)
        return ImageF(np.clip(arr / 65535.0, 0, 1), bit_depth=16)
    if mode in ("L", "1", "P"):
        arr = np.asarray(im.convert("L"), dtype=np.float64)
        return ImageF(arr / 255.0, bit_depth=8)
    rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
    luma = rgb @ np.array([0.299, 0.587, 0.114])
    return ImageF(np.clip(luma / 255.0, 0, 1), bit_depth=8)


def write_png(samples, depth=8):
    from PIL import Image

    samples = np.atleast_2d(as_samples(samples))
    if depth <= 8:
        im = Image.fromarray(_quantize(samples, 255).astype(np.uint8))
    else:
        im = Image.fromarray(_quantize(samples, 65535).astype(np.uint16))
    buf = _io.BytesIO()
    im.save(buf, format="PNG")
    return buf.getvalue()


# -- images -----------------------------------------------------------------

def load_image(src):
    """Load a PGM or PNG file (or ``"-"`` for stdin) as an :class:`ImageF`."""
    data = _read_bytes(src)
    kind = sniff(data)
    if kind == "pgm":
        return read_pgm(data)
    if kind == "png":
        return read_png(data)
    raise FormatError(f"unrecognised image format in {src!r}")


def _write_bytes(dest, payload):
    if dest == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    elif hasattr(dest, "write"):
        dest.write(payload)
    else:
        Path(dest).write_bytes(payload)


def scale_sidecar_path(path):
    return Path(str(path) + ".scale.json")


def save_image(obj, dest, depth=None, ascii=False):
    """Write an image or feature map as PGM (default) or PNG (``.png`` suffix).

    :class:`ImageF` keeps its own bit depth and header comments unless
    ``depth`` is given.  Feature maps are min-max scaled to the output range
    and the mapping is written to ``<dest>.scale.json``; an all-constant map
    is written as zeros.
    """
    comments = ()
    scale = None
    if isinstance(obj, FeatureMap):
        values = np.asarray(obj.values, dtype=float)
        lo, hi = (float(values.min()), float(values.max())) if values.size else (0.0, 0.0)
        samples = (values - lo) / (hi - lo) if hi > lo else np.zeros_like(values)
        depth = depth or 16
        scale = {"method": obj.method, "min": lo, "max": hi, "depth": depth}
    elif isinstance(obj, ImageF):
        samples, comments = obj.samples, obj.comments
        depth = depth or obj.bit_depth or 8
    else:
        samples = as_samples(obj)
        depth = depth or 8
    is_png = not hasattr(dest, "write") and dest != "-" and str(dest).lower().endswith(".png")
    payload = write_png(samples, depth) if is_png else write_pgm(samples, depth, comments, ascii)
    _write_bytes(dest, payload)
    if scale is not None and not hasattr(dest, "write") and dest != "-":
        scale_sidecar_path(dest).write_text(dumps_json(scale))
    return scale


# -- signals ----------------------------------------------------------------

def format_float(v):
    return format(float(v), ".17g")


def write_signal_csv(dest, signal, header=False, metadata=None):
    """One sample per line; optional ``index,value`` header and ``# key: json`` metadata."""
    lines = [f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}"
             for k, v in sorted((metadata or {}).items())]
    values = np.asarray(signal, dtype=float).ravel()
    if header:
        lines.append(SIGNAL_HEADER)
        lines += [f"{i},{format_float(v)}" for i, v in enumerate(values)]
    else:
        lines += [format_float(v) for v in values]
    text = "\n".join(lines) + ("\n" if lines else "")
    _write_bytes(dest, text.encode("ascii"))


def parse_signal_csv(text):
    """Parse signal CSV text into ``(samples, metadata)``."""
    values, meta = [], {}
    two_column = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _META_RE.match(line)
            if m:
                try:
                    meta[m.group(1)] = json.loads(m.group(2))
                except json.JSONDecodeError:
                    meta[m.group(1)] = m.group(2)
            continue
        if not values and line.replace(" ", "").lower() == SIGNAL_HEADER:
            two_column = True
            continue
        field = line.split(",")[-1] if two_column else line
        try:
            values.append(float(field))
        except ValueError:
            raise ParseError(f"non-numeric sample {line!r}", lineno) from None
    return np.array(values, dtype=float), meta


def read_signal_csv(src, with_metadata=False):
    data = _read_bytes(src)
    signal, meta = parse_signal_csv(data.decode("utf-8"))
    return (signal, meta) if with_metadata else signal


def write_table_csv(dest, columns):
    """Several equal-length series side by side under an ``index,...`` header."""
    names = list(columns)
    cols = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    lines = [",".join(["index"] + names)]
    for i, row in enumerate(zip(*cols)):
        lines.append(",".join([str(i)] + [format_float(v) for v in row]))
    _write_bytes(dest, ("\n".join(lines) + "\n").encode("ascii"))


# -- reports ----------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_report(dest, report):
    """Write a JSON report with a ``schema`` field and stable key order."""
    report = {"schema": REPORT_SCHEMA, **report}
    _write_bytes(dest, dumps_json(report).encode("utf-8"))
    return report


def comment_metadata(comments):
    """``key: json`` entries found in PGM header comments."""
    meta = {}
    for c in comments:
        m = _META_RE.match("#" + c)
        if m:
            try:
                meta[m.group(1)] = json.loads(m.group(2))
            except json.JSONDecodeError:
                pass
    return meta


def metadata_comment(key, value):
    return f"{key}: {json.dumps(_jsonable(value), sort_keys=True)}"
