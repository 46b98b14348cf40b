"""Binary container for slice histories.

Layout (all integers little-endian):

    4 bytes   magic b"WKGH"
    u32       format version (currently 1)
    u32       length of the scenario text, followed by that many bytes
              of UTF-8 scenario (the same text parse_scenario accepts)
    f64       t0
    f64       dt
    u64       n_slices
    u64       n_radii
    f64 * n_radii                    radial grid
    f64 * 4 * n_slices * n_radii     u, ut, v, vt (C order)
    u32       zlib.crc32 of everything before it

The loader is an exact inverse: slice_load(slice_dump(h)) reproduces the
history bit for bit.
"""

from __future__ import annotations

import io
import struct
import zlib

import numpy as np

from .scenario import parse_scenario, serialize_scenario
from .solver import SliceHistory

__all__ = ["SliceIOError", "slice_dump", "slice_load"]

_MAGIC = b"WKGH"
_VERSION = 1


class SliceIOError(RuntimeError):
    pass


def slice_dump(history, path=None):
    """Serialize a SliceHistory; returns the bytes (and writes path if given)."""
    buf = io.BytesIO()
    buf.write(_MAGIC)
    buf.write(struct.pack("<I", _VERSION))
    text = serialize_scenario(history.scenario).encode("utf-8")
    buf.write(struct.pack("<I", len(text)))
    buf.write(text)
    n_s, n_r = history.u.shape
    buf.write(struct.pack("<ddQQ", history.t0, history.dt, n_s, n_r))
    buf.write(np.ascontiguousarray(history.r, dtype="<f8").tobytes())
    for arr in (history.u, history.ut, history.v, history.vt):
        if arr.shape != (n_s, n_r):
            raise SliceIOError("field arrays have inconsistent shapes")
        buf.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    payload = buf.getvalue()
    blob = payload + struct.pack("<I", zlib.crc32(payload))
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(blob)
    return blob


def _take(buf, n, what):
    chunk = buf.read(n)
    if len(chunk) != n:
        raise SliceIOError(f"truncated file while reading {what}")
    return chunk


def slice_load(source):
    """Read a SliceHistory from bytes or a file path."""
    if isinstance(source, (bytes, bytearray)):
        blob = bytes(source)
    else:
        with open(source, "rb") as fh:
            blob = fh.read()
    if len(blob) < 4 + 4 + 4:
        raise SliceIOError("truncated file: shorter than any valid header")
    stored_crc, = struct.unpack("<I", blob[-4:])
    if zlib.crc32(blob[:-4]) != stored_crc:
        raise SliceIOError("checksum mismatch: file is corrupt")
    buf = io.BytesIO(blob[:-4])
    if _take(buf, 4, "magic") != _MAGIC:
        raise SliceIOError("bad magic: not a slice-history file")
    version, = struct.unpack("<I", _take(buf, 4, "version"))
    if version != _VERSION:
        raise SliceIOError(f"unsupported format version {version}")
    text_len, = struct.unpack("<I", _take(buf, 4, "scenario length"))
    scenario = parse_scenario(_take(buf, text_len, "scenario").decode("utf-8"))
    t0, dt, n_s, n_r = struct.unpack("<ddQQ", _take(buf, 32, "dimensions"))

    def grid(shape, what):
        n = int(np.prod(shape))
        raw = _take(buf, 8 * n, what)
        return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()

    r = grid((n_r,), "radial grid")
    u, ut, v, vt = (grid((n_s, n_r), name) for name in ("u", "ut", "v", "vt"))
    if buf.read(1):
        raise SliceIOError("trailing bytes after the field data")
    return SliceHistory(scenario=scenario, t0=t0, dt=dt, r=r,
                        u=u, ut=ut, v=v, vt=vt)
