import numpy as np
import pytest
from numpy.testing import assert_array_equal

from wavekg.sliceio import SliceIOError, slice_dump, slice_load

from conftest import make_scenario
from wavekg.solver import evolve


@pytest.fixture(scope="module")
def history():
    return evolve(make_scenario(dr=0.1, r_max=8.0, t_end=6.0))


def test_round_trip_is_bit_exact(history):
    blob = slice_dump(history)
    back = slice_load(blob)
    assert_array_equal(back.r, history.r)
    assert_array_equal(back.u, history.u)
    assert_array_equal(back.ut, history.ut)
    assert_array_equal(back.v, history.v)
    assert_array_equal(back.vt, history.vt)
    assert back.t0 == history.t0
    assert back.dt == history.dt
    assert back.scenario == history.scenario
    # serialization itself is deterministic
    assert slice_dump(back) == blob


def test_file_path_api(history, tmp_path):
    p = tmp_path / "run.wkgh"
    blob = slice_dump(history, p)
    assert p.read_bytes() == blob
    back = slice_load(p)
    assert_array_equal(back.u, history.u)


def test_corruption_detected(history):
    blob = bytearray(slice_dump(history))
    blob[len(blob) // 2] ^= 0x40
    with pytest.raises(SliceIOError, match="checksum"):
        slice_load(bytes(blob))


def test_truncation_detected(history):
    blob = slice_dump(history)
    with pytest.raises(SliceIOError, match="checksum|truncated"):
        slice_load(blob[:-17])


def _with_patch(blob, start, payload):
    """Patch bytes and refresh the trailing checksum."""
    import zlib
    out = bytearray(blob)
    out[start:start + len(payload)] = payload
    out[-4:] = zlib.crc32(bytes(out[:-4])).to_bytes(4, "little")
    return bytes(out)


def test_bad_magic_rejected(history):
    blob = slice_dump(history)
    with pytest.raises(SliceIOError, match="magic"):
        slice_load(_with_patch(blob, 0, b"XXXX"))


def test_unsupported_version_rejected(history):
    blob = slice_dump(history)
    with pytest.raises(SliceIOError, match="version"):
        slice_load(_with_patch(blob, 4, (99).to_bytes(4, "little")))


def test_trailing_garbage_rejected(history):
    blob = slice_dump(history)
    with pytest.raises(SliceIOError):
        slice_load(blob + b"\x00\x00")
