# Copyright 2026 The LRC Video Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import pathlib

import numpy as np
import pytest

import lrcvc

ROOT = pathlib.Path(__file__).resolve().parents[2]
CHECKPOINT = ROOT / "runs" / "toy" / "stage2.ckpt"


def test_lambda():
    assert lrcvc.lambda_of(0.0) == pytest.approx(0.001)
    assert lrcvc.lambda_of(1.0) == pytest.approx(0.001 * math.exp(6.0))
    lam = lrcvc.lambda_map(np.full((4, 5), 0.5, dtype=np.float32))
    assert lam.shape == (4, 5)
    assert np.allclose(lam, 0.001 * math.exp(3.0))
    assert lrcvc.level_for_lambda(lrcvc.lambda_of(0.3)) == pytest.approx(0.3)


def test_qmap_roundtrip():
    maps = lrcvc.generate_maps(40, 56, 3, 7)
    assert len(maps) == 3
    for m in maps:
        payload = lrcvc.encode_qmap(m)
        once = lrcvc.decode_qmap(payload, 40, 56)
        again = lrcvc.decode_qmap(lrcvc.encode_qmap(once), 40, 56)
        assert np.array_equal(once, again)
        assert np.abs(once - m).max() <= 1.0


def test_bad_qmap_payload():
    with pytest.raises(ValueError):
        lrcvc.decode_qmap(b"\x01", 32, 32)


def test_metrics():
    a = np.random.default_rng(0).random((8, 8, 3), dtype=np.float32)
    assert lrcvc.psnr(a, a) == 100.0
    ref = [(0.1, 30.0), (0.2, 33.0), (0.4, 35.0), (0.8, 37.0)]
    assert lrcvc.bd_rate(ref, [(r * 1.1, p) for r, p in ref]) == pytest.approx(10.0, abs=1e-6)


def test_coded_bits_near_ideal():
    rng = np.random.default_rng(1)
    symbols = np.clip(np.round(rng.normal(0, 3, 20000)), -24, 24).astype(np.int32).tolist()
    bits = lrcvc.coded_bits(symbols, [3.0] * len(symbols))

    def mass(k):
        hi = 0.5 * math.erfc((abs(k) - 0.5) / (3.0 * math.sqrt(2.0)))
        lo = 0.5 * math.erfc((abs(k) + 0.5) / (3.0 * math.sqrt(2.0)))
        return hi - lo

    ideal = sum(-math.log2(mass(k)) for k in symbols)
    assert abs(bits - ideal) <= 0.03 * ideal


@pytest.mark.skipif(not CHECKPOINT.exists(), reason="trained checkpoint not present")
def test_codec_roundtrip():
    codec = lrcvc.Codec(str(CHECKPOINT))
    assert codec.parameter_count <= 2_000_000
    rng = np.random.default_rng(2)
    frames = [rng.random((40, 48, 3), dtype=np.float32) for _ in range(2)]
    maps = [np.full((40, 48), v, dtype=np.float32) for v in (0.2, 0.8)]
    stream = codec.encode(frames, maps)
    decoded = codec.decode(stream)
    assert len(decoded) == 2
    assert decoded[0].shape == (40, 48, 3)
    with pytest.raises(ValueError):
        codec.decode(stream[:-3])
