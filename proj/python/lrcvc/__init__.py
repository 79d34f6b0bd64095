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

"""Learned video coding with spatial quality maps."""

import torch as _torch  # noqa: F401  loads libtorch before the extension

from ._lrcvc import (
    Codec,
    ConfigError,
    InvalidInput,
    StreamError,
    bd_rate,
    coded_bits,
    decode_qmap,
    encode_qmap,
    generate_maps,
    lambda_map,
    lambda_of,
    level_for_lambda,
    psnr,
)

__all__ = [
    "Codec",
    "ConfigError",
    "InvalidInput",
    "StreamError",
    "bd_rate",
    "coded_bits",
    "decode_qmap",
    "encode_qmap",
    "generate_maps",
    "lambda_map",
    "lambda_of",
    "level_for_lambda",
    "psnr",
]
