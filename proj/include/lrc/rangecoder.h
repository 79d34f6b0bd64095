// Copyright 2026 The LRC Video Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * Buffer-level range coder boundary.
 *
 * Both calls operate on caller-owned contiguous buffers. Symbols are coded
 * against static 16-bit cumulative frequency tables; symbol i uses table
 * table_ids[i]. A table with n bins has n + 1 cdf entries, cdf[0] == 0,
 * cdf[n] == 65536, strictly increasing, and bin j codes symbol
 * min_symbol + j.
 *
 * Stream format: 56-bit low / range window with byte renormalization
 * (renormalize while range < 2^48) and carry propagation through a cached
 * byte plus a run of pending 0xFF bytes. The leading cache byte, which is
 * always zero, is not written. The encoder ends with a fixed 7-byte flush of
 * the low window, so an encoding of n symbols with R renormalizations is
 * exactly R + 7 bytes. The decoder primes with 7 bytes and must consume the
 * stream exactly.
 *
 * The library built from src/rangecoder_abi.cpp implements these calls with
 * the reference coder; a native kernel can replace it at link time.
 */

#ifndef LRC_RANGECODER_H_
#define LRC_RANGECODER_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define LRC_RC_OK 0
#define LRC_RC_INVALID_ARGUMENT 1
#define LRC_RC_SYMBOL_OUT_OF_RANGE 2
#define LRC_RC_BUFFER_TOO_SMALL 3
#define LRC_RC_STREAM_EXHAUSTED 4
#define LRC_RC_CORRUPT_STREAM 5

#define LRC_RC_PRECISION 16
#define LRC_RC_FLUSH_BYTES 7

typedef struct lrc_cdf_tables {
  const uint32_t* cdf;        /* all tables, concatenated */
  const uint32_t* offsets;    /* start of table t inside cdf */
  const uint32_t* sizes;      /* cdf entries of table t (bins + 1) */
  const int32_t* min_symbol;  /* symbol coded by bin 0 of table t */
  size_t count;
} lrc_cdf_tables;

/* Upper bound on the encoded size of n symbols. */
size_t lrc_rc_max_encoded_size(size_t n);

int lrc_rc_encode(const int32_t* symbols, const uint32_t* table_ids, size_t n,
                  const lrc_cdf_tables* tables, uint8_t* out,
                  size_t out_capacity, size_t* out_len, char* msg,
                  size_t msg_capacity);

int lrc_rc_decode(const uint8_t* in, size_t in_len, const uint32_t* table_ids,
                  size_t n, const lrc_cdf_tables* tables, int32_t* symbols_out,
                  char* msg, size_t msg_capacity);

/* Name of the linked backend ("reference" for the built-in fallback). */
const char* lrc_rc_backend_name(void);

#ifdef __cplusplus
}
#endif

#endif /* LRC_RANGECODER_H_ */
