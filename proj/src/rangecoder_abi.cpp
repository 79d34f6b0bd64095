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

// Reference backend for the lrc_rc_* boundary.

#include <cstdio>
#include <cstring>
#include <exception>
#include <span>

#include "lrc/error.hpp"
#include "lrc/range_coder.hpp"
#include "lrc/rangecoder.h"

namespace {

void write_msg(char* msg, size_t cap, const char* text) {
  if (msg == nullptr || cap == 0) return;
  std::snprintf(msg, cap, "%s", text);
}

bool tables_ok(const lrc_cdf_tables* t) {
  return t != nullptr && (t->count == 0 || (t->cdf && t->offsets && t->sizes && t->min_symbol));
}

}  // namespace

extern "C" {

size_t lrc_rc_max_encoded_size(size_t n) {
  // At most 16 bits per symbol plus renormalization slack and the flush.
  return 3 * n + 2 * LRC_RC_FLUSH_BYTES + 2;
}

int lrc_rc_encode(const int32_t* symbols, const uint32_t* table_ids, size_t n,
                  const lrc_cdf_tables* tables, uint8_t* out, size_t out_capacity,
                  size_t* out_len, char* msg, size_t msg_capacity) {
  if ((n > 0 && (symbols == nullptr || table_ids == nullptr)) || out_len == nullptr ||
      !tables_ok(tables) || (out == nullptr && out_capacity > 0)) {
    write_msg(msg, msg_capacity, "null buffer");
    return LRC_RC_INVALID_ARGUMENT;
  }
  *out_len = 0;
  lrc::rc::Encoder enc;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t id = table_ids[i];
    if (id >= tables->count) {
      write_msg(msg, msg_capacity, "table id out of range");
      return LRC_RC_INVALID_ARGUMENT;
    }
    const uint32_t* cdf = tables->cdf + tables->offsets[id];
    const int64_t bin = int64_t{symbols[i]} - tables->min_symbol[id];
    if (bin < 0 || bin + 1 >= int64_t{tables->sizes[id]}) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "symbol %d at index %zu outside support",
                    symbols[i], i);
      write_msg(msg, msg_capacity, buf);
      return LRC_RC_SYMBOL_OUT_OF_RANGE;
    }
    if (cdf[bin + 1] <= cdf[bin]) {
      write_msg(msg, msg_capacity, "zero-frequency bin");
      return LRC_RC_INVALID_ARGUMENT;
    }
    enc.encode(cdf[bin], cdf[bin + 1] - cdf[bin]);
  }
  const std::vector<uint8_t> bytes = enc.finish();
  if (bytes.size() > out_capacity) {
    write_msg(msg, msg_capacity, "output buffer too small");
    return LRC_RC_BUFFER_TOO_SMALL;
  }
  if (!bytes.empty()) std::memcpy(out, bytes.data(), bytes.size());
  *out_len = bytes.size();
  return LRC_RC_OK;
}

int lrc_rc_decode(const uint8_t* in, size_t in_len, const uint32_t* table_ids,
                  size_t n, const lrc_cdf_tables* tables, int32_t* symbols_out,
                  char* msg, size_t msg_capacity) {
  if ((in == nullptr && in_len > 0) || (n > 0 && (table_ids == nullptr || symbols_out == nullptr)) ||
      !tables_ok(tables)) {
    write_msg(msg, msg_capacity, "null buffer");
    return LRC_RC_INVALID_ARGUMENT;
  }
  try {
    lrc::rc::Decoder dec(std::span<const uint8_t>(in, in_len));
    for (size_t i = 0; i < n; ++i) {
      const uint32_t id = table_ids[i];
      if (id >= tables->count) {
        write_msg(msg, msg_capacity, "table id out of range");
        return LRC_RC_INVALID_ARGUMENT;
      }
      symbols_out[i] = dec.decode(tables->cdf + tables->offsets[id], tables->sizes[id],
                                  tables->min_symbol[id]);
    }
    dec.finish();
  } catch (const lrc::StreamError& e) {
    write_msg(msg, msg_capacity, e.what());
    return e.code() == lrc::StreamErrc::kTruncated ? LRC_RC_STREAM_EXHAUSTED
                                                   : LRC_RC_CORRUPT_STREAM;
  } catch (const std::exception& e) {
    write_msg(msg, msg_capacity, e.what());
    return LRC_RC_INVALID_ARGUMENT;
  }
  return LRC_RC_OK;
}

const char* lrc_rc_backend_name(void) { return "reference"; }

}  // extern "C"
