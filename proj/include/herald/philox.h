// Copyright 2026 The Herald Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef HERALD_PHILOX_H
#define HERALD_PHILOX_H

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace herald {

/// Philox4x32-10 counter-based generator.
class Philox4x32 {
   public:
    using Block = std::array<uint32_t, 4>;

    explicit Philox4x32(uint64_t key) : key_{static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32)} {
    }
    Philox4x32(uint32_t k0, uint32_t k1) : key_{k0, k1} {
    }

    Block operator()(Block ctr) const {
        uint32_t k0 = key_[0];
        uint32_t k1 = key_[1];
        for (int round = 0; round < 10; round++) {
            if (round > 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const uint64_t p0 = uint64_t{0xD2511F53u} * ctr[0];
            const uint64_t p1 = uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {
                static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                static_cast<uint32_t>(p1),
                static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                static_cast<uint32_t>(p0),
            };
        }
        return ctr;
    }

   private:
    std::array<uint32_t, 2> key_;
};

/// Sequential draws for one (stream, index) pair. The counter is
/// (index lo, index hi, block, stream), so every pair owns 2^32 blocks.
class PhiloxStream {
   public:
    PhiloxStream(const Philox4x32 &gen, uint32_t stream, uint64_t index)
        : gen_(gen), ctr_{static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32), 0, stream} {
    }

    uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = gen_(ctr_);
            ctr_[2]++;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        const uint64_t hi = next_u32();
        const uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(theta);
        has_spare_ = true;
        return radius * std::cos(theta);
    }

   private:
    const Philox4x32 &gen_;
    Philox4x32::Block ctr_;
    Philox4x32::Block buf_{};
    int pos_ = 4;
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace herald

#endif
