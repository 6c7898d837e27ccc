// Copyright 2026 The Lesion Toolkit Authors.
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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lesion {

/// 64-bit FNV-1a. Stable across platforms and runs, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

/// One step of the SplitMix64 output function (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random stream with a platform-independent output sequence.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so all
/// conversions to floating point and bounded integers are done here:
///   uniform01()  = (next() >> 11) * 2^-53, in [0, 1)
///   below(n)     = rejection sampling on next() % n, unbiased
/// A keyed stream is seeded with splitmix64(seed ^ splitmix64(fnv1a64(key))),
/// so each item gets an independent stream regardless of processing order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view key);

  std::uint64_t next() { return engine_(); }
  double uniform01();
  /// Uniform in [lo, hi). Returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// True with probability p; p <= 0 never fires, p >= 1 always does.
  bool bernoulli(double p);

  static std::uint64_t keyed_seed(std::uint64_t seed, std::string_view key);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lesion
