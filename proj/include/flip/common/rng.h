// Copyright 2026 The FLIP Workbench Authors
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

#ifndef FLIP_COMMON_RNG_H_
#define FLIP_COMMON_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace flip {

// Stream labels mixed into derived seeds.
enum class Stream : uint64_t {
  kSampling = 1,
  kNoise = 2,
  kRoundNoise = 3,
  kPartition = 4,
  kModelInit = 5,
  kData = 6,
};

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for an independent stream identified by `path` under `master`.
inline uint64_t DeriveSeed(uint64_t master,
                           std::initializer_list<uint64_t> path) {
  uint64_t h = SplitMix64(master);
  for (uint64_t p : path) h = SplitMix64(h ^ SplitMix64(p));
  return h;
}

inline uint64_t DeriveSeed(uint64_t master, Stream stream, int64_t client,
                           int64_t round, int64_t step = 0) {
  return DeriveSeed(master,
                    {static_cast<uint64_t>(stream), static_cast<uint64_t>(client),
                     static_cast<uint64_t>(round), static_cast<uint64_t>(step)});
}

}  // namespace flip

#endif  // FLIP_COMMON_RNG_H_
