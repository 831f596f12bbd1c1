// Copyright 2026 The Posterlay Authors. All Rights Reserved.
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
//
// Seeded synthetic paper/poster corpora with planted paper-to-layout
// couplings. A latent text-heaviness t drives the paper's character counts
// up and the poster's figure area down; element counts on the poster follow
// the paper's section/figure/table counts with small noise.
#ifndef POSTERLAY_SYNTHETIC_H_
#define POSTERLAY_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <vector>

#include "posterlay/dataset.h"

namespace posterlay {

struct SynthOptions {
  int n_train = 500;
  int n_valid = 200;
  int n_test = 100;
  std::uint64_t seed = 0;
  double portrait_fraction = 0.2;
  // Probability that a poster's figure/table/section count deviates by one
  // from the paper's count.
  double count_noise = 0.2;
};

// Ids are "<split>-NNNNN". Train records carry a silver layout only; valid
// and test records carry a gold layout (with AuthorInfo and List elements)
// plus a jittered silver copy.
std::vector<PairRecord> SynthesizeCorpus(const SynthOptions& options);

// One (paper, gold layout) pair.
PairRecord SynthesizeRecord(std::mt19937_64& rng, const std::string& id,
                            Split split, const SynthOptions& options);

}  // namespace posterlay

#endif  // POSTERLAY_SYNTHETIC_H_
