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
#ifndef POSTERLAY_ASSIGNMENT_H_
#define POSTERLAY_ASSIGNMENT_H_

#include <vector>

namespace posterlay {

// Dense row-major weight matrix.
struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  WeightMatrix() = default;
  WeightMatrix(int r, int c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(int r, int c) { return values[r * cols + c]; }
  double at(int r, int c) const { return values[r * cols + c]; }
};

// Maximum-weight assignment of min(rows, cols) pairs (Kuhn-Munkres with
// potentials, O(n^2 m)). Returns, for each row, the assigned column or -1.
std::vector<int> MaxWeightAssignment(const WeightMatrix& weights);

}  // namespace posterlay

#endif  // POSTERLAY_ASSIGNMENT_H_
