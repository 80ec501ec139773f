/* Copyright 2026 The Flowtrack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FLOWTRACK_ASSIGNMENT_H_
#define FLOWTRACK_ASSIGNMENT_H_

#include <vector>

namespace flowtrack {

// Dense cost matrix, rows x cols, row-major.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> cost;

  CostMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), cost(static_cast<std::size_t>(r) * c, fill) {}
  double& at(int r, int c) { return cost[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return cost[static_cast<std::size_t>(r) * cols + c];
  }
};

// Minimum-cost assignment (Hungarian, shortest augmenting paths). The matrix
// may be rectangular; the result maps each row to its column, or -1 when the
// row is left over because there are more rows than columns.
std::vector<int> SolveAssignment(const CostMatrix& m);

}  // namespace flowtrack

#endif  // FLOWTRACK_ASSIGNMENT_H_
