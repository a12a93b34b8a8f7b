#pragma once

#include <vector>

namespace gmap {

// Minimum-total-cost one-to-one assignment on a rectangular cost matrix
// (rows x cols, row-major). Returns, for every row, the assigned column or
// -1 when rows > cols and the row is left out. O(n^3) Hungarian algorithm
// with potentials.
std::vector<int> SolveAssignment(const std::vector<double>& cost, int rows,
                                 int cols);

}  // namespace gmap
