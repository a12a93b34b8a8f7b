#include "gmap/assignment.hpp"

#include <algorithm>
#include <limits>

namespace gmap {

namespace {

// Hungarian algorithm on an n x m matrix with n <= m. Returns per-row column.
std::vector<int> SolveSquareish(const std::vector<double>& a, int n, int m) {
  const double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials over rows (u) and columns (v); p[j] = row matched to j.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> SolveAssignment(const std::vector<double>& cost, int rows,
                                 int cols) {
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  if (rows <= cols) return SolveSquareish(cost, rows, cols);
  // Transpose so that rows <= cols.
  std::vector<double> t(cost.size());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      t[j * rows + i] = cost[i * cols + j];
    }
  }
  const std::vector<int> col_to_row = SolveSquareish(t, cols, rows);
  std::vector<int> row_to_col(rows, -1);
  for (int j = 0; j < cols; ++j) {
    if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
  }
  return row_to_col;
}

}  // namespace gmap
