#include "linalg.hpp"

#include <algorithm>
#include <numeric>

namespace soliton {

namespace {

// In-place forward elimination; returns rank. Column order is the identity.
int eliminate(RatMat& rows) {
  if (rows.empty()) return 0;
  size_t ncol = rows[0].size();
  size_t r = 0;
  for (size_t c = 0; c < ncol && r < rows.size(); ++c) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    for (size_t i = r + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      Rat f = rows[i][c] / rows[r][c];
      for (size_t j = c; j < ncol; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

}  // namespace

int rat_rank(RatMat rows) { return eliminate(rows); }

int rat_rank_stacked(const RatMat& a, const RatMat& b) {
  RatMat all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return eliminate(all);
}

Rat rat_det(RatMat m) {
  size_t n = m.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != c) {
      std::swap(m[c], m[piv]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] / m[c][c];
      for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

RatMat rref(RatMat rows, const std::vector<int>& col_order, std::vector<int>* pivots) {
  RatMat out;
  std::vector<int> out_pivots;
  size_t r = 0;
  for (int c : col_order) {
    if (r >= rows.size()) break;
    size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    Rat lead = rows[r][c];
    for (Rat& x : rows[r]) x /= lead;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (size_t j = 0; j < rows[i].size(); ++j) rows[i][j] -= f * rows[r][j];
    }
    out.push_back(rows[r]);
    out_pivots.push_back(c);
    ++r;
  }
  if (pivots) *pivots = out_pivots;
  return out;
}

int intersection_dim(const RatMat& a, const RatMat& b) {
  int ra = rat_rank(a);
  int rb = rat_rank(b);
  return ra + rb - rat_rank_stacked(a, b);
}

RatMat rowspan_with_zero_coords(const RatMat& rows, const std::vector<int>& zero_cols, int ncols) {
  if (rows.empty()) return {};
  // Echelonize with the to-be-zeroed columns first; rows whose pivot falls
  // outside them have zero entries there after full reduction.
  std::vector<bool> is_zero_col(ncols, false);
  for (int c : zero_cols) is_zero_col[c] = true;
  std::vector<int> order;
  for (int c : zero_cols) order.push_back(c);
  for (int c = 0; c < ncols; ++c)
    if (!is_zero_col[c]) order.push_back(c);
  std::vector<int> pivots;
  RatMat ech = rref(rows, order, &pivots);
  RatMat out;
  for (size_t i = 0; i < ech.size(); ++i) {
    if (is_zero_col[pivots[i]]) continue;
    bool clean = true;
    for (int c : zero_cols)
      if (ech[i][c] != 0) {
        clean = false;
        break;
      }
    if (clean) out.push_back(ech[i]);
  }
  return out;
}

RatVec solve(RatMat m, RatVec rhs) {
  size_t n = m.size();
  for (size_t i = 0; i < n; ++i) m[i].push_back(rhs[i]);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) fail(ErrorKind::DegenerateInput, "singular system");
    std::swap(m[c], m[piv]);
    for (size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0) continue;
      Rat f = m[i][c] / m[c][c];
      for (size_t j = c; j <= n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  RatVec x(n);
  for (size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
  return x;
}

}  // namespace soliton
