#pragma once

// Exact dense linear algebra over the rationals: rank, determinant, row
// echelon forms with a caller-chosen column order. Sizes here are desk
// scale (dim <= 200), plain fraction arithmetic is fine.

#include <vector>

#include "rational.hpp"

namespace soliton {

using RatMat = std::vector<RatVec>;

int rat_rank(RatMat rows);

// Rank of the stacked matrix [a; b] without copying callers' storage twice.
int rat_rank_stacked(const RatMat& a, const RatMat& b);

Rat rat_det(RatMat m);

// Reduced row echelon form with columns visited in `col_order`.
// Returns echelon rows (pivot columns strictly increasing in the order);
// `pivots`, when non-null, receives the pivot column index of each row.
RatMat rref(RatMat rows, const std::vector<int>& col_order, std::vector<int>* pivots = nullptr);

// dim(rowspan(a) ∩ rowspan(b)) = rank a + rank b − rank [a;b].
int intersection_dim(const RatMat& a, const RatMat& b);

// Basis of {v ∈ rowspan(rows) : v_j = 0 for all j in zero_cols}.
RatMat rowspan_with_zero_coords(const RatMat& rows, const std::vector<int>& zero_cols, int ncols);

// Solve M x = rhs for square invertible M; fails on singular input.
RatVec solve(RatMat m, RatVec rhs);

}  // namespace soliton
