#ifndef BARYSKEL_LINALG_HPP
#define BARYSKEL_LINALG_HPP

#include "baryskel/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace baryskel {

struct RankNullspace {
    Index rank = 0;
    RMatrix nullspace; // columns form an exact basis of ker(M)
};

/// Exact Gauss-Jordan elimination over the rationals. Pivot choice is the
/// first nonzero entry in column order, so results are deterministic.
/// rank + nullspace.cols() == M.cols(), and M * v == 0 exactly for every
/// basis column v.
template <typename Derived>
RankNullspace rank_nullspace(const Eigen::MatrixBase<Derived>& m) {
    RMatrix r = m;
    const Index rows = r.rows(), cols = r.cols();
    std::vector<Index> pivot_col_of_row;
    std::vector<bool> is_pivot_col(static_cast<size_t>(cols), false);

    Index lead = 0;
    for (Index col = 0; col < cols && lead < rows; ++col) {
        Index pivot = -1;
        for (Index row = lead; row < rows; ++row) {
            if (r(row, col) != 0) { pivot = row; break; }
        }
        if (pivot < 0) continue;
        r.row(lead).swap(r.row(pivot));
        const Rational inv = Rational(1) / r(lead, col);
        r.row(lead) *= inv;
        for (Index row = 0; row < rows; ++row) {
            if (row == lead || r(row, col) == 0) continue;
            const Rational factor = r(row, col);
            r.row(row) -= factor * r.row(lead);
        }
        pivot_col_of_row.push_back(col);
        is_pivot_col[static_cast<size_t>(col)] = true;
        ++lead;
    }

    RankNullspace result;
    result.rank = static_cast<Index>(pivot_col_of_row.size());
    result.nullspace = RMatrix::Zero(cols, cols - result.rank);
    Index basis_col = 0;
    for (Index free_col = 0; free_col < cols; ++free_col) {
        if (is_pivot_col[static_cast<size_t>(free_col)]) continue;
        result.nullspace(free_col, basis_col) = 1;
        for (Index row = 0; row < result.rank; ++row)
            result.nullspace(pivot_col_of_row[static_cast<size_t>(row)], basis_col) =
                -r(row, free_col);
        ++basis_col;
    }
    return result;
}

template <typename Derived>
Index rank_of(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return rank_nullspace(m).rank;
}

/// Solves A x = b exactly. Returns one solution (free variables set to 0),
/// or nullopt when the system is inconsistent.
template <typename DerivedA, typename DerivedB>
std::optional<RVector> solve_exact(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
    const Index rows = a.rows(), cols = a.cols();
    RMatrix aug(rows, cols + 1);
    aug.leftCols(cols) = a;
    aug.col(cols) = b;

    std::vector<std::pair<Index, Index>> pivots; // (row, col)
    Index lead = 0;
    for (Index col = 0; col < cols && lead < rows; ++col) {
        Index pivot = -1;
        for (Index row = lead; row < rows; ++row) {
            if (aug(row, col) != 0) { pivot = row; break; }
        }
        if (pivot < 0) continue;
        aug.row(lead).swap(aug.row(pivot));
        const Rational inv = Rational(1) / aug(lead, col);
        aug.row(lead) *= inv;
        for (Index row = 0; row < rows; ++row) {
            if (row == lead || aug(row, col) == 0) continue;
            const Rational factor = aug(row, col);
            aug.row(row) -= factor * aug.row(lead);
        }
        pivots.emplace_back(lead, col);
        ++lead;
    }
    for (Index row = lead; row < rows; ++row)
        if (aug(row, cols) != 0) return std::nullopt;

    RVector x = RVector::Zero(cols);
    for (const auto& [row, col] : pivots) x(col) = aug(row, cols);
    return x;
}

} // namespace baryskel

#endif
