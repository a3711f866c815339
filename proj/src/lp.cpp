#include "baryskel/lp.hpp"
#include "baryskel/errors.hpp"

#include <vector>

namespace baryskel {

void LinearSystem::add_ineq(RVector row, Rational rhs) {
    if (row.size() != dim) throw InputError("inequality row has wrong dimension");
    ineq_rows.push_back(std::move(row));
    ineq_rhs.push_back(std::move(rhs));
}

void LinearSystem::add_eq(RVector row, Rational rhs) {
    if (row.size() != dim) throw InputError("equality row has wrong dimension");
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(std::move(rhs));
}

bool LinearSystem::satisfied_by(const RVector& x) const {
    if (x.size() != dim) return false;
    for (size_t i = 0; i < ineq_rows.size(); ++i)
        if (ineq_rows[i].dot(x) > ineq_rhs[i]) return false;
    for (size_t i = 0; i < eq_rows.size(); ++i)
        if (eq_rows[i].dot(x) != eq_rhs[i]) return false;
    return true;
}

bool check_farkas(const LinearSystem& sys, const Infeasible& cert) {
    const Index mi = sys.ineq_count(), me = sys.eq_count();
    if (cert.ineq_coeffs.size() != mi || cert.eq_coeffs.size() != me) return false;
    for (Index i = 0; i < mi; ++i)
        if (cert.ineq_coeffs(i) < 0) return false;
    RVector combined = RVector::Zero(sys.dim);
    Rational rhs = 0;
    for (Index i = 0; i < mi; ++i) {
        if (cert.ineq_coeffs(i) == 0) continue;
        combined += cert.ineq_coeffs(i) * sys.ineq_rows[static_cast<size_t>(i)];
        rhs += cert.ineq_coeffs(i) * sys.ineq_rhs[static_cast<size_t>(i)];
    }
    for (Index i = 0; i < me; ++i) {
        if (cert.eq_coeffs(i) == 0) continue;
        combined += cert.eq_coeffs(i) * sys.eq_rows[static_cast<size_t>(i)];
        rhs += cert.eq_coeffs(i) * sys.eq_rhs[static_cast<size_t>(i)];
    }
    for (Index j = 0; j < sys.dim; ++j)
        if (combined(j) != 0) return false;
    return rhs < 0 && rhs == -cert.gap;
}

namespace {

// Phase-I tableau. Variables are laid out as
//   [x+ (dim) | x- (dim) | slacks (one per inequality) | artificials]
// and rows are sign-normalized so every right-hand side is nonnegative.
// Rows whose slack cannot start basic (flipped inequalities, equalities)
// get an artificial; minimizing the artificial sum decides feasibility.
class PhaseOneSimplex {
public:
    explicit PhaseOneSimplex(const LinearSystem& sys) : sys_(sys) { build(); }

    LpResult solve() {
        run_bland();
        const Rational objective = -zrow_(num_cols_);
        if (objective == 0) return extract_witness();
        return extract_farkas(objective);
    }

private:
    const LinearSystem& sys_;
    Index dim_ = 0, mi_ = 0, me_ = 0, rows_ = 0;
    Index slack_begin_ = 0, art_begin_ = 0, num_cols_ = 0;
    RMatrix tableau_;                 // rows_ x (num_cols_ + 1), last col = rhs
    RVector zrow_;                    // reduced costs + (-objective) in last slot
    std::vector<Index> basis_;        // basic column per row
    std::vector<int> sign_;           // +1 / -1 row normalization
    std::vector<Index> art_col_;      // artificial column per row, or -1
    std::vector<Index> init_col_;     // the identity column each row started with

    const RVector& row_coeffs(Index r) const {
        return r < mi_ ? sys_.ineq_rows[static_cast<size_t>(r)]
                       : sys_.eq_rows[static_cast<size_t>(r - mi_)];
    }
    const Rational& row_rhs(Index r) const {
        return r < mi_ ? sys_.ineq_rhs[static_cast<size_t>(r)]
                       : sys_.eq_rhs[static_cast<size_t>(r - mi_)];
    }

    void build() {
        dim_ = sys_.dim;
        mi_ = sys_.ineq_count();
        me_ = sys_.eq_count();
        rows_ = mi_ + me_;

        sign_.assign(static_cast<size_t>(rows_), 1);
        art_col_.assign(static_cast<size_t>(rows_), -1);
        init_col_.assign(static_cast<size_t>(rows_), -1);

        Index art_count = 0;
        for (Index r = 0; r < rows_; ++r) {
            if (row_rhs(r) < 0) sign_[static_cast<size_t>(r)] = -1;
            const bool needs_artificial = r >= mi_ || sign_[static_cast<size_t>(r)] < 0;
            if (needs_artificial) ++art_count;
        }
        slack_begin_ = 2 * dim_;
        art_begin_ = slack_begin_ + mi_;
        num_cols_ = art_begin_ + art_count;

        tableau_ = RMatrix::Zero(rows_, num_cols_ + 1);
        basis_.assign(static_cast<size_t>(rows_), -1);
        Index next_art = art_begin_;
        for (Index r = 0; r < rows_; ++r) {
            const int s = sign_[static_cast<size_t>(r)];
            const RVector& coeffs = row_coeffs(r);
            for (Index j = 0; j < dim_; ++j) {
                tableau_(r, j) = s * coeffs(j);
                tableau_(r, dim_ + j) = -s * coeffs(j);
            }
            if (r < mi_) tableau_(r, slack_begin_ + r) = s;
            tableau_(r, num_cols_) = s * row_rhs(r);

            if (r < mi_ && s > 0) {
                basis_[static_cast<size_t>(r)] = slack_begin_ + r;
                init_col_[static_cast<size_t>(r)] = slack_begin_ + r;
            } else {
                tableau_(r, next_art) = 1;
                basis_[static_cast<size_t>(r)] = next_art;
                art_col_[static_cast<size_t>(r)] = next_art;
                init_col_[static_cast<size_t>(r)] = next_art;
                ++next_art;
            }
        }

        // Reduced costs for min(sum of artificials) relative to the basis.
        zrow_ = RVector::Zero(num_cols_ + 1);
        for (Index j = art_begin_; j < num_cols_; ++j) zrow_(j) = 1;
        for (Index r = 0; r < rows_; ++r) {
            if (art_col_[static_cast<size_t>(r)] >= 0)
                zrow_ -= tableau_.row(r).transpose();
        }
    }

    void run_bland() {
        while (true) {
            Index entering = -1;
            for (Index j = 0; j < num_cols_; ++j) {
                if (zrow_(j) < 0) { entering = j; break; }
            }
            if (entering < 0) return;

            Index leaving = -1;
            Rational best_ratio = 0;
            for (Index r = 0; r < rows_; ++r) {
                if (tableau_(r, entering) <= 0) continue;
                const Rational ratio = tableau_(r, num_cols_) / tableau_(r, entering);
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio &&
                     basis_[static_cast<size_t>(r)] < basis_[static_cast<size_t>(leaving)])) {
                    leaving = r;
                    best_ratio = ratio;
                }
            }
            if (leaving < 0)
                throw InternalError("phase-I simplex claims an unbounded objective");
            pivot(leaving, entering);
        }
    }

    void pivot(Index r, Index j) {
        const Rational inv = Rational(1) / tableau_(r, j);
        tableau_.row(r) *= inv;
        for (Index i = 0; i < rows_; ++i) {
            if (i == r || tableau_(i, j) == 0) continue;
            const Rational factor = tableau_(i, j);
            tableau_.row(i) -= factor * tableau_.row(r);
        }
        if (zrow_(j) != 0) {
            const Rational factor = zrow_(j);
            zrow_ -= factor * tableau_.row(r).transpose();
        }
        basis_[static_cast<size_t>(r)] = j;
    }

    LpResult extract_witness() const {
        RVector x = RVector::Zero(dim_);
        for (Index r = 0; r < rows_; ++r) {
            const Index b = basis_[static_cast<size_t>(r)];
            if (b < dim_) x(b) += tableau_(r, num_cols_);
            else if (b < 2 * dim_) x(b - dim_) -= tableau_(r, num_cols_);
        }
        if (!sys_.satisfied_by(x))
            throw InternalError("simplex produced a witness violating the system");
        return Feasible{std::move(x)};
    }

    LpResult extract_farkas(const Rational& objective) const {
        // Row multipliers y = c_B B^{-1}, read off the initial identity
        // columns, then undo the sign normalization.
        Infeasible cert;
        cert.ineq_coeffs = RVector::Zero(mi_);
        cert.eq_coeffs = RVector::Zero(me_);
        for (Index r = 0; r < rows_; ++r) {
            const Index j = init_col_[static_cast<size_t>(r)];
            const Rational cost = j >= art_begin_ ? Rational(1) : Rational(0);
            const Rational y = cost - zrow_(j);
            const Rational nu = -Rational(sign_[static_cast<size_t>(r)]) * y;
            if (r < mi_) cert.ineq_coeffs(r) = nu;
            else cert.eq_coeffs(r - mi_) = nu;
        }
        cert.gap = objective;
        if (!check_farkas(sys_, cert))
            throw InternalError("simplex produced an invalid Farkas certificate");
        return cert;
    }
};

} // namespace

LpResult lp_feasible(const LinearSystem& sys) {
    for (const auto& row : sys.ineq_rows)
        if (row.size() != sys.dim) throw InputError("malformed system: bad inequality row");
    for (const auto& row : sys.eq_rows)
        if (row.size() != sys.dim) throw InputError("malformed system: bad equality row");
    PhaseOneSimplex simplex(sys);
    return simplex.solve();
}

} // namespace baryskel
