#ifndef BARYSKEL_LP_HPP
#define BARYSKEL_LP_HPP

#include "baryskel/rational.hpp"

#include <variant>
#include <vector>

namespace baryskel {

/// A system of exact linear constraints: inequality rows a.x <= b and
/// equality rows a.x == b over a fixed ambient dimension.
struct LinearSystem {
    Index dim = 0;
    std::vector<RVector> ineq_rows;
    std::vector<Rational> ineq_rhs;
    std::vector<RVector> eq_rows;
    std::vector<Rational> eq_rhs;

    explicit LinearSystem(Index ambient_dim = 0) : dim(ambient_dim) {}

    void add_ineq(RVector row, Rational rhs);
    void add_eq(RVector row, Rational rhs);

    Index ineq_count() const { return static_cast<Index>(ineq_rows.size()); }
    Index eq_count() const { return static_cast<Index>(eq_rows.size()); }

    /// Exact satisfaction check of every row at x.
    bool satisfied_by(const RVector& x) const;
};

struct Feasible {
    RVector witness;
};

/// Farkas certificate: ineq_coeffs >= 0 together with the (sign-free)
/// eq_coeffs combine the rows to 0 . x <= -gap with gap > 0, an exact
/// contradiction.
struct Infeasible {
    RVector ineq_coeffs;
    RVector eq_coeffs;
    Rational gap;
};

using LpResult = std::variant<Feasible, Infeasible>;

inline bool is_feasible(const LpResult& r) { return std::holds_alternative<Feasible>(r); }

/// Decides feasibility of the system with a phase-I simplex over exact
/// rationals. Deterministic (Bland's rule, lowest-index ties). Equalities
/// are handled natively. The returned witness or certificate is verified
/// before it is returned.
LpResult lp_feasible(const LinearSystem& sys);

/// Re-derives the contradiction from a certificate; true iff it is valid.
bool check_farkas(const LinearSystem& sys, const Infeasible& cert);

} // namespace baryskel

#endif
