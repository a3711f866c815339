#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "baryskel/errors.hpp"
#include "baryskel/linalg.hpp"
#include "baryskel/lp.hpp"
#include "baryskel/rational.hpp"

#include <random>

using namespace baryskel;

namespace {

RMatrix matrix_from(std::initializer_list<std::initializer_list<int>> rows) {
    RMatrix m(static_cast<Index>(rows.size()),
              static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (int v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

RVector vector_from(std::initializer_list<int> entries) {
    RVector v(static_cast<Index>(entries.size()));
    Index i = 0;
    for (int e : entries) v(i++) = e;
    return v;
}

RMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    RMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const int num = static_cast<int>(rng() % 13) - 6;
            const int den = 1 + static_cast<int>(rng() % 4);
            m(i, j) = Rational(num, den);
        }
    return m;
}

} // namespace

TEST_CASE("rational serialization is canonical") {
    CHECK(to_string(Rational(3)) == "3");
    CHECK(to_string(Rational(-6, 8)) == "-3/4");
    CHECK(to_string(Rational(0)) == "0");
    CHECK(parse_rational("7/2") == Rational(7, 2));
    CHECK(parse_rational("-4/6") == Rational(-2, 3));
    CHECK(parse_rational("5") == Rational(5));
    CHECK(parse_rational("10/-4") == Rational(-5, 2));
    CHECK(denominator(parse_rational("10/-4")) == 2);
    CHECK_THROWS_AS(parse_rational("1.5"), InputError);
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational(" 1"), InputError);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int num = static_cast<int>(rng() % 2001) - 1000;
        const int den = 1 + static_cast<int>(rng() % 999);
        const Rational r(num, den);
        CHECK(parse_rational(to_string(r)) == r);
        CHECK(denominator(r) > 0);
        CHECK(gcd(Integer(abs(numerator(r))), Integer(denominator(r))) <=
              Integer(numerator(r) == 0 ? denominator(r) : 1));
    }
}

TEST_CASE("rational vector parsing") {
    const RVector v = parse_rational_vector("1/4,1/3,0,-2");
    REQUIRE(v.size() == 4);
    CHECK(v(0) == Rational(1, 4));
    CHECK(v(1) == Rational(1, 3));
    CHECK(v(2) == 0);
    CHECK(v(3) == -2);
}

TEST_CASE("rank_nullspace on the identity") {
    const RMatrix id = RMatrix::Identity(3, 3);
    const auto rn = rank_nullspace(id);
    CHECK(rn.rank == 3);
    CHECK(rn.nullspace.cols() == 0);
}

TEST_CASE("rank unchanged by a duplicated row") {
    const RMatrix m = matrix_from({{1, 2, 3}, {0, 1, -1}});
    RMatrix dup(3, 3);
    dup << m, m.row(0);
    CHECK(rank_of(m) == 2);
    CHECK(rank_of(dup) == 2);
}

TEST_CASE("equality system of X for n=2, d=1 has rank 2, nullity 2") {
    // Two points in the plane summing to zero: x1 + x2 = 0 component-wise.
    const RMatrix m = matrix_from({{1, 0, 1, 0}, {0, 1, 0, 1}});
    const auto rn = rank_nullspace(m);
    CHECK(rn.rank == 2);
    CHECK(rn.nullspace.cols() == 2);
    for (Index c = 0; c < rn.nullspace.cols(); ++c) {
        const RVector product = m * rn.nullspace.col(c);
        for (Index i = 0; i < product.size(); ++i) CHECK(product(i) == 0);
    }
}

TEST_CASE("rank_nullspace properties on random matrices") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const Index rows = 1 + static_cast<Index>(rng() % 6);
        const Index cols = 1 + static_cast<Index>(rng() % 6);
        const RMatrix m = random_matrix(rng, rows, cols);
        const auto rn = rank_nullspace(m);
        CHECK(rn.rank + rn.nullspace.cols() == cols);
        for (Index c = 0; c < rn.nullspace.cols(); ++c) {
            const RVector product = m * rn.nullspace.col(c);
            for (Index i = 0; i < product.size(); ++i) CHECK(product(i) == 0);
        }
        // Basis columns are independent by construction (unit in distinct
        // free coordinates); check rank to be thorough.
        if (rn.nullspace.cols() > 0)
            CHECK(rank_of(rn.nullspace) == rn.nullspace.cols());
    }
}

TEST_CASE("solve_exact") {
    const RMatrix a = matrix_from({{2, 1}, {1, -1}});
    const auto x = solve_exact(a, vector_from({3, 0}));
    REQUIRE(x.has_value());
    CHECK((*x)(0) == 1);
    CHECK((*x)(1) == 1);

    const RMatrix inconsistent = matrix_from({{1, 1}, {2, 2}});
    CHECK(!solve_exact(inconsistent, vector_from({1, 3})).has_value());
}

TEST_CASE("lp_feasible: {x <= -1, -x <= 0} is infeasible with a certificate") {
    LinearSystem sys(1);
    sys.add_ineq(vector_from({1}), Rational(-1));
    sys.add_ineq(vector_from({-1}), Rational(0));
    const auto result = lp_feasible(sys);
    REQUIRE(!is_feasible(result));
    const auto& cert = std::get<Infeasible>(result);
    CHECK(check_farkas(sys, cert));
    CHECK(cert.gap > 0);
    // The only contradiction shape is lambda * (1, 1): both rows in play.
    CHECK(cert.ineq_coeffs(0) > 0);
    CHECK(cert.ineq_coeffs(0) == cert.ineq_coeffs(1));
}

TEST_CASE("lp_feasible: box with a zero-sum equality") {
    LinearSystem sys(2);
    sys.add_eq(vector_from({1, 1}), Rational(0));
    for (Index i = 0; i < 2; ++i) {
        RVector up = RVector::Zero(2), down = RVector::Zero(2);
        up(i) = 1;
        down(i) = -1;
        sys.add_ineq(up, Rational(1));
        sys.add_ineq(down, Rational(1));
    }
    const auto result = lp_feasible(sys);
    REQUIRE(is_feasible(result));
    const auto& witness = std::get<Feasible>(result).witness;
    CHECK(sys.satisfied_by(witness));
    CHECK(witness(0) + witness(1) == 0);
}

TEST_CASE("lp_feasible: 4-cube 2-face membership with pinned barycenter") {
    // Point x in the face {x1 = 1, x2 = 1} of [-1,1]^4 with x pinned to
    // the face's barycenter on the last two coordinates.
    LinearSystem sys(4);
    for (Index i = 0; i < 4; ++i) {
        RVector up = RVector::Zero(4), down = RVector::Zero(4);
        up(i) = 1;
        down(i) = -1;
        sys.add_ineq(up, Rational(1));
        sys.add_ineq(down, Rational(1));
    }
    RVector e0 = RVector::Zero(4), e1 = RVector::Zero(4);
    e0(0) = 1;
    e1(1) = 1;
    sys.add_eq(e0, Rational(1));
    sys.add_eq(e1, Rational(1));
    RVector e2 = RVector::Zero(4), e3 = RVector::Zero(4);
    e2(2) = 1;
    e3(3) = 1;
    sys.add_eq(e2, Rational(0));
    sys.add_eq(e3, Rational(0));
    const auto result = lp_feasible(sys);
    REQUIRE(is_feasible(result));
    const auto& witness = std::get<Feasible>(result).witness;
    CHECK(sys.satisfied_by(witness)); // substitution into every row
    CHECK(witness == make_rvector({Rational(1), Rational(1), Rational(0), Rational(0)}));
}

TEST_CASE("lp_feasible is deterministic") {
    LinearSystem sys(3);
    std::mt19937_64 rng(11);
    for (int r = 0; r < 6; ++r) {
        RVector row(3);
        for (Index j = 0; j < 3; ++j) row(j) = Rational(static_cast<int>(rng() % 9) - 4);
        sys.add_ineq(row, Rational(1 + static_cast<int>(rng() % 3)));
    }
    const auto first = lp_feasible(sys);
    const auto second = lp_feasible(sys);
    REQUIRE(is_feasible(first) == is_feasible(second));
    if (is_feasible(first))
        CHECK(std::get<Feasible>(first).witness == std::get<Feasible>(second).witness);
}

TEST_CASE("lp_feasible on random systems: witness or certificate, verified") {
    std::mt19937_64 rng(2024);
    int feasible_count = 0, infeasible_count = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const Index dim = 1 + static_cast<Index>(rng() % 4);
        LinearSystem sys(dim);
        const Index rows = 1 + static_cast<Index>(rng() % 7);
        for (Index r = 0; r < rows; ++r) {
            RVector row(dim);
            for (Index j = 0; j < dim; ++j)
                row(j) = Rational(static_cast<int>(rng() % 11) - 5);
            const Rational rhs(static_cast<int>(rng() % 9) - 4);
            if (rng() % 4 == 0) sys.add_eq(row, rhs);
            else sys.add_ineq(row, rhs);
        }
        const auto result = lp_feasible(sys);
        if (is_feasible(result)) {
            ++feasible_count;
            CHECK(sys.satisfied_by(std::get<Feasible>(result).witness));
        } else {
            ++infeasible_count;
            CHECK(check_farkas(sys, std::get<Infeasible>(result)));
        }
    }
    // Both shapes should actually occur across the sweep.
    CHECK(feasible_count > 10);
    CHECK(infeasible_count > 10);
}
