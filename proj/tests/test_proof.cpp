#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "baryskel/decompose.hpp"
#include "baryskel/errors.hpp"
#include "baryskel/generator.hpp"
#include "baryskel/proof.hpp"

using namespace baryskel;

namespace {

HPolytope centered_square() {
    RMatrix a(4, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1;
    return HPolytope::from_inequalities(a, RVector::Constant(4, Rational(1)));
}

HPolytope generic_square(std::uint64_t seed) {
    const auto p = perturb(centered_square(), seed, Rational(1, 1024));
    REQUIRE(p.has_value());
    return *p;
}

} // namespace

TEST_CASE("build_q on the square: Q is P meet -P with the right dimension") {
    const QComplex qc = build_q(centered_square(), 2);
    CHECK(qc.q.ambient_dim() == 2); // n^2 d - nd = 2
    CHECK(qc.q.facet_count() == 4); // P = -P here, duplicate halfplanes merge

    // (x, -x) lies in Q iff x is in P and -x is in P.
    const RVector inside = make_rvector({Rational(1, 2), Rational(-1, 3)});
    CHECK(qc.q.contains(inside));
    const auto cols = qc.columns(inside);
    REQUIRE(cols.size() == 2);
    CHECK(cols[0] == inside);
    CHECK(cols[1] == -inside);
    CHECK(qc.base.contains(cols[0]));
    CHECK(qc.base.contains(cols[1]));
}

TEST_CASE("centered square is non-generic: vertices and edges violate") {
    const QComplex qc = build_q(centered_square(), 2);
    CHECK(!qc.generic);
    const auto report = check_genericity(qc);
    CHECK(!report.generic);
    CHECK(report.violations.size() == 8);

    int vertex_violations = 0, edge_violations = 0;
    for (const auto& v : report.violations) {
        if (v.face_dim == 0) {
            ++vertex_violations;
            CHECK(v.expected_dim == -2); // two point labels: 0 + 0 - 2
        } else if (v.face_dim == 1) {
            ++edge_violations;
            CHECK(v.expected_dim == 0); // two edge labels: 1 + 1 - 2
        }
    }
    CHECK(vertex_violations == 4);
    CHECK(edge_violations == 4);
}

TEST_CASE("a seeded perturbation of the square is generic") {
    const QComplex qc = build_q(generic_square(2024), 2);
    CHECK(qc.generic);
    const auto report = check_genericity(qc);
    CHECK(report.generic);
    CHECK(report.violations.empty());

    // Vertex labels satisfy dim E_1 + dim E_2 = nd = 2.
    const auto& lattice = qc.q.lattice();
    for (int id : lattice.faces_of_dim(0)) {
        const auto& dims = qc.labels[static_cast<size_t>(id)].dims;
        CHECK(dims[0] + dims[1] == 2);
    }
}

TEST_CASE("phi sums to zero everywhere and is integral at generic vertices") {
    for (std::uint64_t seed : {5u, 6u}) {
        const QComplex qc = build_q(generic_square(seed), 2);
        const auto& lattice = qc.q.lattice();
        for (int id = 0; id < lattice.face_count(); ++id) {
            const RVector& phi = qc.phi.at_face[static_cast<size_t>(id)];
            Rational sum = 0;
            for (Index i = 0; i < phi.size(); ++i) sum += phi(i);
            CHECK(sum == 0);
            if (lattice.face(id).dim == 0) {
                for (Index i = 0; i < phi.size(); ++i) {
                    CHECK(denominator(phi(i)) == 1);
                    CHECK(phi(i) == Rational(qc.labels[static_cast<size_t>(id)]
                                                 .dims[static_cast<size_t>(i)] - 1));
                }
            }
        }
    }
}

TEST_CASE("perturb with magnitude zero is the identity") {
    const HPolytope square = centered_square();
    const auto same = perturb(square, 99, Rational(0));
    REQUIRE(same.has_value());
    CHECK(same->a() == square.a());
    CHECK(same->b() == square.b());
}

TEST_CASE("perturbed vertices converge to the original ones") {
    const HPolytope square = centered_square();
    Rational magnitude(1, 4);
    Rational last_worst(-1);
    for (int halvings = 0; halvings < 6; ++halvings, magnitude /= 2) {
        const auto p = perturb(square, 7, magnitude);
        REQUIRE(p.has_value());
        Rational worst(0);
        for (const auto& v : p->vertices()) {
            Rational best(-1);
            for (const auto& w : square.vertices()) {
                const Rational d2 = squared_norm(v - w);
                if (best < 0 || d2 < best) best = d2;
            }
            if (best > worst) worst = best;
        }
        if (last_worst >= 0) CHECK(worst <= last_worst);
        last_worst = worst;
    }
    CHECK(last_worst < Rational(1, 1000));
}

TEST_CASE("find_phi_zero lands on an all-d vertex and the descent is literal") {
    const QComplex qc = build_q(generic_square(11), 2);
    REQUIRE(qc.generic);
    const PhiZero zero = find_phi_zero(qc);
    REQUIRE(zero.chain.face_ids.size() == 2);
    CHECK(zero.chain.t[0] == 1);
    CHECK(zero.chain.t[1] == 0);

    const int vertex = descend_to_vertex(qc, zero.chain);
    CHECK(vertex == zero.chain.face_ids[0]);
    const auto& dims = qc.labels[static_cast<size_t>(vertex)].dims;
    CHECK(dims == std::vector<int>{1, 1});

    // z coincides exactly with that vertex of Q.
    CHECK(zero.z == qc.q.lattice().face(vertex).sample);

    // phi vanishes at z by interpolation, per coordinate.
    const RVector& phi = qc.phi.at_face[static_cast<size_t>(vertex)];
    CHECK(phi == RVector::Zero(2));
}

TEST_CASE("find_phi_zero refuses non-generic complexes") {
    const QComplex qc = build_q(centered_square(), 2);
    CHECK_THROWS_AS(find_phi_zero(qc), InputError);
}

TEST_CASE("cyclic equivariance holds on perturbed squares") {
    const QComplex qc = build_q(generic_square(21), 2);
    const auto report = check_equivariance(qc);
    CHECK(report.pass);
    CHECK(report.failures.empty());
}

TEST_CASE("equivariance on the non-generic centered square still holds") {
    // The action permutes faces and labels regardless of genericity.
    const auto report = check_equivariance(build_q(centered_square(), 2));
    CHECK(report.pass);
}

TEST_CASE("decompose_via_proof on a generic polygon agrees with the solver") {
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        const HPolytope p = generate_polytope(seed, 2, 6);
        const RVector target = sample_interior_point(p, seed + 500);
        TraceLog trace;
        const Decomposition via_proof = decompose_via_proof(p, target, 2, seed, &trace);
        const Decomposition via_solver = decompose_prime(p, target, 2, 1);
        std::string why;
        CHECK_MESSAGE(validate_decomposition(p, via_proof, &why), why);
        CHECK(validate_decomposition(p, via_solver, &why));
        CHECK(!trace.empty());
        bool has_certificate = false;
        for (const auto& line : trace)
            if (line.find("\"certificate\"") != std::string::npos) has_certificate = true;
        CHECK(has_certificate);
    }
}

TEST_CASE("decompose_via_proof succeeds on the centered square via perturbation") {
    const HPolytope square = centered_square();
    TraceLog trace;
    const Decomposition dec =
        decompose_via_proof(square, RVector::Zero(2), 2, 4, &trace);
    std::string why;
    CHECK_MESSAGE(validate_decomposition(square, dec, &why), why);
    // The unperturbed complex is non-generic, so the log shows a perturbed run.
    bool saw_nongeneric = false;
    for (const auto& line : trace)
        if (line.find("\"generic\":false") != std::string::npos) saw_nongeneric = true;
    CHECK(saw_nongeneric);
}

TEST_CASE("decompose_via_proof handles boundary targets") {
    const HPolytope square = centered_square();
    const RVector on_edge = make_rvector({Rational(1), Rational(1, 5)});
    const Decomposition dec = decompose_via_proof(square, on_edge, 2, 12);
    std::string why;
    CHECK_MESSAGE(validate_decomposition(square, dec, &why), why);
    CHECK(dec.target == on_edge);
}

TEST_CASE("decompose_via_proof with n = 3 on a 3-polytope") {
    const HPolytope p = generate_polytope(61, 3, 4);
    const RVector target = sample_interior_point(p, 62);
    const Decomposition dec = decompose_via_proof(p, target, 3, 63);
    std::string why;
    CHECK_MESSAGE(validate_decomposition(p, dec, &why), why);
    CHECK(dec.count() == 3);
    for (const auto& face : dec.faces) CHECK(face.dim <= 1);

    // The 6-dimensional Q of this instance also passes the phi invariants.
    const auto norm = normalize_to_paper_form(p, target);
    const QComplex qc = build_q(norm.polytope, 3);
    const auto equivariance = check_equivariance(qc);
    CHECK(equivariance.pass);
}

TEST_CASE("composite n is rejected by the proof pipeline") {
    const HPolytope cube = generate_polytope(71, 4, 5);
    CHECK_THROWS_AS(decompose_via_proof(cube, RVector::Zero(4), 4, 1), InputError);
}
