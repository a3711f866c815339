#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "baryskel/errors.hpp"
#include "baryskel/generator.hpp"
#include "baryskel/linalg.hpp"
#include "baryskel/lp.hpp"
#include "baryskel/polytope.hpp"

#include <algorithm>
#include <set>

using namespace baryskel;

namespace {

HPolytope hypercube(Index dim) {
    RMatrix a(2 * dim, dim);
    a.setZero();
    for (Index i = 0; i < dim; ++i) {
        a(2 * i, i) = 1;
        a(2 * i + 1, i) = -1;
    }
    return HPolytope::from_inequalities(a, RVector::Constant(2 * dim, Rational(1)));
}

HPolytope cross_polytope(Index dim) {
    const Index rows = Index{1} << dim;
    RMatrix a(rows, dim);
    for (Index m = 0; m < rows; ++m)
        for (Index j = 0; j < dim; ++j) a(m, j) = ((m >> j) & 1) ? 1 : -1;
    return HPolytope::from_inequalities(a, RVector::Constant(rows, Rational(1)));
}

// Corner simplex conv(0, e_1, ..., e_dim).
HPolytope corner_simplex(Index dim) {
    RMatrix a(dim + 1, dim);
    a.setZero();
    for (Index i = 0; i < dim; ++i) a(i, i) = -1;
    a.row(dim).setConstant(Rational(1));
    RVector b = RVector::Zero(dim + 1);
    b(dim) = 1;
    return HPolytope::from_inequalities(a, b);
}

std::vector<int> face_counts(const HPolytope& p) {
    std::vector<int> counts;
    for (int d = 0; d <= p.ambient_dim(); ++d)
        counts.push_back(static_cast<int>(p.lattice().faces_of_dim(d).size()));
    return counts;
}

// Mutual containment of two H-descriptions, certified by exact LP: every
// vertex of each satisfies the other's rows.
bool equivalent(const HPolytope& p, const HPolytope& q) {
    for (const auto& v : p.vertices())
        if (!q.contains(v)) return false;
    for (const auto& v : q.vertices())
        if (!p.contains(v)) return false;
    return true;
}

} // namespace

TEST_CASE("square H->V gives the four corners") {
    const HPolytope square = hypercube(2);
    REQUIRE(square.vertices().size() == 4);
    std::set<std::pair<int, int>> got;
    for (const auto& v : square.vertices())
        got.insert({static_cast<int>(v(0)), static_cast<int>(v(1))});
    const std::set<std::pair<int, int>> want = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    CHECK(got == want);
}

TEST_CASE("simplex vertices in a hyperplane are rejected as lower-dimensional") {
    std::vector<RVector> pts;
    for (Index i = 0; i < 4; ++i) {
        RVector e = RVector::Zero(4);
        e(i) = 1;
        pts.push_back(e);
    }
    const VPolytope vp = VPolytope::from_points(pts, 4);
    CHECK_THROWS_WITH_AS(to_hrep(vp), doctest::Contains("not full-dimensional"),
                         InputError);

    // Projected to the first three coordinates the same simplex is fine.
    std::vector<RVector> proj;
    for (const auto& p : pts) proj.push_back(p.head(3));
    const HPolytope h = to_hrep(VPolytope::from_points(proj, 3));
    CHECK(h.ambient_dim() == 3);
    CHECK(h.facet_count() == 4);
    CHECK(h.vertices().size() == 4);
}

TEST_CASE("H-form with an implicit equality is rejected") {
    // x <= 1, -x <= -1 forces x = 1 in the plane.
    RMatrix a(3, 2);
    a << 1, 0, -1, 0, 0, 1;
    RVector b(3);
    b << 1, -1, 1;
    CHECK_THROWS_WITH_AS(HPolytope::from_inequalities(a, b),
                         doctest::Contains("not full-dimensional"), InputError);
}

TEST_CASE("unbounded and empty inputs are rejected") {
    RMatrix half(1, 2);
    half << 1, 0;
    CHECK_THROWS_AS(HPolytope::from_inequalities(half, RVector::Constant(1, Rational(1))),
                    InputError);

    RMatrix a(2, 1);
    a << 1, -1;
    RVector b(2);
    b << -2, 1; // x <= -2 and x >= -1
    CHECK_THROWS_AS(HPolytope::from_inequalities(a, b), InputError);
}

TEST_CASE("redundant rows are removed at construction") {
    RMatrix a(5, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1; // x+y <= 3 is slack on [-1,1]^2
    RVector b(5);
    b << 1, 1, 1, 1, 3;
    const HPolytope p = HPolytope::from_inequalities(a, b);
    CHECK(p.facet_count() == 4);
    CHECK(p.vertices().size() == 4);
}

TEST_CASE("4-cube face counts by dimension") {
    const auto counts = face_counts(hypercube(4));
    CHECK(counts == std::vector<int>{16, 32, 24, 8, 1});
}

TEST_CASE("3-simplex face counts") {
    const auto counts = face_counts(corner_simplex(3));
    CHECK(counts == std::vector<int>{4, 6, 4, 1});
}

TEST_CASE("4-cross-polytope has 32 two-faces") {
    const HPolytope cp = cross_polytope(4);
    CHECK(cp.lattice().faces_of_dim(2).size() == 32);
    CHECK(cp.vertices().size() == 8);
    CHECK(cp.facet_count() == 16);
}

TEST_CASE("Euler relation holds on seeded random polytopes") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const Index dim = 2 + static_cast<Index>(seed % 3);
        const HPolytope p = generate_polytope(seed, dim, dim + 3);
        int alternating = 0;
        for (int d = 0; d <= p.ambient_dim(); ++d) {
            const int count = static_cast<int>(p.lattice().faces_of_dim(d).size());
            alternating += (d % 2 == 0 ? count : -count);
        }
        CHECK(alternating == 1);
    }
}

TEST_CASE("lattice dims equal ambient minus rank of tight rows") {
    const HPolytope p = generate_polytope(77, 3, 6);
    for (const auto& face : p.lattice().faces()) {
        RMatrix rows_mat(static_cast<Index>(face.tight.size()), p.ambient_dim());
        for (size_t i = 0; i < face.tight.size(); ++i)
            rows_mat.row(static_cast<Index>(i)) = p.a().row(face.tight[i]);
        CHECK(face.dim == p.ambient_dim() - rank_of(rows_mat));
        // Sample point: tight rows with equality, all others strict.
        for (Index k = 0; k < p.facet_count(); ++k) {
            const Rational lhs = p.a().row(k).dot(face.sample);
            const bool tight =
                std::find(face.tight.begin(), face.tight.end(), static_cast<int>(k)) !=
                face.tight.end();
            if (tight) CHECK(lhs == p.b()(k));
            else CHECK(lhs < p.b()(k));
        }
    }
}

TEST_CASE("skeleton: 4-cube 2-skeleton has the 24 squares") {
    const HPolytope cube = hypercube(4);
    const auto faces = skeleton(cube, 2);
    CHECK(faces.size() == 24);
    std::set<std::vector<int>> tight_sets;
    for (const auto& f : faces) {
        CHECK(f.dim == 2);
        CHECK(f.vertex_ids.size() == 4);
        tight_sets.insert(f.tight);
    }
    CHECK(tight_sets.size() == 24); // pairwise distinct as tight sets
}

TEST_CASE("skeleton at the ambient dimension is the polytope itself") {
    const HPolytope cube = hypercube(3);
    const auto faces = skeleton(cube, 3);
    REQUIRE(faces.size() == 1);
    CHECK(faces[0].tight.empty());
    CHECK_THROWS_AS(skeleton(cube, 4), InputError);
}

TEST_CASE("3-simplex has 6 edges") {
    CHECK(skeleton(corner_simplex(3), 1).size() == 6);
}

TEST_CASE("minimal_face locates interior, vertex, and edge-midpoint") {
    const HPolytope square = hypercube(2);

    const auto inside = minimal_face(square, make_rvector({Rational(1, 3), Rational(0)}));
    REQUIRE(std::holds_alternative<Face>(inside));
    CHECK(std::get<Face>(inside).dim == 2);
    CHECK(std::get<Face>(inside).tight.empty());

    const auto corner = minimal_face(square, make_rvector({Rational(1), Rational(1)}));
    REQUIRE(std::holds_alternative<Face>(corner));
    CHECK(std::get<Face>(corner).dim == 0);

    const auto edge_mid = minimal_face(square, make_rvector({Rational(1), Rational(0)}));
    REQUIRE(std::holds_alternative<Face>(edge_mid));
    CHECK(std::get<Face>(edge_mid).dim == 1);
    CHECK(std::get<Face>(edge_mid).tight.size() == 1);

    const auto outside = minimal_face(square, make_rvector({Rational(2), Rational(0)}));
    REQUIRE(std::holds_alternative<Outside>(outside));
    CHECK(std::get<Outside>(outside).violated_row >= 0);
}

TEST_CASE("normalize_to_paper_form translates and rescales") {
    // Square [0,2]^2 with target (1,1) becomes [-1,1]^2 with unit offsets.
    RMatrix a(4, 2);
    a << 1, 0, -1, 0, 0, 1, 0, -1;
    RVector b(4);
    b << 2, 0, 2, 0;
    const HPolytope square = HPolytope::from_inequalities(a, b);
    const auto norm = normalize_to_paper_form(square, make_rvector({Rational(1), Rational(1)}));
    CHECK(!norm.boundary_target);
    CHECK(norm.polytope.b() == RVector::Constant(4, Rational(1)));
    CHECK(norm.polytope.tight_rows(RVector::Zero(2)).empty());
    CHECK(equivalent(norm.polytope, hypercube(2)));

    // Already centered: identity up to row scaling.
    const HPolytope centered = hypercube(2);
    const auto same = normalize_to_paper_form(centered, RVector::Zero(2));
    CHECK(!same.boundary_target);
    CHECK(equivalent(same.polytope, centered));

    // A vertex target sets the boundary flag.
    const auto at_vertex =
        normalize_to_paper_form(centered, make_rvector({Rational(1), Rational(1)}));
    CHECK(at_vertex.boundary_target);
    int zero_offsets = 0;
    for (Index i = 0; i < at_vertex.polytope.b().size(); ++i)
        if (at_vertex.polytope.b()(i) == 0) ++zero_offsets;
    CHECK(zero_offsets == 2);

    CHECK_THROWS_AS(normalize_to_paper_form(centered, make_rvector({Rational(3), Rational(0)})),
                    InputError);
}

TEST_CASE("round trip H->V->H on seeded 4-polytopes") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const HPolytope p = generate_polytope(seed, 4, 9);
        const VPolytope v = to_vrep(p);
        const HPolytope back = to_hrep(v);
        CHECK(equivalent(p, back));
        CHECK(back.facet_count() == p.facet_count());

        // Every vertex has at least ambient_dim tight independent rows.
        for (const auto& vert : p.vertices()) {
            const auto tight = p.tight_rows(vert);
            RMatrix rows_mat(static_cast<Index>(tight.size()), p.ambient_dim());
            for (size_t i = 0; i < tight.size(); ++i)
                rows_mat.row(static_cast<Index>(i)) = p.a().row(tight[i]);
            CHECK(rank_of(rows_mat) == p.ambient_dim());
        }
    }
}

TEST_CASE("generator is deterministic and respects the request") {
    const HPolytope p1 = generate_polytope(5, 3, 8);
    const HPolytope p2 = generate_polytope(5, 3, 8);
    CHECK(p1.a() == p2.a());
    CHECK(p1.b() == p2.b());
    CHECK(p1.facet_count() == 8);
    CHECK(p1.contains(RVector::Zero(3)));
    CHECK(p1.tight_rows(RVector::Zero(3)).empty()); // origin interior

    const RVector q = sample_interior_point(p1, 99);
    const auto mf = minimal_face(p1, q);
    REQUIRE(std::holds_alternative<Face>(mf));
    CHECK(std::get<Face>(mf).dim == 3);
}

TEST_CASE("embed_face turns a face into a full-dimensional polytope") {
    const HPolytope cube = hypercube(3);
    const auto squares = skeleton(cube, 2);
    REQUIRE(!squares.empty());
    const FaceChart chart = embed_face(cube, squares[0]);
    CHECK(chart.sub.ambient_dim() == 2);
    CHECK(chart.sub.vertices().size() == 4);
    // Chart round trip on each vertex of the embedded face.
    for (const auto& u : chart.sub.vertices()) {
        const RVector x = chart.to_ambient(u);
        CHECK(cube.contains(x));
        CHECK(chart.to_chart(x) == u);
    }
}
