#include "baryskel/generator.hpp"
#include "baryskel/errors.hpp"

#include <random>
#include <set>

namespace baryskel {

namespace {

int bounded_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

} // namespace

namespace {

// Rational point on the unit sphere via stereographic projection. Distinct
// draws are in strictly convex position, so with unit offsets every facet
// row is irredundant and the requested facet count is met exactly.
RVector unit_normal(std::mt19937_64& rng, Index dim) {
    if (dim == 1) {
        RVector a(1);
        a(0) = (rng() % 2 == 0) ? 1 : -1;
        return a;
    }
    RVector u(dim - 1);
    for (Index j = 0; j + 1 < dim; ++j) u(j) = Rational(bounded_int(rng, -12, 12), 4);
    const Rational nn = squared_norm(u);
    RVector a(dim);
    a.head(dim - 1) = (Rational(2) / (nn + 1)) * u;
    a(dim - 1) = (nn - 1) / (nn + 1);
    if (rng() % 2 == 1) a = -a; // symmetrize so draws span positively
    return a;
}

} // namespace

HPolytope generate_polytope(std::uint64_t seed, Index ambient_dim, Index facet_count) {
    if (ambient_dim < 1 || ambient_dim > 8)
        throw InputError("ambient dimension must be in [1, 8]");
    if (facet_count < ambient_dim + 1)
        throw InputError("facet count must be at least ambient_dim + 1");
    if (ambient_dim == 1 && facet_count != 2)
        throw InputError("a 1-dimensional polytope has exactly 2 facets");

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 256; ++attempt) {
        RMatrix a(facet_count, ambient_dim);
        std::set<std::vector<Rational>> used;
        for (Index i = 0; i < facet_count; ++i) {
            while (true) {
                const RVector normal = unit_normal(rng, ambient_dim);
                std::vector<Rational> key(static_cast<size_t>(ambient_dim));
                for (Index j = 0; j < ambient_dim; ++j) key[static_cast<size_t>(j)] = normal(j);
                if (used.insert(std::move(key)).second) {
                    a.row(i) = normal.transpose();
                    break;
                }
            }
        }
        try {
            HPolytope p = HPolytope::from_inequalities(
                a, RVector::Constant(facet_count, Rational(1)));
            if (p.facet_count() != facet_count)
                throw InternalError("convex-position normals lost a facet");
            return p;
        } catch (const InputError&) {
            // normals failed to span positively (unbounded draw); resample
        }
    }
    throw InputError("could not generate a bounded polytope with the requested facet count");
}

RVector sample_interior_point(const HPolytope& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto& verts = p.vertices();
    Rational total = 0;
    RVector sum = RVector::Zero(p.ambient_dim());
    for (const auto& v : verts) {
        const Rational w(bounded_int(rng, 1, 16));
        sum += w * v;
        total += w;
    }
    return sum / total;
}

RVector sample_point_in_face(const HPolytope& p, const Face& face, std::uint64_t seed) {
    if (face.vertex_ids.empty())
        throw InputError("face carries no lattice vertex ids");
    std::mt19937_64 rng(seed);
    Rational total = 0;
    RVector sum = RVector::Zero(p.ambient_dim());
    for (int id : face.vertex_ids) {
        const Rational w(bounded_int(rng, 1, 16));
        sum += w * p.vertices()[static_cast<size_t>(id)];
        total += w;
    }
    return sum / total;
}

} // namespace baryskel
