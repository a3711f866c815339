#ifndef BARYSKEL_GENERATOR_HPP
#define BARYSKEL_GENERATOR_HPP

#include "baryskel/polytope.hpp"

#include <cstdint>

namespace baryskel {

/// Deterministic seeded random H-polytope: bounded, full-dimensional,
/// irredundant, origin interior (all offsets are 1), with exactly
/// `facet_count` facets. Throws InputError when the request cannot be met.
HPolytope generate_polytope(std::uint64_t seed, Index ambient_dim, Index facet_count);

/// Seeded rational point of P: a convex combination of the vertices with
/// positive dyadic-style weights, hence interior for full-dimensional P.
RVector sample_interior_point(const HPolytope& p, std::uint64_t seed);

/// Seeded relative-interior point of a lattice face of P.
RVector sample_point_in_face(const HPolytope& p, const Face& face, std::uint64_t seed);

} // namespace baryskel

#endif
