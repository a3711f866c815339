#ifndef BARYSKEL_PROOF_HPP
#define BARYSKEL_PROOF_HPP

#include "baryskel/decompose.hpp"
#include "baryskel/polytope.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace baryskel {

/// Label of a face F of Q: the tuple (E_1, ..., E_n) of faces of the base
/// polytope with F = (E_1 x ... x E_n) cut by the zero-sum subspace.
/// Column faces are identified by their tight rows in the base polytope.
struct FaceLabel {
    std::vector<std::vector<int>> tight; // one tight set per column
    std::vector<int> dims;               // dim E_i per column
};

/// Values of the map phi at the barycenters q_F of the faces of Q.
/// Each value lies in Y = {y : sum_i y_i = 0}.
struct PhiMap {
    std::vector<RVector> at_face; // indexed by lattice face id
};

/// Q = P^n cut by the subspace of n-tuples with barycenter at the origin,
/// built in explicit coordinates (columns 1..n-1 free, the last column is
/// minus their sum) so Q is full-dimensional. Immutable after build.
struct QComplex {
    int n = 0;
    Index base_dim = 0;   // dim P
    HPolytope base;       // P with unit offsets, origin interior
    HPolytope q;          // the polytope Q in the explicit coordinates
    std::vector<FaceLabel> labels; // per face id of q.lattice()
    PhiMap phi;
    bool generic = false;

    int skeleton_target_dim() const { return static_cast<int>(base_dim) / n; }
    /// Column points of a point given in Q's coordinates.
    std::vector<RVector> columns(const RVector& u) const;
};

/// Requires the origin interior (offsets all positive) and dim P divisible
/// by n. Every face of Q is labeled via the tight rows of the product
/// system, and phi is evaluated at every face barycenter.
QComplex build_q(const HPolytope& p_centered, int n);

struct GenericityViolation {
    int face_id;
    int face_dim;
    int expected_dim; // sum of label dims minus dim P
};

struct GenericityReport {
    bool generic = false;
    std::vector<GenericityViolation> violations;
};

/// Exhaustive exact check of dim F == sum_i dim E_i - dim P on every face.
GenericityReport check_genericity(const QComplex& q);

/// P_eps = {x : (A + eps) x <= 1} with eps drawn deterministically from the
/// seed, |eps_ij| <= magnitude. Returns nullopt (retry with a smaller
/// magnitude) when the draw is unbounded or changes the facet count.
std::optional<HPolytope> perturb(const HPolytope& p, std::uint64_t seed,
                                 const Rational& magnitude);

/// A flag F_0 < F_1 < ... of faces of Q with barycentric coordinates of a
/// point on the corresponding simplex of the barycentric subdivision.
struct Chain {
    std::vector<int> face_ids;
    std::vector<Rational> t;
};

struct PhiZero {
    Chain chain;
    RVector z; // in Q's coordinates
};

/// Searches the simplices of the barycentric subdivision of the
/// (n-1)-skeleton for an exact zero of the interpolated phi. Existence is
/// theorem-guaranteed on generic Q, so exhaustion is an internal error;
/// non-generic Q is refused.
PhiZero find_phi_zero(const QComplex& q);

/// Replays the descent argument on a chain carrying a zero: verifies the
/// per-step dimension increments, that phi_j walks down by 1/n per level,
/// that the interpolation coefficient r is an exact integer (hence 0), and
/// returns the bottom vertex, whose label has every dim E_i == dim P / n.
int descend_to_vertex(const QComplex& q, const Chain& chain);

struct EquivarianceReport {
    bool pass = true;
    std::vector<std::string> failures;
};

/// Verifies that cyclically shifting the columns permutes face labels and
/// phi values accordingly, on every face of Q.
EquivarianceReport check_equivariance(const QComplex& q);

/// One JSON object per line, suitable for the CLI trace command.
using TraceLog = std::vector<std::string>;

/// End-to-end replica of the proof: normalize, perturb until generic
/// (halving from 1/1024, at most 20 retries), build Q, find the zero,
/// descend, and re-certify the face tuple exactly on the unperturbed
/// polytope. Boundary targets run through an interior point sequence.
Decomposition decompose_via_proof(const HPolytope& p, const RVector& target, int n,
                                  std::uint64_t seed, TraceLog* trace = nullptr);

} // namespace baryskel

#endif
