#ifndef BARYSKEL_VERIFY_HPP
#define BARYSKEL_VERIFY_HPP

#include "baryskel/decompose.hpp"
#include "baryskel/polytope.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace baryskel {

/// An exact infeasibility certificate for one admissible face tuple at the
/// counterexample point.
struct TupleCertificate {
    std::vector<std::vector<int>> tuple_tight; // face per slot, by tight rows
    Infeasible farkas;
};

struct VerificationReport {
    std::string instance;
    std::vector<std::string> directions;
    std::uint64_t samples_attempted = 0;
    std::uint64_t samples_succeeded = 0;
    bool verified = false;
    std::optional<RVector> counterexample;
    std::vector<TupleCertificate> certificates; // one per admissible tuple
    double elapsed_seconds = 0.0;

    /// Canonical JSON. Timing is excluded unless asked for, so reports from
    /// the same seed are byte-identical.
    std::string to_json(bool include_timing = false) const;
};

/// Samples both directions of the identity nP = S + ... + S for the
/// d-skeleton S: sums of skeleton samples stay in nP (a failure here is an
/// internal soundness error, not a report entry), and scaled samples of nP
/// decompose back into n skeleton points.
VerificationReport verify_minkowski(const HPolytope& p, int n, int d,
                                    std::uint64_t seed, int samples = 100,
                                    int threads = 1);

/// The fixed prism: the unit triangle times [0, 1].
HPolytope triangular_prism();
/// conv(0, e_1, ..., e_dim).
HPolytope standard_simplex(Index dim);

/// Searches the prism for a point that no triple of edges can reach with
/// weights (1, 1, 1+eps)/(3+eps), and certifies the failure exhaustively.
/// eps = 0 is rejected: that is the theorem case.
VerificationReport falsify_weighted_prism(const Rational& eps, int threads = 1);

/// On the (2d+1)-simplex with two equal-weight points restricted to the
/// a- and b-skeletons (a + b = 2d + 1): verifies feasibility on sampled
/// points when (a, b) = (d, d+1), and otherwise finds a certified
/// counterexample point (the centroid, for the classic (0, 3) case).
VerificationReport falsify_mixed_skeleton_simplex(int a, int b, int d,
                                                  std::uint64_t seed = 0,
                                                  int samples = 100, int threads = 1);

} // namespace baryskel

#endif
