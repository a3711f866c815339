#ifndef BARYSKEL_DECOMPOSE_HPP
#define BARYSKEL_DECOMPOSE_HPP

#include "baryskel/lp.hpp"
#include "baryskel/polytope.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace baryskel {

/// An exactly checkable certificate: sum_i weight_i * point_i == target,
/// every point lies in its recorded face, and every recorded face has
/// dimension at most the declared skeleton dimension for that slot.
struct Decomposition {
    RVector target;
    std::vector<Rational> weights;
    std::vector<RVector> points;
    std::vector<Face> faces;
    std::vector<int> skeleton_dims;

    int count() const { return static_cast<int>(points.size()); }
};

struct SolverConfig {
    /// Enumerate unordered multisets instead of ordered tuples. Changes at
    /// most which witness is found, never feasibility.
    bool symmetry_pruning = true;
    /// Order candidate tuples by distance from the target to the average
    /// of the faces' sample points (ties broken lexicographically).
    bool heuristic_order = true;
    /// Evaluate tuple batches concurrently; the first feasible tuple in
    /// canonical order still wins, so results do not depend on scheduling.
    bool parallel = false;
    int threads = 1;
    /// Abort with an error after this many full-tuple feasibility checks.
    std::optional<std::uint64_t> tuple_budget;
};

struct TupleInfeasible {
    Infeasible farkas; // certificate for the stacked face-membership system
};

using TupleResult = std::variant<Decomposition, TupleInfeasible>;

/// One LP on the stacked system: x_i in the closed face E_i for each slot
/// and sum_i w_i x_i == target. The equal-weight overload uses w_i = 1/n,
/// i.e. the points average to the target.
TupleResult tuple_feasible(const HPolytope& p, const std::vector<Face>& faces,
                           const std::vector<Rational>& weights, const RVector& target);
TupleResult tuple_feasible(const HPolytope& p, const std::vector<Face>& faces,
                           const RVector& target);

/// Main algorithm for n prime: n points in the d-skeleton averaging to the
/// target. Existence is guaranteed, so a fully exhausted search is an
/// internal soundness error, never a user error.
Decomposition decompose_prime(const HPolytope& p, const RVector& target, int n, int d,
                              const SolverConfig& cfg = {});

/// Composite n by recursion over the ascending prime factorization;
/// flattens to n points in the (dim/n)-skeleton with weights 1/n.
Decomposition decompose(const HPolytope& p, const RVector& target, int n,
                        const SolverConfig& cfg = {});

/// Weighted corollary: at each stage of the chain one point is decomposed
/// one level deeper, yielding skeletons of strictly decreasing dimension
/// with weights 1/n1, 1/(n1 n2), ...
Decomposition mixed_decompose(const HPolytope& p, const RVector& target,
                              const std::vector<int>& chain, const SolverConfig& cfg = {});

struct MixedSchedule {
    std::vector<Rational> weights;
    std::vector<int> dims;
};

/// The weight/dimension pattern mixed_decompose produces for a polytope of
/// the given dimension, without running any geometry.
MixedSchedule mixed_schedule(int ambient_dim, const std::vector<int>& chain);

/// Independent certificate re-check using only the polytope description
/// and exact arithmetic. On failure, *why (if given) names the defect.
bool validate_decomposition(const HPolytope& p, const Decomposition& dec,
                            std::string* why = nullptr);

} // namespace baryskel

#endif
