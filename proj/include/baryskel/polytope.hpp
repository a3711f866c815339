#ifndef BARYSKEL_POLYTOPE_HPP
#define BARYSKEL_POLYTOPE_HPP

#include "baryskel/rational.hpp"

#include <boost/dynamic_bitset.hpp>

#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

namespace baryskel {

using Bitset = boost::dynamic_bitset<>;

/// A face of a polytope, canonically identified by the set of facet rows
/// that are tight on it. `sample` is a relative-interior point.
/// `vertex_ids` index into the owning lattice's vertex order and are empty
/// for faces built outside a lattice (e.g. by minimal_face).
struct Face {
    std::vector<int> tight;
    int dim = -1;
    RVector sample;
    std::vector<int> vertex_ids;
};

class HPolytope;

/// The graded lattice of all nonempty faces, top face included.
/// Faces are sorted by (dim, tight set), which fixes canonical ids.
class FaceLattice {
public:
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(int id) const { return faces_[static_cast<size_t>(id)]; }
    const std::vector<int>& faces_of_dim(int d) const;
    int ambient_dim() const { return ambient_dim_; }
    int top() const { return top_; }
    int face_count() const { return static_cast<int>(faces_.size()); }

    /// Inclusion: does face `outer` contain face `inner`?
    bool contains(int outer, int inner) const;
    /// Ids of (dim+1)-faces containing face `id`.
    std::vector<int> faces_above(int id) const;
    /// Exact tight-set lookup; -1 when absent.
    int find_by_tight_set(const std::vector<int>& tight) const;
    /// Face whose vertex set is exactly the vertices listed; -1 when absent.
    int find_by_vertex_set(const std::vector<int>& vertex_ids) const;

    const Bitset& vertex_set(int id) const { return vertex_sets_[static_cast<size_t>(id)]; }

private:
    friend class HPolytope;
    static FaceLattice build(const HPolytope& p);

    int ambient_dim_ = 0;
    int top_ = -1;
    std::vector<Face> faces_;
    std::vector<Bitset> vertex_sets_;
    std::vector<std::vector<int>> by_dim_;
};

/// A bounded, full-dimensional convex polytope {x : Ax <= b} with an
/// irredundant facet description. Vertices are enumerated at construction;
/// the face lattice is built on first use. Immutable after construction.
class HPolytope {
public:
    struct BuildOptions {
        bool skip_boundedness_check = false;
    };

    /// Empty shell; only meaningful after assignment from a factory result.
    HPolytope() = default;

    /// Validates, canonicalizes and reduces the system: duplicate rows are
    /// merged, trivial rows dropped, redundant rows removed. Throws
    /// InputError for empty, unbounded or lower-dimensional input (the
    /// latter reports the implicit equalities).
    static HPolytope from_inequalities(RMatrix a, RVector b, BuildOptions opts);
    static HPolytope from_inequalities(RMatrix a, RVector b) {
        return from_inequalities(std::move(a), std::move(b), BuildOptions{});
    }

    const RMatrix& a() const { return a_; }
    const RVector& b() const { return b_; }
    Index ambient_dim() const { return a_.cols(); }
    Index facet_count() const { return a_.rows(); }

    const std::vector<RVector>& vertices() const { return vertices_; }
    const FaceLattice& lattice() const;

    bool contains(const RVector& x) const;
    std::vector<int> tight_rows(const RVector& x) const;
    /// Index of some violated row, or -1 when x is inside.
    int violated_row(const RVector& x) const;

    /// Average of the vertices; interior because the polytope is full-dim.
    RVector interior_point() const;

    /// x -> x - p coordinates. Row order and combinatorics are preserved.
    HPolytope translate(const RVector& p) const;
    /// Rescales rows so every offset is 1. Requires b > 0 (origin interior).
    HPolytope scale_rows_to_one() const;

private:
    void init_cache() { lattice_mutex_ = std::make_shared<std::mutex>(); }

    RMatrix a_;
    RVector b_;
    std::vector<RVector> vertices_; // lexicographically sorted
    mutable std::shared_ptr<const FaceLattice> lattice_cache_;
    mutable std::shared_ptr<std::mutex> lattice_mutex_;
};

/// A polytope given as its vertex list. Extremality of every listed point
/// is validated at construction.
class VPolytope {
public:
    static VPolytope from_points(std::vector<RVector> points, Index ambient_dim);

    const std::vector<RVector>& vertices() const { return vertices_; }
    Index ambient_dim() const { return ambient_dim_; }

private:
    std::vector<RVector> vertices_;
    Index ambient_dim_ = 0;
};

/// H -> V: reads off the enumerated vertex set.
VPolytope to_vrep(const HPolytope& p);
/// V -> H: polar dual around the vertex centroid. The result is exactly
/// equivalent and irredundant; throws InputError when the input is not
/// full-dimensional (reporting its affine hull).
HPolytope to_hrep(const VPolytope& p);

/// All faces of dimension exactly d, canonical order. Their union is the
/// topological d-skeleton.
std::vector<Face> skeleton(const HPolytope& p, int d);

struct Outside {
    int violated_row = -1;
};

/// The unique face whose relative interior contains x (x itself is the
/// recorded sample point), or Outside with a violated row.
std::variant<Face, Outside> minimal_face(const HPolytope& p, const RVector& x);

struct PaperForm {
    HPolytope polytope;
    bool boundary_target = false;
};

/// Translates p to the origin; when p is interior the offsets are rescaled
/// to the all-ones vector. Boundary targets are translated only and flagged.
PaperForm normalize_to_paper_form(const HPolytope& p, const RVector& target);

/// A face of dimension >= 1 re-embedded as a full-dimensional polytope in
/// its affine hull: x = origin + basis * u.
struct FaceChart {
    HPolytope sub;
    RMatrix basis;
    RVector origin;

    RVector to_ambient(const RVector& u) const { return origin + basis * u; }
    RVector to_chart(const RVector& x) const;
};

FaceChart embed_face(const HPolytope& p, const Face& face);

} // namespace baryskel

#endif
