#include "baryskel/polytope.hpp"
#include "baryskel/errors.hpp"
#include "baryskel/linalg.hpp"
#include "baryskel/lp.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace baryskel {

namespace {

struct RowSystem {
    RMatrix a;
    RVector b;
    Index dim() const { return a.cols(); }
    Index rows() const { return a.rows(); }
};

// Scales (a, b) by a positive factor so the first nonzero coefficient of a
// is +-1; canonical representative of the halfspace for exact dedup.
void canonicalize_row(RVector& a, Rational& b) {
    for (Index j = 0; j < a.size(); ++j) {
        if (a(j) != 0) {
            const Rational scale = Rational(1) / abs(a(j));
            a *= scale;
            b *= scale;
            return;
        }
    }
}

std::vector<Rational> to_key(const RVector& a, const Rational& b) {
    std::vector<Rational> key(static_cast<size_t>(a.size()) + 1);
    for (Index j = 0; j < a.size(); ++j) key[static_cast<size_t>(j)] = a(j);
    key.back() = b;
    return key;
}

RowSystem canonicalize_and_dedup(const RMatrix& a, const RVector& b) {
    const Index dim = a.cols();
    std::vector<RVector> rows;
    std::vector<Rational> rhs;
    std::map<std::vector<Rational>, bool> seen;
    for (Index i = 0; i < a.rows(); ++i) {
        RVector row = a.row(i).transpose();
        Rational off = b(i);
        if (row.isZero(0)) {
            if (off < 0) throw InputError("empty polytope: row 0 <= negative offset");
            continue;
        }
        canonicalize_row(row, off);
        auto key = to_key(row, off);
        if (seen.emplace(std::move(key), true).second) {
            rows.push_back(std::move(row));
            rhs.push_back(std::move(off));
        }
    }
    RowSystem out;
    out.a.resize(static_cast<Index>(rows.size()), dim);
    out.b.resize(static_cast<Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        out.a.row(static_cast<Index>(i)) = rows[i].transpose();
        out.b(static_cast<Index>(i)) = rhs[i];
    }
    return out;
}

bool origin_strictly_inside(const RowSystem& sys) {
    for (Index i = 0; i < sys.b.size(); ++i)
        if (sys.b(i) <= 0) return false;
    return true;
}

void check_nonempty(const RowSystem& sys) {
    LinearSystem lp(sys.dim());
    for (Index i = 0; i < sys.rows(); ++i)
        lp.add_ineq(sys.a.row(i).transpose(), sys.b(i));
    if (!is_feasible(lp_feasible(lp))) throw InputError("empty polytope");
}

// Motzkin-style detection of implicit equalities. The interior is empty
// iff some y >= 0, y != 0 with y'A (+ z'A_eq) = 0 and y'b (+ z'b_eq) <= 0
// exists; rows with positive multiplier are then forced tight everywhere.
void check_full_dimensional(const RowSystem& sys) {
    std::vector<Index> ineq(static_cast<size_t>(sys.rows()));
    for (Index i = 0; i < sys.rows(); ++i) ineq[static_cast<size_t>(i)] = i;
    std::vector<Index> eq;

    while (!ineq.empty()) {
        const Index ni = static_cast<Index>(ineq.size());
        const Index ne = static_cast<Index>(eq.size());
        LinearSystem lp(ni + ne);
        for (Index j = 0; j < sys.dim(); ++j) {
            RVector row(ni + ne);
            for (Index k = 0; k < ni; ++k) row(k) = sys.a(ineq[static_cast<size_t>(k)], j);
            for (Index k = 0; k < ne; ++k) row(ni + k) = sys.a(eq[static_cast<size_t>(k)], j);
            lp.add_eq(std::move(row), Rational(0));
        }
        {
            RVector row(ni + ne);
            for (Index k = 0; k < ni; ++k) row(k) = sys.b(ineq[static_cast<size_t>(k)]);
            for (Index k = 0; k < ne; ++k) row(ni + k) = sys.b(eq[static_cast<size_t>(k)]);
            lp.add_ineq(std::move(row), Rational(0));
        }
        for (Index k = 0; k < ni; ++k) {
            RVector row = RVector::Zero(ni + ne);
            row(k) = -1;
            lp.add_ineq(std::move(row), Rational(0));
        }
        {
            RVector row = RVector::Zero(ni + ne);
            for (Index k = 0; k < ni; ++k) row(k) = 1;
            lp.add_eq(std::move(row), Rational(1));
        }
        const auto result = lp_feasible(lp);
        if (!is_feasible(result)) break;
        const RVector& y = std::get<Feasible>(result).witness;
        std::vector<Index> still;
        for (Index k = 0; k < ni; ++k) {
            if (y(k) > 0) eq.push_back(ineq[static_cast<size_t>(k)]);
            else still.push_back(ineq[static_cast<size_t>(k)]);
        }
        ineq = std::move(still);
    }

    if (!eq.empty()) {
        std::ostringstream msg;
        msg << "not full-dimensional: affine hull is cut out by rows";
        for (Index i : eq) msg << " " << i;
        msg << " (held with equality everywhere)";
        throw InputError(msg.str());
    }
}

void check_bounded(const RowSystem& sys) {
    for (Index i = 0; i < sys.dim(); ++i) {
        for (int sign : {1, -1}) {
            LinearSystem lp(sys.dim());
            for (Index r = 0; r < sys.rows(); ++r)
                lp.add_ineq(sys.a.row(r).transpose(), Rational(0));
            RVector pin = RVector::Zero(sys.dim());
            pin(i) = 1;
            lp.add_eq(std::move(pin), Rational(sign));
            if (is_feasible(lp_feasible(lp)))
                throw InputError("unbounded polytope (recession direction found)");
        }
    }
}

// Row i is redundant iff a nonnegative combination of the other rows
// dominates it (LP duality; the polytope is nonempty here).
bool row_redundant(const RowSystem& sys, const std::vector<Index>& keep, size_t drop) {
    const Index m = static_cast<Index>(keep.size()) - 1;
    if (m == 0) return false;
    std::vector<Index> others;
    for (size_t k = 0; k < keep.size(); ++k)
        if (k != drop) others.push_back(keep[k]);
    const Index target = keep[drop];

    LinearSystem lp(m);
    for (Index j = 0; j < sys.dim(); ++j) {
        RVector row(m);
        for (Index k = 0; k < m; ++k) row(k) = sys.a(others[static_cast<size_t>(k)], j);
        lp.add_eq(std::move(row), sys.a(target, j));
    }
    RVector offs(m);
    for (Index k = 0; k < m; ++k) offs(k) = sys.b(others[static_cast<size_t>(k)]);
    lp.add_ineq(std::move(offs), sys.b(target));
    for (Index k = 0; k < m; ++k) {
        RVector row = RVector::Zero(m);
        row(k) = -1;
        lp.add_ineq(std::move(row), Rational(0));
    }
    return is_feasible(lp_feasible(lp));
}

RowSystem remove_redundant_rows(RowSystem sys) {
    std::vector<Index> keep(static_cast<size_t>(sys.rows()));
    for (Index i = 0; i < sys.rows(); ++i) keep[static_cast<size_t>(i)] = i;
    size_t pos = 0;
    while (pos < keep.size()) {
        if (keep.size() > 1 && row_redundant(sys, keep, pos)) keep.erase(keep.begin() + static_cast<long>(pos));
        else ++pos;
    }
    RowSystem out;
    out.a.resize(static_cast<Index>(keep.size()), sys.dim());
    out.b.resize(static_cast<Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) {
        out.a.row(static_cast<Index>(i)) = sys.a.row(keep[i]);
        out.b(static_cast<Index>(i)) = sys.b(keep[i]);
    }
    return out;
}

// Exact a-priori bound on vertex coordinates via Cramer's rule: a vertex
// solves a DxD subsystem, so |coordinate| <= D! * (largest integer entry
// of the denominator-cleared system)^D.
Rational vertex_coordinate_bound(const RowSystem& sys) {
    Integer lcm_den = 1;
    for (Index i = 0; i < sys.rows(); ++i) {
        for (Index j = 0; j < sys.dim(); ++j)
            lcm_den = lcm(lcm_den, Integer(denominator(sys.a(i, j))));
        lcm_den = lcm(lcm_den, Integer(denominator(sys.b(i))));
    }
    Integer max_entry = 1;
    auto update = [&](const Rational& v) {
        const Integer scaled = abs(Integer(numerator(v)) * (lcm_den / Integer(denominator(v))));
        if (scaled > max_entry) max_entry = scaled;
    };
    for (Index i = 0; i < sys.rows(); ++i) {
        for (Index j = 0; j < sys.dim(); ++j) update(sys.a(i, j));
        update(sys.b(i));
    }
    Integer bound = 1;
    for (Index k = 2; k <= sys.dim(); ++k) bound *= k;
    for (Index k = 0; k < sys.dim(); ++k) bound *= max_entry;
    return Rational(bound + 1);
}

struct EnumeratedVertex {
    RVector coords;
    Bitset tight; // over 2D box rows followed by the facet rows
};

// Incremental double description on the vertex side, seeded with a box
// that provably contains the polytope. Facet rows are inserted in
// lexicographic order; the box rows are never tight at the end.
std::vector<std::pair<RVector, Bitset>> enumerate_vertices(const RowSystem& sys) {
    const Index dim = sys.dim();
    const Index f = sys.rows();
    const size_t total_rows = static_cast<size_t>(2 * dim + f);
    const Rational box = vertex_coordinate_bound(sys);

    std::vector<RVector> all_coeffs(total_rows);
    std::vector<Rational> all_rhs(total_rows);
    for (Index i = 0; i < 2 * dim; ++i) {
        RVector e = RVector::Zero(dim);
        e(i / 2) = (i % 2 == 0) ? 1 : -1;
        all_coeffs[static_cast<size_t>(i)] = std::move(e);
        all_rhs[static_cast<size_t>(i)] = box;
    }
    for (Index k = 0; k < f; ++k) {
        all_coeffs[static_cast<size_t>(2 * dim + k)] = sys.a.row(k).transpose();
        all_rhs[static_cast<size_t>(2 * dim + k)] = sys.b(k);
    }
    auto row_coeff = [&](size_t idx) -> const RVector& { return all_coeffs[idx]; };
    auto row_rhs = [&](size_t idx) -> const Rational& { return all_rhs[idx]; };

    std::vector<EnumeratedVertex> verts;
    for (size_t mask = 0; mask < (size_t{1} << dim); ++mask) {
        EnumeratedVertex v;
        v.coords.resize(dim);
        v.tight.resize(total_rows);
        for (Index i = 0; i < dim; ++i) {
            const bool plus = (mask >> i) & 1;
            v.coords(i) = plus ? box : -box;
            v.tight.set(static_cast<size_t>(2 * i) + (plus ? 0 : 1));
        }
        verts.push_back(std::move(v));
    }

    std::vector<size_t> processed; // row indices already inserted
    for (Index i = 0; i < 2 * dim; ++i) processed.push_back(static_cast<size_t>(i));

    std::vector<Index> order(static_cast<size_t>(f));
    for (Index i = 0; i < f; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index x, Index y) {
        for (Index j = 0; j < dim; ++j) {
            if (sys.a(x, j) != sys.a(y, j)) return sys.a(x, j) < sys.a(y, j);
        }
        return sys.b(x) < sys.b(y);
    });

    auto recompute_tight = [&](const RVector& point, const std::vector<size_t>& rows,
                               size_t extra) {
        Bitset t(total_rows);
        for (size_t idx : rows)
            if (row_coeff(idx).dot(point) == row_rhs(idx)) t.set(idx);
        if (row_coeff(extra).dot(point) == row_rhs(extra)) t.set(extra);
        return t;
    };

    for (Index raw : order) {
        const size_t ridx = static_cast<size_t>(2 * dim + raw);
        const RVector coeff = row_coeff(ridx);
        const Rational rhs = row_rhs(ridx);

        std::vector<Rational> slack(verts.size());
        std::vector<size_t> inside, on, out;
        for (size_t v = 0; v < verts.size(); ++v) {
            slack[v] = rhs - coeff.dot(verts[v].coords);
            if (slack[v] > 0) inside.push_back(v);
            else if (slack[v] == 0) on.push_back(v);
            else out.push_back(v);
        }
        if (out.empty()) {
            for (size_t v : on) verts[v].tight.set(ridx);
            processed.push_back(ridx);
            continue;
        }
        if (inside.empty() && on.empty())
            throw InternalError("vertex enumeration emptied a nonempty polytope");

        std::map<std::vector<Rational>, EnumeratedVertex> fresh;
        for (size_t vp : inside) {
            for (size_t vm : out) {
                Bitset common = verts[vp].tight & verts[vm].tight;
                if (common.count() + 1 < static_cast<size_t>(dim)) continue;
                RMatrix rows_mat(static_cast<Index>(common.count()), dim);
                Index rr = 0;
                for (size_t idx = common.find_first(); idx != Bitset::npos;
                     idx = common.find_next(idx))
                    rows_mat.row(rr++) = row_coeff(idx).transpose();
                if (rank_of(rows_mat) != dim - 1) continue;
                const Rational t = slack[vp] / (slack[vp] - slack[vm]);
                RVector w = verts[vp].coords + t * (verts[vm].coords - verts[vp].coords);
                std::vector<Rational> key(static_cast<size_t>(dim));
                for (Index j = 0; j < dim; ++j) key[static_cast<size_t>(j)] = w(j);
                if (fresh.count(key)) continue;
                EnumeratedVertex nv;
                nv.tight = recompute_tight(w, processed, ridx);
                nv.coords = std::move(w);
                fresh.emplace(std::move(key), std::move(nv));
            }
        }

        std::vector<EnumeratedVertex> next;
        for (size_t v : inside) next.push_back(std::move(verts[v]));
        for (size_t v : on) {
            verts[v].tight.set(ridx);
            next.push_back(std::move(verts[v]));
        }
        for (auto& [key, nv] : fresh) next.push_back(std::move(nv));
        verts = std::move(next);
        processed.push_back(ridx);
    }

    std::vector<std::pair<RVector, Bitset>> result;
    for (auto& v : verts) {
        Bitset tight(static_cast<size_t>(f));
        for (Index k = 0; k < 2 * dim; ++k)
            if (v.tight.test(static_cast<size_t>(k)))
                throw InternalError("box row tight after vertex enumeration");
        for (Index k = 0; k < f; ++k)
            if (v.tight.test(static_cast<size_t>(2 * dim + k))) tight.set(static_cast<size_t>(k));
        result.emplace_back(std::move(v.coords), std::move(tight));
    }
    std::sort(result.begin(), result.end(), [](const auto& x, const auto& y) {
        for (Index j = 0; j < x.first.size(); ++j)
            if (x.first(j) != y.first(j)) return x.first(j) < y.first(j);
        return false;
    });
    return result;
}

} // namespace

HPolytope HPolytope::from_inequalities(RMatrix a, RVector b, BuildOptions opts) {
    if (a.rows() == 0 || a.cols() == 0) throw InputError("empty inequality system");
    if (a.rows() != b.size()) throw InputError("row/offset count mismatch");

    RowSystem sys = canonicalize_and_dedup(a, b);
    if (sys.rows() == 0) throw InputError("no constraints left: unbounded");

    if (!origin_strictly_inside(sys)) {
        check_nonempty(sys);
        check_full_dimensional(sys);
    }
    if (!opts.skip_boundedness_check) check_bounded(sys);
    sys = remove_redundant_rows(sys);

    HPolytope p;
    p.a_ = std::move(sys.a);
    p.b_ = std::move(sys.b);
    auto enumerated = enumerate_vertices({p.a_, p.b_});
    if (enumerated.size() < static_cast<size_t>(p.ambient_dim()) + 1)
        throw InternalError("bounded full-dimensional polytope with too few vertices");
    for (auto& [coords, tight] : enumerated) {
        RMatrix rows_mat(static_cast<Index>(tight.count()), p.ambient_dim());
        Index rr = 0;
        for (size_t k = tight.find_first(); k != Bitset::npos; k = tight.find_next(k))
            rows_mat.row(rr++) = p.a_.row(static_cast<Index>(k));
        if (rank_of(rows_mat) != p.ambient_dim())
            throw InternalError("enumerated point is not a vertex");
        p.vertices_.push_back(std::move(coords));
    }
    p.init_cache();
    return p;
}

const FaceLattice& HPolytope::lattice() const {
    std::lock_guard<std::mutex> lock(*lattice_mutex_);
    if (!lattice_cache_)
        lattice_cache_ = std::make_shared<const FaceLattice>(FaceLattice::build(*this));
    return *lattice_cache_;
}

bool HPolytope::contains(const RVector& x) const { return violated_row(x) < 0; }

int HPolytope::violated_row(const RVector& x) const {
    if (x.size() != ambient_dim()) throw InputError("point has wrong dimension");
    for (Index i = 0; i < facet_count(); ++i)
        if (a_.row(i).dot(x.transpose()) > b_(i)) return static_cast<int>(i);
    return -1;
}

std::vector<int> HPolytope::tight_rows(const RVector& x) const {
    std::vector<int> tight;
    for (Index i = 0; i < facet_count(); ++i)
        if (a_.row(i).dot(x.transpose()) == b_(i)) tight.push_back(static_cast<int>(i));
    return tight;
}

RVector HPolytope::interior_point() const {
    RVector sum = RVector::Zero(ambient_dim());
    for (const auto& v : vertices_) sum += v;
    return sum / Rational(static_cast<int>(vertices_.size()));
}

HPolytope HPolytope::translate(const RVector& p) const {
    if (p.size() != ambient_dim()) throw InputError("translation has wrong dimension");
    HPolytope out;
    out.a_ = a_;
    out.b_ = b_ - a_ * p;
    out.vertices_.reserve(vertices_.size());
    for (const auto& v : vertices_) out.vertices_.push_back(v - p);
    out.init_cache();
    return out;
}

HPolytope HPolytope::scale_rows_to_one() const {
    HPolytope out;
    out.a_ = a_;
    out.b_ = RVector::Constant(b_.size(), Rational(1));
    for (Index i = 0; i < b_.size(); ++i) {
        if (b_(i) <= 0)
            throw InputError("cannot scale offsets to 1: origin is not interior");
        out.a_.row(i) /= b_(i);
    }
    out.vertices_ = vertices_;
    out.init_cache();
    return out;
}

const std::vector<int>& FaceLattice::faces_of_dim(int d) const {
    if (d < 0 || d > ambient_dim_) throw InputError("face dimension out of range");
    return by_dim_[static_cast<size_t>(d)];
}

bool FaceLattice::contains(int outer, int inner) const {
    return vertex_sets_[static_cast<size_t>(inner)]
        .is_subset_of(vertex_sets_[static_cast<size_t>(outer)]);
}

std::vector<int> FaceLattice::faces_above(int id) const {
    const int d = faces_[static_cast<size_t>(id)].dim;
    std::vector<int> out;
    if (d + 1 > ambient_dim_) return out;
    for (int cand : by_dim_[static_cast<size_t>(d) + 1])
        if (contains(cand, id)) out.push_back(cand);
    return out;
}

int FaceLattice::find_by_tight_set(const std::vector<int>& tight) const {
    for (size_t i = 0; i < faces_.size(); ++i)
        if (faces_[i].tight == tight) return static_cast<int>(i);
    return -1;
}

int FaceLattice::find_by_vertex_set(const std::vector<int>& vertex_ids) const {
    Bitset key(vertex_sets_.empty() ? 0 : vertex_sets_[0].size());
    for (int v : vertex_ids) key.set(static_cast<size_t>(v));
    for (size_t i = 0; i < faces_.size(); ++i)
        if (vertex_sets_[i] == key) return static_cast<int>(i);
    return -1;
}

FaceLattice FaceLattice::build(const HPolytope& p) {
    const Index dim = p.ambient_dim();
    const Index f = p.facet_count();
    const auto& verts = p.vertices();
    const size_t nv = verts.size();

    std::vector<Bitset> vertex_tight(nv, Bitset(static_cast<size_t>(f)));
    std::vector<Bitset> facet_verts(static_cast<size_t>(f), Bitset(nv));
    for (size_t v = 0; v < nv; ++v) {
        for (Index k = 0; k < f; ++k) {
            if (p.a().row(k).dot(verts[v].transpose()) == p.b()(k)) {
                vertex_tight[v].set(static_cast<size_t>(k));
                facet_verts[static_cast<size_t>(k)].set(v);
            }
        }
    }

    // Every nonempty face is an intersection of facet vertex sets; close
    // the family starting from the whole vertex set.
    std::map<Bitset, int> seen;
    std::vector<Bitset> face_sets;
    std::queue<size_t> todo;
    Bitset top_set(nv);
    top_set.set();
    seen.emplace(top_set, 0);
    face_sets.push_back(top_set);
    todo.push(0);
    while (!todo.empty()) {
        const Bitset current = face_sets[todo.front()];
        todo.pop();
        for (Index k = 0; k < f; ++k) {
            Bitset cut = current & facet_verts[static_cast<size_t>(k)];
            if (cut.none() || cut == current) continue;
            if (seen.emplace(cut, static_cast<int>(face_sets.size())).second) {
                face_sets.push_back(cut);
                todo.push(face_sets.size() - 1);
            }
        }
    }

    FaceLattice lattice;
    lattice.ambient_dim_ = static_cast<int>(dim);
    std::vector<std::pair<Face, Bitset>> staged;
    for (const Bitset& w : face_sets) {
        Face face;
        Bitset tight(static_cast<size_t>(f));
        tight.set();
        for (size_t v = w.find_first(); v != Bitset::npos; v = w.find_next(v)) {
            tight &= vertex_tight[v];
            face.vertex_ids.push_back(static_cast<int>(v));
        }
        for (size_t k = tight.find_first(); k != Bitset::npos; k = tight.find_next(k))
            face.tight.push_back(static_cast<int>(k));
        RMatrix rows_mat(static_cast<Index>(face.tight.size()), dim);
        for (size_t i = 0; i < face.tight.size(); ++i)
            rows_mat.row(static_cast<Index>(i)) = p.a().row(face.tight[i]);
        face.dim = static_cast<int>(dim - rank_of(rows_mat));
        RVector sum = RVector::Zero(dim);
        for (int v : face.vertex_ids) sum += verts[static_cast<size_t>(v)];
        face.sample = sum / Rational(static_cast<int>(face.vertex_ids.size()));
        staged.emplace_back(std::move(face), w);
    }

    std::sort(staged.begin(), staged.end(), [](const auto& x, const auto& y) {
        if (x.first.dim != y.first.dim) return x.first.dim < y.first.dim;
        return x.first.tight < y.first.tight;
    });
    lattice.by_dim_.resize(static_cast<size_t>(dim) + 1);
    for (auto& [face, w] : staged) {
        const int id = static_cast<int>(lattice.faces_.size());
        if (face.dim == static_cast<int>(dim)) lattice.top_ = id;
        lattice.by_dim_[static_cast<size_t>(face.dim)].push_back(id);
        lattice.faces_.push_back(std::move(face));
        lattice.vertex_sets_.push_back(std::move(w));
    }
    if (lattice.top_ < 0) throw InternalError("face lattice lost its top face");
    return lattice;
}

VPolytope to_vrep(const HPolytope& p) {
    return VPolytope::from_points(p.vertices(), p.ambient_dim());
}

VPolytope VPolytope::from_points(std::vector<RVector> points, Index ambient_dim) {
    if (points.empty()) throw InputError("no vertices given");
    for (const auto& pt : points)
        if (pt.size() != ambient_dim) throw InputError("vertex has wrong dimension");

    // Extremality: no listed point is a convex combination of the others.
    for (size_t i = 0; i < points.size(); ++i) {
        const Index m = static_cast<Index>(points.size()) - 1;
        if (m == 0) break;
        LinearSystem lp(m);
        for (Index j = 0; j < ambient_dim; ++j) {
            RVector row(m);
            Index c = 0;
            for (size_t k = 0; k < points.size(); ++k)
                if (k != i) row(c++) = points[k](j);
            lp.add_eq(std::move(row), points[i](j));
        }
        lp.add_eq(RVector::Constant(m, Rational(1)), Rational(1));
        for (Index k = 0; k < m; ++k) {
            RVector row = RVector::Zero(m);
            row(k) = -1;
            lp.add_ineq(std::move(row), Rational(0));
        }
        if (is_feasible(lp_feasible(lp)))
            throw InputError("listed point " + std::to_string(i) + " is not extreme");
    }

    VPolytope v;
    v.vertices_ = std::move(points);
    v.ambient_dim_ = ambient_dim;
    return v;
}

HPolytope to_hrep(const VPolytope& p) {
    const Index dim = p.ambient_dim();
    const auto& verts = p.vertices();
    if (verts.size() < static_cast<size_t>(dim) + 1)
        throw InputError("not full-dimensional: too few vertices");

    RMatrix spans(static_cast<Index>(verts.size()) - 1, dim);
    for (size_t i = 1; i < verts.size(); ++i)
        spans.row(static_cast<Index>(i - 1)) = (verts[i] - verts[0]).transpose();
    const auto rn = rank_nullspace(spans);
    if (rn.rank != dim) {
        std::ostringstream msg;
        msg << "not full-dimensional: affine hull has dimension " << rn.rank
            << "; normal directions:";
        for (Index c = 0; c < rn.nullspace.cols(); ++c) {
            msg << " (";
            for (Index j = 0; j < dim; ++j)
                msg << (j ? "," : "") << to_string(rn.nullspace(j, c));
            msg << ")";
        }
        throw InputError(msg.str());
    }

    RVector centroid = RVector::Zero(dim);
    for (const auto& v : verts) centroid += v;
    centroid /= Rational(static_cast<int>(verts.size()));

    RMatrix dual_rows(static_cast<Index>(verts.size()), dim);
    for (size_t i = 0; i < verts.size(); ++i)
        dual_rows.row(static_cast<Index>(i)) = (verts[i] - centroid).transpose();
    HPolytope::BuildOptions opts;
    const HPolytope polar =
        HPolytope::from_inequalities(dual_rows, RVector::Constant(static_cast<Index>(verts.size()), Rational(1)), opts);

    const auto& normals = polar.vertices();
    RMatrix a(static_cast<Index>(normals.size()), dim);
    RVector b(static_cast<Index>(normals.size()));
    for (size_t i = 0; i < normals.size(); ++i) {
        a.row(static_cast<Index>(i)) = normals[i].transpose();
        b(static_cast<Index>(i)) = Rational(1) + normals[i].dot(centroid);
    }
    HPolytope result = HPolytope::from_inequalities(std::move(a), std::move(b));

    // Round trip must reproduce the input vertex set exactly.
    auto got = result.vertices();
    auto want = verts;
    auto lex = [](const RVector& x, const RVector& y) {
        for (Index j = 0; j < x.size(); ++j)
            if (x(j) != y(j)) return x(j) < y(j);
        return false;
    };
    std::sort(want.begin(), want.end(), lex);
    if (got != want) throw InternalError("V->H conversion changed the vertex set");
    return result;
}

std::vector<Face> skeleton(const HPolytope& p, int d) {
    if (d < 0 || d > p.ambient_dim()) throw InputError("skeleton dimension out of range");
    const auto& lattice = p.lattice();
    std::vector<Face> out;
    for (int id : lattice.faces_of_dim(d)) out.push_back(lattice.face(id));
    return out;
}

std::variant<Face, Outside> minimal_face(const HPolytope& p, const RVector& x) {
    const int bad = p.violated_row(x);
    if (bad >= 0) return Outside{bad};
    Face face;
    face.tight = p.tight_rows(x);
    RMatrix rows_mat(static_cast<Index>(face.tight.size()), p.ambient_dim());
    for (size_t i = 0; i < face.tight.size(); ++i)
        rows_mat.row(static_cast<Index>(i)) = p.a().row(face.tight[i]);
    face.dim = static_cast<int>(p.ambient_dim() - rank_of(rows_mat));
    face.sample = x;
    return face;
}

PaperForm normalize_to_paper_form(const HPolytope& p, const RVector& target) {
    const int bad = p.violated_row(target);
    if (bad >= 0)
        throw InputError("target outside the polytope (row " + std::to_string(bad) +
                         " violated)");
    PaperForm out;
    HPolytope shifted = p.translate(target);
    bool boundary = false;
    for (Index i = 0; i < shifted.b().size(); ++i)
        if (shifted.b()(i) == 0) boundary = true;
    out.boundary_target = boundary;
    out.polytope = boundary ? std::move(shifted) : shifted.scale_rows_to_one();
    return out;
}

RVector FaceChart::to_chart(const RVector& x) const {
    const auto u = solve_exact(basis, x - origin);
    if (!u) throw InternalError("point is outside the face's affine hull");
    return *u;
}

FaceChart embed_face(const HPolytope& p, const Face& face) {
    if (face.dim < 1) throw InputError("cannot embed a face of dimension < 1");
    if (face.dim == p.ambient_dim())
        throw InputError("face is the whole polytope; no embedding needed");

    RMatrix tight_rows_mat(static_cast<Index>(face.tight.size()), p.ambient_dim());
    for (size_t i = 0; i < face.tight.size(); ++i)
        tight_rows_mat.row(static_cast<Index>(i)) = p.a().row(face.tight[i]);
    const auto rn = rank_nullspace(tight_rows_mat);
    if (static_cast<int>(p.ambient_dim() - rn.rank) != face.dim)
        throw InputError("face dimension does not match its tight rows");

    FaceChart chart;
    chart.basis = rn.nullspace;
    chart.origin = face.sample;

    std::vector<RVector> rows;
    std::vector<Rational> rhs;
    std::vector<bool> is_tight(static_cast<size_t>(p.facet_count()), false);
    for (int k : face.tight) is_tight[static_cast<size_t>(k)] = true;
    for (Index k = 0; k < p.facet_count(); ++k) {
        if (is_tight[static_cast<size_t>(k)]) continue;
        RVector reduced = (p.a().row(k) * chart.basis).transpose();
        const Rational off = p.b()(k) - p.a().row(k).dot(face.sample.transpose());
        if (reduced.isZero(0)) continue; // row is slack on the whole face
        rows.push_back(std::move(reduced));
        rhs.push_back(off);
    }
    RMatrix a(static_cast<Index>(rows.size()), face.dim);
    RVector b(static_cast<Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        a.row(static_cast<Index>(i)) = rows[i].transpose();
        b(static_cast<Index>(i)) = rhs[i];
    }
    HPolytope::BuildOptions opts;
    opts.skip_boundedness_check = true; // a face of a bounded polytope is bounded
    chart.sub = HPolytope::from_inequalities(std::move(a), std::move(b), opts);
    return chart;
}

} // namespace baryskel
