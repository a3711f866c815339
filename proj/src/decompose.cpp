#include "baryskel/decompose.hpp"
#include "baryskel/errors.hpp"
#include "baryskel/linalg.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <mutex>

namespace baryskel {

namespace {

LinearSystem stacked_system(const HPolytope& p, const std::vector<Face>& faces,
                            const std::vector<Rational>& weights, const RVector& target) {
    const Index dim = p.ambient_dim();
    const Index n = static_cast<Index>(faces.size());
    LinearSystem sys(n * dim);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < p.facet_count(); ++k) {
            RVector row = RVector::Zero(n * dim);
            row.segment(i * dim, dim) = p.a().row(k).transpose();
            sys.add_ineq(std::move(row), p.b()(k));
        }
        for (int k : faces[static_cast<size_t>(i)].tight) {
            RVector row = RVector::Zero(n * dim);
            row.segment(i * dim, dim) = p.a().row(k).transpose();
            sys.add_eq(std::move(row), p.b()(k));
        }
    }
    for (Index j = 0; j < dim; ++j) {
        RVector row = RVector::Zero(n * dim);
        for (Index i = 0; i < n; ++i) row(i * dim + j) = weights[static_cast<size_t>(i)];
        sys.add_eq(std::move(row), target(j));
    }
    return sys;
}

Face top_face(const HPolytope& p) {
    Face top;
    top.dim = static_cast<int>(p.ambient_dim());
    top.sample = p.interior_point();
    return top;
}

int prime_factor_check(int n) {
    for (int q = 2; q * q <= n; ++q)
        if (n % q == 0) return q;
    return n;
}

std::vector<int> prime_factors_ascending(int n) {
    std::vector<int> out;
    int rest = n;
    for (int q = 2; q * q <= rest;) {
        if (rest % q == 0) {
            out.push_back(q);
            rest /= q;
        } else {
            ++q;
        }
    }
    if (rest > 1) out.push_back(rest);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TupleResult tuple_feasible(const HPolytope& p, const std::vector<Face>& faces,
                           const std::vector<Rational>& weights, const RVector& target) {
    if (faces.empty()) throw InputError("empty face tuple");
    if (faces.size() != weights.size()) throw InputError("face/weight count mismatch");
    if (target.size() != p.ambient_dim()) throw InputError("target has wrong dimension");

    const LinearSystem sys = stacked_system(p, faces, weights, target);
    auto result = lp_feasible(sys);
    if (!is_feasible(result)) return TupleInfeasible{std::get<Infeasible>(std::move(result))};

    const RVector& witness = std::get<Feasible>(result).witness;
    const Index dim = p.ambient_dim();
    Decomposition dec;
    dec.target = target;
    dec.weights = weights;
    for (size_t i = 0; i < faces.size(); ++i) {
        dec.points.push_back(witness.segment(static_cast<Index>(i) * dim, dim));
        dec.faces.push_back(faces[i]);
        dec.skeleton_dims.push_back(faces[i].dim);
    }
    return dec;
}

TupleResult tuple_feasible(const HPolytope& p, const std::vector<Face>& faces,
                           const RVector& target) {
    const std::vector<Rational> weights(faces.size(),
                                        Rational(1, static_cast<int>(faces.size())));
    return tuple_feasible(p, faces, weights, target);
}

namespace {

// Search state for decompose_prime: candidate d-faces in canonical order,
// with memoized relaxations (a tuple with slack slots filled by the whole
// polytope). Infeasibility of a relaxation kills every completion, which
// is exactly the monotonicity property of the barycenter system.
class TupleSearch {
public:
    TupleSearch(const HPolytope& p, const RVector& target, int n, int d,
                const SolverConfig& cfg)
        : p_(p), target_(target), n_(n), cfg_(cfg), faces_(skeleton(p, d)),
          top_(top_face(p)) {}

    Decomposition run() {
        prune_singletons();
        const auto tuples = ordered_tuples();
        std::uint64_t checked = 0;

        const size_t chunk = cfg_.parallel
                                 ? static_cast<size_t>(std::max(1, cfg_.threads)) * 2
                                 : 1;
        for (size_t begin = 0; begin < tuples.size(); begin += chunk) {
            const size_t end = std::min(tuples.size(), begin + chunk);
            std::vector<std::optional<TupleResult>> results(end - begin);
            if (cfg_.parallel && end - begin > 1) {
                std::vector<std::future<std::optional<TupleResult>>> futures;
                for (size_t t = begin; t < end; ++t)
                    futures.push_back(std::async(std::launch::async,
                                                 [this, &tuples, t] { return check_full(tuples[t]); }));
                for (size_t t = begin; t < end; ++t) results[t - begin] = futures[t - begin].get();
            } else {
                for (size_t t = begin; t < end; ++t) results[t - begin] = check_full(tuples[t]);
            }
            for (size_t t = begin; t < end; ++t) {
                auto& res = results[t - begin];
                if (!res) continue; // skipped by pair pruning
                ++checked;
                if (cfg_.tuple_budget && checked > *cfg_.tuple_budget)
                    throw InputError("tuple budget exhausted before a witness was found");
                if (std::holds_alternative<Decomposition>(*res))
                    return std::get<Decomposition>(std::move(*res));
            }
        }
        throw InternalError(
            "exhausted all d-face tuples without a witness; this contradicts the "
            "guaranteed existence of a decomposition");
    }

private:
    const HPolytope& p_;
    const RVector& target_;
    const int n_;
    const SolverConfig& cfg_;
    std::vector<Face> faces_;
    Face top_;
    std::vector<size_t> alive_;
    std::map<std::pair<size_t, size_t>, bool> pair_alive_;
    std::mutex pair_mutex_;

    bool relaxation_feasible(const std::vector<size_t>& fixed) const {
        std::vector<Face> tuple;
        for (size_t idx : fixed) tuple.push_back(faces_[idx]);
        for (int i = static_cast<int>(fixed.size()); i < n_; ++i) tuple.push_back(top_);
        return std::holds_alternative<Decomposition>(tuple_feasible(p_, tuple, target_));
    }

    void prune_singletons() {
        for (size_t i = 0; i < faces_.size(); ++i) {
            if (n_ == 1 || relaxation_feasible({i})) alive_.push_back(i);
        }
    }

    bool pair_ok(size_t a, size_t b) {
        const auto key = std::minmax(a, b);
        {
            std::lock_guard<std::mutex> lock(pair_mutex_);
            const auto it = pair_alive_.find(key);
            if (it != pair_alive_.end()) return it->second;
        }
        const bool ok = relaxation_feasible({key.first, key.second});
        std::lock_guard<std::mutex> lock(pair_mutex_);
        pair_alive_.emplace(key, ok);
        return ok;
    }

    std::optional<TupleResult> check_full(const std::vector<size_t>& tuple) {
        if (n_ >= 3) {
            for (size_t a = 0; a < tuple.size(); ++a)
                for (size_t b = a + 1; b < tuple.size(); ++b)
                    if (!pair_ok(tuple[a], tuple[b])) return std::nullopt;
        }
        std::vector<Face> chosen;
        for (size_t idx : tuple) chosen.push_back(faces_[idx]);
        return tuple_feasible(p_, chosen, target_);
    }

    std::vector<std::vector<size_t>> ordered_tuples() const {
        std::vector<std::vector<size_t>> tuples;
        std::vector<size_t> current;
        if (cfg_.symmetry_pruning) {
            enumerate_multisets(0, current, tuples);
        } else {
            enumerate_ordered(current, tuples);
        }
        if (cfg_.heuristic_order) {
            std::vector<std::pair<Rational, size_t>> keyed(tuples.size());
            for (size_t t = 0; t < tuples.size(); ++t) {
                RVector avg = RVector::Zero(p_.ambient_dim());
                for (size_t idx : tuples[t]) avg += faces_[idx].sample;
                avg /= Rational(n_);
                keyed[t] = {squared_norm(avg - target_), t};
            }
            std::stable_sort(keyed.begin(), keyed.end(),
                             [&](const auto& x, const auto& y) {
                                 if (x.first != y.first) return x.first < y.first;
                                 return tuples[x.second] < tuples[y.second];
                             });
            std::vector<std::vector<size_t>> sorted;
            sorted.reserve(tuples.size());
            for (const auto& [key, t] : keyed) sorted.push_back(std::move(tuples[t]));
            return sorted;
        }
        return tuples;
    }

    void enumerate_multisets(size_t start, std::vector<size_t>& current,
                             std::vector<std::vector<size_t>>& out) const {
        if (static_cast<int>(current.size()) == n_) {
            out.push_back(current);
            return;
        }
        for (size_t i = start; i < alive_.size(); ++i) {
            current.push_back(alive_[i]);
            enumerate_multisets(i, current, out);
            current.pop_back();
        }
    }

    void enumerate_ordered(std::vector<size_t>& current,
                           std::vector<std::vector<size_t>>& out) const {
        if (static_cast<int>(current.size()) == n_) {
            out.push_back(current);
            return;
        }
        for (size_t i = 0; i < alive_.size(); ++i) {
            current.push_back(alive_[i]);
            enumerate_ordered(current, out);
            current.pop_back();
        }
    }
};

} // namespace

Decomposition decompose_prime(const HPolytope& p, const RVector& target, int n, int d,
                              const SolverConfig& cfg) {
    const Index dim = p.ambient_dim();
    if (n < 2 || prime_factor_check(n) != n) throw InputError("n must be prime");
    if (cfg.tuple_budget && *cfg.tuple_budget < 1)
        throw InputError("tuple budget must be at least 1");
    if (dim != static_cast<Index>(n) * d)
        throw InputError("dimension mismatch: dim P must equal n*d");
    const auto located = minimal_face(p, target);
    if (std::holds_alternative<Outside>(located))
        throw InputError("target outside the polytope (row " +
                         std::to_string(std::get<Outside>(located).violated_row) +
                         " violated)");

    Decomposition dec;
    const Face& home = std::get<Face>(located);
    if (home.dim <= d) {
        // Target already lies in a d-face: use it n times.
        dec.target = target;
        for (int i = 0; i < n; ++i) {
            dec.weights.push_back(Rational(1, n));
            dec.points.push_back(target);
            dec.faces.push_back(home);
            dec.skeleton_dims.push_back(d);
        }
    } else {
        TupleSearch search(p, target, n, d, cfg);
        dec = search.run();
        dec.skeleton_dims.assign(static_cast<size_t>(n), d);
    }

    std::string why;
    if (!validate_decomposition(p, dec, &why))
        throw InternalError("decompose_prime produced an invalid certificate: " + why);
    return dec;
}

namespace {

Face lifted_to_dim(const HPolytope& p, const Face& face, int wanted_dim) {
    const auto& lattice = p.lattice();
    int id = lattice.find_by_tight_set(face.tight);
    if (id < 0) throw InternalError("face tight set is missing from the lattice");
    while (lattice.face(id).dim < wanted_dim) {
        const auto above = lattice.faces_above(id);
        if (above.empty()) throw InternalError("graded lattice has no parent face");
        id = above.front();
    }
    return lattice.face(id);
}

// Recursive composite step: split into n_last points of the (dim/n_last)-
// skeleton, then decompose each point inside its (re-embedded) face.
std::vector<RVector> decompose_recursive(const HPolytope& poly, const RVector& target,
                                         std::vector<int> primes, const SolverConfig& cfg) {
    const int q = primes.back();
    primes.pop_back();
    const int sub_dim = static_cast<int>(poly.ambient_dim()) / q;
    Decomposition stage = decompose_prime(poly, target, q, sub_dim, cfg);
    if (primes.empty()) return stage.points;

    std::vector<RVector> out;
    for (int i = 0; i < stage.count(); ++i) {
        const Face face = lifted_to_dim(poly, stage.faces[static_cast<size_t>(i)], sub_dim);
        const FaceChart chart = embed_face(poly, face);
        const RVector sub_target = chart.to_chart(stage.points[static_cast<size_t>(i)]);
        for (const RVector& u : decompose_recursive(chart.sub, sub_target, primes, cfg))
            out.push_back(chart.to_ambient(u));
    }
    return out;
}

} // namespace

Decomposition decompose(const HPolytope& p, const RVector& target, int n,
                        const SolverConfig& cfg) {
    if (n < 1) throw InputError("n must be positive");
    const Index dim = p.ambient_dim();
    if (target.size() != dim) throw InputError("target has wrong dimension");

    if (n == 1) {
        const auto located = minimal_face(p, target);
        if (std::holds_alternative<Outside>(located))
            throw InputError("target outside the polytope");
        Decomposition dec;
        dec.target = target;
        dec.weights = {Rational(1)};
        dec.points = {target};
        dec.faces = {std::get<Face>(located)};
        dec.skeleton_dims = {static_cast<int>(dim)};
        return dec;
    }
    if (dim % n != 0) throw InputError("dim P must be divisible by n");
    const int d = static_cast<int>(dim) / n;

    const auto primes = prime_factors_ascending(n);
    Decomposition dec;
    if (primes.size() == 1) {
        dec = decompose_prime(p, target, n, d, cfg);
    } else {
        if (!p.contains(target)) throw InputError("target outside the polytope");
        dec.target = target;
        for (const RVector& x : decompose_recursive(p, target, primes, cfg)) {
            const auto located = minimal_face(p, x);
            if (!std::holds_alternative<Face>(located))
                throw InternalError("recursive point escaped the polytope");
            dec.points.push_back(x);
            dec.faces.push_back(std::get<Face>(located));
            dec.weights.push_back(Rational(1, n));
            dec.skeleton_dims.push_back(d);
        }
        if (dec.count() != n) throw InternalError("composite recursion miscounted points");
    }

    std::string why;
    if (!validate_decomposition(p, dec, &why))
        throw InternalError("decompose produced an invalid certificate: " + why);
    return dec;
}

MixedSchedule mixed_schedule(int ambient_dim, const std::vector<int>& chain) {
    if (chain.empty()) throw InputError("empty chain");
    MixedSchedule sched;
    Rational weight(1);
    int dim = ambient_dim;
    for (size_t j = 0; j < chain.size(); ++j) {
        const int nj = chain[j];
        if (nj < 2) throw InputError("chain entries must be at least 2");
        if (dim % nj != 0)
            throw InputError("dimension bookkeeping failure: " + std::to_string(dim) +
                             " not divisible by " + std::to_string(nj));
        dim /= nj;
        weight /= nj;
        const int kept = (j + 1 == chain.size()) ? nj : nj - 1;
        for (int i = 0; i < kept; ++i) {
            sched.weights.push_back(weight);
            sched.dims.push_back(dim);
        }
    }
    if (dim < 1) throw InputError("chain exhausts the dimension");
    return sched;
}

Decomposition mixed_decompose(const HPolytope& p, const RVector& target,
                              const std::vector<int>& chain, const SolverConfig& cfg) {
    const MixedSchedule sched = mixed_schedule(static_cast<int>(p.ambient_dim()), chain);
    if (!p.contains(target)) throw InputError("target outside the polytope");

    Decomposition dec;
    dec.target = target;

    // Walk the chain, re-decomposing the last point one level deeper at
    // every stage. Points come back through the chart stack to P's frame.
    std::vector<FaceChart> charts;
    HPolytope current = p;
    RVector current_target = target;

    for (size_t j = 0; j < chain.size(); ++j) {
        const int nj = chain[j];
        const int dj = static_cast<int>(current.ambient_dim()) / nj;
        Decomposition stage = decompose(current, current_target, nj, cfg);
        const bool last_stage = (j + 1 == chain.size());
        const int kept = last_stage ? nj : nj - 1;
        for (int i = 0; i < kept; ++i) {
            RVector x = stage.points[static_cast<size_t>(i)];
            for (auto it = charts.rbegin(); it != charts.rend(); ++it)
                x = it->to_ambient(x);
            dec.points.push_back(std::move(x));
        }
        if (last_stage) break;

        const Face face = lifted_to_dim(current, stage.faces.back(), dj);
        FaceChart chart = embed_face(current, face);
        current_target = chart.to_chart(stage.points.back());
        current = chart.sub;
        charts.push_back(std::move(chart));
    }

    dec.weights = sched.weights;
    dec.skeleton_dims = sched.dims;
    for (const RVector& x : dec.points) {
        const auto located = minimal_face(p, x);
        if (!std::holds_alternative<Face>(located))
            throw InternalError("mixed decomposition point escaped the polytope");
        dec.faces.push_back(std::get<Face>(located));
    }

    std::string why;
    if (!validate_decomposition(p, dec, &why))
        throw InternalError("mixed_decompose produced an invalid certificate: " + why);
    return dec;
}

bool validate_decomposition(const HPolytope& p, const Decomposition& dec,
                            std::string* why) {
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return false;
    };
    const size_t n = dec.points.size();
    if (n == 0) return fail("no points");
    if (dec.weights.size() != n || dec.faces.size() != n || dec.skeleton_dims.size() != n)
        return fail("inconsistent certificate sizes");
    if (dec.target.size() != p.ambient_dim()) return fail("target dimension mismatch");

    Rational weight_sum = 0;
    RVector combo = RVector::Zero(p.ambient_dim());
    for (size_t i = 0; i < n; ++i) {
        if (dec.weights[i] <= 0) return fail("nonpositive weight");
        weight_sum += dec.weights[i];
        combo += dec.weights[i] * dec.points[i];
    }
    if (weight_sum != 1) return fail("weights do not sum to 1");
    if (!(combo == dec.target)) return fail("barycenter identity fails");

    for (size_t i = 0; i < n; ++i) {
        const RVector& x = dec.points[i];
        if (x.size() != p.ambient_dim()) return fail("point dimension mismatch");
        if (!p.contains(x)) return fail("point " + std::to_string(i) + " outside polytope");
        const Face& face = dec.faces[i];
        RMatrix rows_mat(static_cast<Index>(face.tight.size()), p.ambient_dim());
        for (size_t k = 0; k < face.tight.size(); ++k) {
            const int row = face.tight[k];
            if (row < 0 || row >= p.facet_count()) return fail("tight row out of range");
            if (p.a().row(row).dot(x) != p.b()(row))
                return fail("point " + std::to_string(i) + " not on its face");
            rows_mat.row(static_cast<Index>(k)) = p.a().row(row);
        }
        const int true_dim = static_cast<int>(p.ambient_dim() - rank_of(rows_mat));
        if (face.dim != true_dim) return fail("face dimension mislabeled");
        if (face.dim > dec.skeleton_dims[i])
            return fail("face dimension exceeds the declared skeleton dimension");
    }
    return true;
}

} // namespace baryskel
