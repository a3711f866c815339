#include "baryskel/verify.hpp"
#include "baryskel/errors.hpp"
#include "baryskel/generator.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <future>
#include <random>

namespace baryskel {

namespace {

using ordered_json = nlohmann::ordered_json;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Ordered parallel map: results come back in input order regardless of
// scheduling, so reports are deterministic.
template <typename Out, typename Fn>
std::vector<Out> ordered_map(std::size_t count, int threads, Fn&& fn) {
    std::vector<Out> results(count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    const std::size_t chunk = static_cast<std::size_t>(threads) * 2;
    for (std::size_t begin = 0; begin < count; begin += chunk) {
        const std::size_t end = std::min(count, begin + chunk);
        std::vector<std::future<Out>> futures;
        for (std::size_t i = begin; i < end; ++i)
            futures.push_back(std::async(std::launch::async, [&fn, i] { return fn(i); }));
        for (std::size_t i = begin; i < end; ++i) results[i] = futures[i - begin].get();
    }
    return results;
}

} // namespace

std::string VerificationReport::to_json(bool include_timing) const {
    ordered_json out;
    out["instance"] = instance;
    out["directions"] = directions;
    out["samples"] = {{"attempted", samples_attempted}, {"succeeded", samples_succeeded}};
    out["verified"] = verified;
    if (counterexample) out["counterexample"] = to_strings(*counterexample);
    else out["counterexample"] = nullptr;
    ordered_json certs = ordered_json::array();
    for (const auto& cert : certificates) {
        ordered_json c;
        ordered_json tuple = ordered_json::array();
        for (const auto& tight : cert.tuple_tight) tuple.push_back(tight);
        c["tuple_tight"] = tuple;
        c["farkas"] = {{"ineq", to_strings(cert.farkas.ineq_coeffs)},
                       {"eq", to_strings(cert.farkas.eq_coeffs)},
                       {"gap", to_string(cert.farkas.gap)}};
        certs.push_back(std::move(c));
    }
    out["certificates"] = std::move(certs);
    if (include_timing) out["elapsed_seconds"] = elapsed_seconds;
    return out.dump(2);
}

VerificationReport verify_minkowski(const HPolytope& p, int n, int d,
                                    std::uint64_t seed, int samples, int threads) {
    if (p.ambient_dim() != static_cast<Index>(n) * d)
        throw InputError("dimension mismatch: dim P must equal n*d");
    Stopwatch watch;
    VerificationReport report;
    report.instance = "minkowski identity, n=" + std::to_string(n) +
                      ", d=" + std::to_string(d);
    report.directions = {"subset", "superset"};

    const auto d_faces = skeleton(p, d);

    // subset: sums of n skeleton points always land in nP (convexity); a
    // failure would be a soundness bug, so it throws instead of reporting.
    const auto subset_ok = ordered_map<bool>(
        static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
            std::mt19937_64 rng(seed * 1000003ULL + s);
            RVector sum = RVector::Zero(p.ambient_dim());
            for (int i = 0; i < n; ++i) {
                const auto& face = d_faces[rng() % d_faces.size()];
                sum += sample_point_in_face(p, face, rng());
            }
            for (Index k = 0; k < p.facet_count(); ++k)
                if (p.a().row(k).dot(sum) > Rational(n) * p.b()(k)) return false;
            return true;
        });
    for (bool ok : subset_ok) {
        ++report.samples_attempted;
        if (!ok)
            throw InternalError("a sum of skeleton points escaped nP; convexity "
                                "violated (soundness bug)");
        ++report.samples_succeeded;
    }

    // superset: every sampled point of nP splits into n skeleton points.
    const auto superset_ok = ordered_map<bool>(
        static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
            std::mt19937_64 rng(seed * 2000003ULL + s);
            RVector x;
            if (s % 5 == 4) {
                // occasional boundary target: a sample of a random facet
                const auto& lattice = p.lattice();
                const auto& facets =
                    lattice.faces_of_dim(static_cast<int>(p.ambient_dim()) - 1);
                const Face facet = lattice.face(facets[rng() % facets.size()]);
                x = sample_point_in_face(p, facet, rng());
            } else {
                x = sample_interior_point(p, rng());
            }
            const Decomposition dec = decompose(p, x, n);
            RVector sum = RVector::Zero(p.ambient_dim());
            for (const auto& pt : dec.points) sum += pt;
            return sum == Rational(n) * x;
        });
    for (bool ok : superset_ok) {
        ++report.samples_attempted;
        if (ok) ++report.samples_succeeded;
    }

    report.verified = report.samples_succeeded == report.samples_attempted;
    report.elapsed_seconds = watch.seconds();
    return report;
}

HPolytope triangular_prism() {
    RMatrix a(5, 3);
    a << -1, 0, 0, 0, -1, 0, 1, 1, 0, 0, 0, 1, 0, 0, -1;
    RVector b(5);
    b << 0, 0, 1, 1, 0;
    return HPolytope::from_inequalities(a, b);
}

HPolytope standard_simplex(Index dim) {
    RMatrix a(dim + 1, dim);
    a.setZero();
    for (Index i = 0; i < dim; ++i) a(i, i) = -1;
    a.row(dim).setConstant(Rational(1));
    RVector b = RVector::Zero(dim + 1);
    b(dim) = 1;
    return HPolytope::from_inequalities(a, b);
}

namespace {

// Interior dyadic grid points of a polytope given by sign constraints
// x_i >= 0 and a simplex-style cap, enumerated coarse-to-fine. Supplies
// candidate counterexample points in a deterministic canonical order.
template <typename Emit>
void dyadic_scan(const HPolytope& p, int max_level, const Emit& emit) {
    for (int level = 1; level <= max_level; ++level) {
        const int den = 1 << level;
        const Index dim = p.ambient_dim();
        std::vector<int> counters(static_cast<size_t>(dim), 1);
        while (true) {
            bool coarser = true; // skip points already visited at lower levels
            for (int c : counters)
                if (c % 2 != 0) coarser = false;
            if (!coarser) {
                RVector x(dim);
                for (Index j = 0; j < dim; ++j)
                    x(j) = Rational(counters[static_cast<size_t>(j)], den);
                if (p.violated_row(x) < 0 && p.tight_rows(x).empty())
                    if (emit(x)) return;
            }
            Index j = 0;
            while (j < dim) {
                if (++counters[static_cast<size_t>(j)] < den) break;
                counters[static_cast<size_t>(j)] = 1;
                ++j;
            }
            if (j == dim) break;
        }
    }
}

struct TupleSet {
    std::vector<std::vector<Face>> tuples; // canonical order
};

// All admissible tuples for the weighted prism: unordered pair of edges
// for the two equal weights, times an edge for the heavy slot.
TupleSet prism_tuples(const std::vector<Face>& edges) {
    TupleSet ts;
    for (size_t i = 0; i < edges.size(); ++i)
        for (size_t j = i; j < edges.size(); ++j)
            for (size_t k = 0; k < edges.size(); ++k)
                ts.tuples.push_back({edges[i], edges[j], edges[k]});
    return ts;
}

} // namespace

VerificationReport falsify_weighted_prism(const Rational& eps, int threads) {
    if (eps <= 0)
        throw InputError("eps must be positive: eps = 0 is the theorem case, "
                         "which has no counterexample");
    Stopwatch watch;
    const HPolytope prism = triangular_prism();
    const auto edges = skeleton(prism, 1);
    if (edges.size() != 9) throw InternalError("prism must have 9 edges");

    const Rational total = Rational(3) + eps;
    const std::vector<Rational> weights = {Rational(1) / total, Rational(1) / total,
                                           (Rational(1) + eps) / total};
    const TupleSet ts = prism_tuples(edges);

    VerificationReport report;
    report.instance = "triangular prism, 1-skeleton, weights (1,1,1+eps)/(3+eps), eps=" +
                      to_string(eps);
    report.directions = {"weighted decomposition existence"};

    std::vector<size_t> order(ts.tuples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::optional<RVector> found;
    dyadic_scan(prism, 5, [&](const RVector& candidate) {
        ++report.samples_attempted;
        bool any_feasible = false;
        for (size_t pos = 0; pos < order.size(); ++pos) {
            const size_t idx = order[pos];
            if (std::holds_alternative<Decomposition>(
                    tuple_feasible(prism, ts.tuples[idx], weights, candidate))) {
                any_feasible = true;
                // Move-to-front: nearby grid points tend to reuse tuples.
                std::rotate(order.begin(), order.begin() + static_cast<long>(pos),
                            order.begin() + static_cast<long>(pos) + 1);
                break;
            }
        }
        if (any_feasible) {
            ++report.samples_succeeded;
            return false;
        }
        found = candidate;
        return true;
    });

    if (!found)
        throw InternalError("no weighted-prism counterexample found on the dyadic "
                            "grid up to level 5");

    // Exhaustive certificates, in canonical tuple order.
    const auto certs = ordered_map<TupleCertificate>(
        ts.tuples.size(), threads, [&](std::size_t i) {
            auto res = tuple_feasible(prism, ts.tuples[i], weights, *found);
            if (!std::holds_alternative<TupleInfeasible>(res))
                throw InternalError("counterexample point has a feasible tuple on "
                                    "the certification pass");
            TupleCertificate cert;
            for (const auto& face : ts.tuples[i]) cert.tuple_tight.push_back(face.tight);
            cert.farkas = std::get<TupleInfeasible>(std::move(res)).farkas;
            return cert;
        });

    if (prism.violated_row(*found) >= 0)
        throw InternalError("counterexample point left the prism");

    VerificationReport out = std::move(report);
    out.counterexample = *found;
    out.certificates = certs;
    out.verified = false; // the generalization is falsified, by design
    out.elapsed_seconds = watch.seconds();
    return out;
}

VerificationReport falsify_mixed_skeleton_simplex(int a, int b, int d,
                                                  std::uint64_t seed, int samples,
                                                  int threads) {
    if (d < 1) throw InputError("d must be at least 1");
    if (a > b) throw InputError("require a <= b");
    if (a < 0 || b > 2 * d + 1 || a + b != 2 * d + 1)
        throw InputError("require 0 <= a <= b <= 2d+1 with a + b = 2d + 1");

    Stopwatch watch;
    const HPolytope simplex = standard_simplex(2 * d + 1);
    const auto a_faces = skeleton(simplex, a);
    const auto b_faces = skeleton(simplex, b);
    const std::vector<Rational> weights = {Rational(1, 2), Rational(1, 2)};

    VerificationReport report;
    report.instance = "simplex dim " + std::to_string(2 * d + 1) + ", skeleton pair (" +
                      std::to_string(a) + ", " + std::to_string(b) + ")";

    auto any_pair_feasible = [&](const RVector& target) {
        for (const auto& fa : a_faces)
            for (const auto& fb : b_faces)
                if (std::holds_alternative<Decomposition>(
                        tuple_feasible(simplex, {fa, fb}, weights, target)))
                    return true;
        return false;
    };

    if (a == d && b == d + 1) {
        report.directions = {"mixed-skeleton feasibility (the valid (d, d+1) pair)"};
        const auto ok = ordered_map<bool>(
            static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
                std::mt19937_64 rng(seed * 3000017ULL + s);
                const RVector target = sample_interior_point(simplex, rng());
                return any_pair_feasible(target);
            });
        for (bool good : ok) {
            ++report.samples_attempted;
            if (good) ++report.samples_succeeded;
        }
        report.verified = report.samples_attempted == report.samples_succeeded;
        report.elapsed_seconds = watch.seconds();
        return report;
    }

    report.directions = {"mixed-skeleton counterexample search"};
    std::optional<RVector> found;

    // The centroid is the classic counterexample for (0, 2d+1); try it first.
    RVector centroid = simplex.interior_point();
    ++report.samples_attempted;
    if (!any_pair_feasible(centroid)) {
        found = centroid;
    } else {
        ++report.samples_succeeded;
        dyadic_scan(simplex, 4, [&](const RVector& candidate) {
            ++report.samples_attempted;
            if (any_pair_feasible(candidate)) {
                ++report.samples_succeeded;
                return false;
            }
            found = candidate;
            return true;
        });
    }
    if (!found)
        throw InternalError("no mixed-skeleton counterexample found; the pair (" +
                            std::to_string(a) + "," + std::to_string(b) +
                            ") may be the valid one");

    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t i = 0; i < a_faces.size(); ++i)
        for (size_t j = 0; j < b_faces.size(); ++j) pairs.emplace_back(i, j);
    const auto certs = ordered_map<TupleCertificate>(
        pairs.size(), threads, [&](std::size_t k) {
            const auto& [i, j] = pairs[k];
            auto res = tuple_feasible(simplex, {a_faces[i], b_faces[j]}, weights, *found);
            if (!std::holds_alternative<TupleInfeasible>(res))
                throw InternalError("counterexample point has a feasible pair on the "
                                    "certification pass");
            TupleCertificate cert;
            cert.tuple_tight = {a_faces[i].tight, b_faces[j].tight};
            cert.farkas = std::get<TupleInfeasible>(std::move(res)).farkas;
            return cert;
        });

    report.counterexample = *found;
    report.certificates = certs;
    report.verified = false;
    report.elapsed_seconds = watch.seconds();
    return report;
}

} // namespace baryskel
