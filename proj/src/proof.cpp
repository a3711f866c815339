#include "baryskel/proof.hpp"
#include "baryskel/errors.hpp"
#include "baryskel/linalg.hpp"
#include "baryskel/lp.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <random>

namespace baryskel {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void emit(TraceLog* trace, ordered_json record) {
    if (trace) trace->push_back(record.dump());
}

ordered_json tight_sets_json(const FaceLabel& label) {
    ordered_json arr = ordered_json::array();
    for (const auto& t : label.tight) arr.push_back(t);
    return arr;
}

} // namespace

std::vector<RVector> QComplex::columns(const RVector& u) const {
    std::vector<RVector> cols;
    RVector sum = RVector::Zero(base_dim);
    for (int c = 0; c + 1 < n; ++c) {
        RVector x = u.segment(static_cast<Index>(c) * base_dim, base_dim);
        sum += x;
        cols.push_back(std::move(x));
    }
    cols.push_back(-sum);
    return cols;
}

QComplex build_q(const HPolytope& p_centered, int n) {
    if (n < 2) throw InputError("n must be at least 2");
    const Index dim = p_centered.ambient_dim();
    if (dim % n != 0) throw InputError("dim P must be divisible by n");
    for (Index i = 0; i < p_centered.b().size(); ++i)
        if (p_centered.b()(i) <= 0)
            throw InputError("origin must be interior (boundary targets go through "
                             "the interior-sequence path)");

    QComplex qc;
    qc.n = n;
    qc.base_dim = dim;
    qc.base = p_centered.scale_rows_to_one();

    const Index f = qc.base.facet_count();
    const Index udim = static_cast<Index>(n - 1) * dim;
    RMatrix product(static_cast<Index>(n) * f, udim);
    product.setZero();
    for (int c = 0; c < n; ++c) {
        for (Index k = 0; k < f; ++k) {
            const Index row = static_cast<Index>(c) * f + k;
            if (c + 1 < n) {
                product.block(row, static_cast<Index>(c) * dim, 1, dim) = qc.base.a().row(k);
            } else {
                for (int cc = 0; cc + 1 < n; ++cc)
                    product.block(row, static_cast<Index>(cc) * dim, 1, dim) =
                        -qc.base.a().row(k);
            }
        }
    }
    HPolytope::BuildOptions opts;
    opts.skip_boundedness_check = true; // a product of bounded sets cut by a subspace
    qc.q = HPolytope::from_inequalities(
        product, RVector::Constant(static_cast<Index>(n) * f, Rational(1)), opts);

    const auto& lattice = qc.q.lattice();
    qc.labels.resize(static_cast<size_t>(lattice.face_count()));
    qc.phi.at_face.resize(static_cast<size_t>(lattice.face_count()));
    bool generic = true;
    for (int id = 0; id < lattice.face_count(); ++id) {
        const Face& face = lattice.face(id);
        const auto cols = qc.columns(face.sample);
        FaceLabel label;
        int dim_sum = 0;
        for (int c = 0; c < n; ++c) {
            const auto tight = qc.base.tight_rows(cols[static_cast<size_t>(c)]);
            RMatrix rows_mat(static_cast<Index>(tight.size()), dim);
            for (size_t i = 0; i < tight.size(); ++i)
                rows_mat.row(static_cast<Index>(i)) = qc.base.a().row(tight[i]);
            const int edim = static_cast<int>(dim - rank_of(rows_mat));
            label.tight.push_back(tight);
            label.dims.push_back(edim);
            dim_sum += edim;
        }
        RVector phi(n);
        for (int c = 0; c < n; ++c)
            phi(c) = Rational(label.dims[static_cast<size_t>(c)]) -
                     Rational(dim_sum, n);
        if (face.dim != dim_sum - static_cast<int>(dim)) generic = false;
        qc.labels[static_cast<size_t>(id)] = std::move(label);
        qc.phi.at_face[static_cast<size_t>(id)] = std::move(phi);
    }
    qc.generic = generic;
    return qc;
}

GenericityReport check_genericity(const QComplex& qc) {
    GenericityReport report;
    const auto& lattice = qc.q.lattice();
    for (int id = 0; id < lattice.face_count(); ++id) {
        const FaceLabel& label = qc.labels[static_cast<size_t>(id)];
        int dim_sum = 0;
        for (int d : label.dims) dim_sum += d;
        const int expected = dim_sum - static_cast<int>(qc.base_dim);
        if (lattice.face(id).dim != expected)
            report.violations.push_back({id, lattice.face(id).dim, expected});
    }
    report.generic = report.violations.empty();
    if (report.generic != qc.generic)
        throw InternalError("genericity flag disagrees with the exhaustive check");
    return report;
}

std::optional<HPolytope> perturb(const HPolytope& p, std::uint64_t seed,
                                 const Rational& magnitude) {
    for (Index i = 0; i < p.b().size(); ++i)
        if (p.b()(i) <= 0) throw InputError("perturb requires the origin interior");
    if (magnitude < 0) throw InputError("negative perturbation magnitude");
    const HPolytope unit = p.scale_rows_to_one();
    if (magnitude == 0) return unit;

    std::mt19937_64 rng(seed);
    RMatrix a = unit.a();
    const std::int64_t half = std::int64_t{1} << 31;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            const std::int64_t v =
                static_cast<std::int64_t>(rng() % (2 * static_cast<std::uint64_t>(half) + 1)) -
                half;
            a(i, j) += magnitude * Rational(v, half);
        }
    }
    try {
        HPolytope out = HPolytope::from_inequalities(
            a, RVector::Constant(a.rows(), Rational(1)));
        if (out.facet_count() != unit.facet_count()) return std::nullopt;
        return out;
    } catch (const InputError&) {
        return std::nullopt; // unbounded draw: retry with a smaller magnitude
    }
}

namespace {

// All flags F_0 < ... < F_{n-1} with dim F_k = k, in canonical id order.
// Any zero of phi on the subdivision of the (n-1)-skeleton lies in the
// closure of such a flag's simplex.
void enumerate_flags(const FaceLattice& lattice, int depth_wanted,
                     std::vector<int>& current,
                     const std::function<bool(const std::vector<int>&)>& visit,
                     bool& stop) {
    if (stop) return;
    const int k = static_cast<int>(current.size());
    if (k == depth_wanted) {
        if (visit(current)) stop = true;
        return;
    }
    if (k == 0) {
        for (int id : lattice.faces_of_dim(0)) {
            current.push_back(id);
            enumerate_flags(lattice, depth_wanted, current, visit, stop);
            current.pop_back();
            if (stop) return;
        }
    } else {
        for (int id : lattice.faces_above(current.back())) {
            current.push_back(id);
            enumerate_flags(lattice, depth_wanted, current, visit, stop);
            current.pop_back();
            if (stop) return;
        }
    }
}

} // namespace

PhiZero find_phi_zero(const QComplex& qc) {
    if (!qc.generic)
        throw InputError("refusing to search a non-generic Q; perturb first");
    const auto& lattice = qc.q.lattice();
    const int n = qc.n;

    std::optional<PhiZero> found;
    auto try_chain = [&](const std::vector<int>& chain) {
        LinearSystem sys(n);
        for (int i = 0; i < n; ++i) {
            RVector row(n);
            for (int k = 0; k < n; ++k)
                row(k) = qc.phi.at_face[static_cast<size_t>(chain[static_cast<size_t>(k)])](i);
            sys.add_eq(std::move(row), Rational(0));
        }
        sys.add_eq(RVector::Constant(n, Rational(1)), Rational(1));
        for (int k = 0; k < n; ++k) {
            RVector row = RVector::Zero(n);
            row(k) = -1;
            sys.add_ineq(std::move(row), Rational(0));
        }
        const auto result = lp_feasible(sys);
        if (!is_feasible(result)) return false;
        const RVector& t = std::get<Feasible>(result).witness;
        PhiZero zero;
        zero.chain.face_ids = chain;
        for (int k = 0; k < n; ++k) zero.chain.t.push_back(t(k));
        RVector z = RVector::Zero(qc.q.ambient_dim());
        for (int k = 0; k < n; ++k)
            z += t(k) * lattice.face(chain[static_cast<size_t>(k)]).sample;
        zero.z = std::move(z);
        found = std::move(zero);
        return true;
    };

    std::vector<int> current;
    bool stop = false;
    enumerate_flags(lattice, n, current, try_chain, stop);
    if (!found)
        throw InternalError("no zero of phi on the (n-1)-skeleton; this contradicts "
                            "the guaranteed existence of one");
    return *found;
}

int descend_to_vertex(const QComplex& qc, const Chain& chain) {
    if (!qc.generic) throw InputError("descent requires a generic Q");
    const auto& lattice = qc.q.lattice();
    const int n = qc.n;
    if (static_cast<int>(chain.face_ids.size()) != n)
        throw InputError("chain must have one face per dimension 0..n-1");

    for (int k = 0; k < n; ++k) {
        if (lattice.face(chain.face_ids[static_cast<size_t>(k)]).dim != k)
            throw InternalError("chain face dimensions are not 0..n-1");
        if (k > 0 && !lattice.contains(chain.face_ids[static_cast<size_t>(k)],
                                       chain.face_ids[static_cast<size_t>(k - 1)]))
            throw InternalError("chain faces are not nested");
        if (chain.t[static_cast<size_t>(k)] < 0)
            throw InternalError("negative barycentric coordinate");
    }
    Rational t_sum = 0;
    for (const auto& t : chain.t) t_sum += t;
    if (t_sum != 1) throw InternalError("barycentric coordinates do not sum to 1");

    // Step indices: exactly one column's face dimension grows by 1 per level.
    std::vector<bool> grew(static_cast<size_t>(n), false);
    for (int k = 1; k < n; ++k) {
        const FaceLabel& lo = qc.labels[static_cast<size_t>(chain.face_ids[static_cast<size_t>(k - 1)])];
        const FaceLabel& hi = qc.labels[static_cast<size_t>(chain.face_ids[static_cast<size_t>(k)])];
        int increments = 0;
        for (int c = 0; c < n; ++c) {
            const int lo_dim = lo.dims[static_cast<size_t>(c)];
            const int hi_dim = hi.dims[static_cast<size_t>(c)];
            // Nested faces of Q have column-wise nested labels.
            for (int row : hi.tight[static_cast<size_t>(c)]) {
                const auto& lo_tight = lo.tight[static_cast<size_t>(c)];
                if (std::find(lo_tight.begin(), lo_tight.end(), row) == lo_tight.end())
                    throw InternalError("chain labels are not column-wise nested");
            }
            if (hi_dim == lo_dim + 1) {
                ++increments;
                grew[static_cast<size_t>(c)] = true;
            } else if (hi_dim != lo_dim) {
                throw InternalError("column dimension changed by more than one");
            }
        }
        if (increments != 1)
            throw InternalError("generic chain must grow exactly one column per level");
    }
    int j = -1;
    for (int c = 0; c < n; ++c) {
        if (!grew[static_cast<size_t>(c)]) { j = c; break; }
    }
    if (j < 0) throw InternalError("no constant column in the chain");

    // phi_j walks down by exactly 1/n per level of the chain.
    const Rational phi_j0 =
        qc.phi.at_face[static_cast<size_t>(chain.face_ids[0])](j);
    for (int k = 0; k < n; ++k) {
        const Rational expect = phi_j0 - Rational(k, n);
        if (qc.phi.at_face[static_cast<size_t>(chain.face_ids[static_cast<size_t>(k)])](j) != expect)
            throw InternalError("phi_j does not descend by 1/n along the chain");
    }

    Rational r = 0;
    for (int k = 1; k < n; ++k) r += chain.t[static_cast<size_t>(k)] * Rational(k, n);
    if (phi_j0 != r)
        throw InternalError("zero condition violated: phi_j(q_0) != r");
    if (denominator(r) != 1)
        throw InternalError("r is not an integer, contradicting integrality of phi_j(q_0)");
    if (r != 0) throw InternalError("r is a nonzero integer in [0, 1)");
    for (int k = 1; k < n; ++k)
        if (chain.t[static_cast<size_t>(k)] != 0)
            throw InternalError("r = 0 forces t_k = 0 for k >= 1");
    if (chain.t[0] != 1) throw InternalError("t_0 must be 1");

    const int vertex = chain.face_ids[0];
    const int d = qc.skeleton_target_dim();
    for (int c = 0; c < n; ++c)
        if (qc.labels[static_cast<size_t>(vertex)].dims[static_cast<size_t>(c)] != d)
            throw InternalError("descended vertex label is not all d-dimensional");
    return vertex;
}

EquivarianceReport check_equivariance(const QComplex& qc) {
    EquivarianceReport report;
    const auto& lattice = qc.q.lattice();
    const int n = qc.n;
    const Index dim = qc.base_dim;

    for (int id = 0; id < lattice.face_count(); ++id) {
        const auto cols = qc.columns(lattice.face(id).sample);
        // Shift columns left: new column c is old column c+1 (mod n).
        RVector shifted(static_cast<Index>(n - 1) * dim);
        for (int c = 0; c + 1 < n; ++c)
            shifted.segment(static_cast<Index>(c) * dim, dim) =
                cols[static_cast<size_t>(c + 1)];

        const auto tight = qc.q.tight_rows(shifted);
        const int image = lattice.find_by_tight_set(tight);
        if (image < 0) {
            report.pass = false;
            report.failures.push_back("face " + std::to_string(id) +
                                      ": shifted sample is not in a face");
            continue;
        }
        const FaceLabel& src = qc.labels[static_cast<size_t>(id)];
        const FaceLabel& dst = qc.labels[static_cast<size_t>(image)];
        for (int c = 0; c < n; ++c) {
            const int from = (c + 1) % n;
            if (dst.tight[static_cast<size_t>(c)] != src.tight[static_cast<size_t>(from)] ||
                dst.dims[static_cast<size_t>(c)] != src.dims[static_cast<size_t>(from)]) {
                report.pass = false;
                report.failures.push_back("face " + std::to_string(id) +
                                          ": label does not shift with the action");
                break;
            }
            if (qc.phi.at_face[static_cast<size_t>(image)](c) !=
                qc.phi.at_face[static_cast<size_t>(id)](from)) {
                report.pass = false;
                report.failures.push_back("face " + std::to_string(id) +
                                          ": phi does not shift with the action");
                break;
            }
        }
    }
    return report;
}

namespace {

struct ProofCoreResult {
    std::vector<std::vector<int>> tight_per_column; // faces of the run polytope
    std::vector<RVector> points;                    // exact columns of the zero vertex
};

// Runs the generic-case argument on one (possibly perturbed) polytope.
ProofCoreResult run_core(const QComplex& qc, TraceLog* trace) {
    const PhiZero zero = find_phi_zero(qc);
    {
        ordered_json rec;
        rec["stage"] = "chain";
        rec["faces"] = zero.chain.face_ids;
        ordered_json ts = ordered_json::array();
        for (const auto& t : zero.chain.t) ts.push_back(to_string(t));
        rec["t"] = ts;
        emit(trace, rec);
    }
    const int vertex = descend_to_vertex(qc, zero.chain);
    {
        ordered_json rec;
        rec["stage"] = "descent";
        rec["vertex"] = vertex;
        rec["t"] = "(1,0,...,0)";
        rec["label_dims"] = qc.labels[static_cast<size_t>(vertex)].dims;
        emit(trace, rec);
    }
    ProofCoreResult out;
    out.tight_per_column = qc.labels[static_cast<size_t>(vertex)].tight;
    out.points = qc.columns(qc.q.lattice().face(vertex).sample);
    return out;
}

// The face of `poly` consisting of the points where all rows in `tight`
// are tight; nullopt when that set is empty or exceeds the dimension cap.
std::optional<Face> face_from_tight_rows(const HPolytope& poly,
                                         const std::vector<int>& tight, int max_dim) {
    const auto& lattice = poly.lattice();
    std::vector<int> verts;
    for (size_t v = 0; v < poly.vertices().size(); ++v) {
        bool all_tight = true;
        for (int row : tight) {
            if (poly.a().row(row).dot(poly.vertices()[v]) != poly.b()(row)) {
                all_tight = false;
                break;
            }
        }
        if (all_tight) verts.push_back(static_cast<int>(v));
    }
    if (verts.empty()) return std::nullopt;
    const int id = lattice.find_by_vertex_set(verts);
    if (id < 0) return std::nullopt;
    const Face& face = lattice.face(id);
    if (face.dim > max_dim) return std::nullopt;
    return face;
}

} // namespace

Decomposition decompose_via_proof(const HPolytope& p, const RVector& target, int n,
                                  std::uint64_t seed, TraceLog* trace) {
    if (n < 2) throw InputError("n must be a prime at least 2");
    for (int q = 2; q * q <= n; ++q)
        if (n % q == 0) throw InputError("n must be prime; use decompose for composite n");
    const Index dim = p.ambient_dim();
    if (dim % n != 0) throw InputError("dim P must equal n*d");
    const int d = static_cast<int>(dim) / n;

    const auto located = minimal_face(p, target);
    if (std::holds_alternative<Outside>(located))
        throw InputError("target outside the polytope");

    // Boundary targets: an interior sequence toward the target; the face
    // tuple found for a nearby interior point is re-certified exactly at
    // the boundary target itself.
    if (!std::get<Face>(located).tight.empty()) {
        const RVector center = p.interior_point();
        for (int step = 1; step <= 20; ++step) {
            RVector nearby =
                target + Rational(1, std::int64_t{1} << step) * (center - target);
            ordered_json rec;
            rec["stage"] = "boundary-approach";
            rec["step"] = step;
            emit(trace, rec);
            const Decomposition inner = decompose_via_proof(p, nearby, n,
                                                            mix_seed(seed, 7919 + step),
                                                            trace);
            auto res = tuple_feasible(p, inner.faces, target);
            if (std::holds_alternative<Decomposition>(res)) {
                Decomposition dec = std::get<Decomposition>(std::move(res));
                dec.skeleton_dims.assign(static_cast<size_t>(n), d);
                std::string why;
                if (!validate_decomposition(p, dec, &why))
                    throw InternalError("boundary re-certification invalid: " + why);
                emit(trace, ordered_json{{"stage", "boundary-certified"}, {"step", step}});
                return dec;
            }
        }
        throw InternalError("interior sequence failed to re-certify at the boundary "
                            "target within 20 steps");
    }

    const PaperForm norm = normalize_to_paper_form(p, target);
    emit(trace, ordered_json{{"stage", "normalize"}, {"boundary", false}});

    auto finish = [&](const ProofCoreResult& core, bool perturbed) -> Decomposition {
        Decomposition dec;
        dec.target = target;
        if (!perturbed) {
            // The zero vertex's columns are the points, exactly.
            for (const RVector& x : core.points) {
                const RVector point = x + target;
                const auto mf = minimal_face(p, point);
                if (!std::holds_alternative<Face>(mf))
                    throw InternalError("proof point escaped the polytope");
                dec.points.push_back(point);
                dec.faces.push_back(std::get<Face>(mf));
                dec.weights.push_back(Rational(1, n));
                dec.skeleton_dims.push_back(d);
            }
        } else {
            // Perturbed run: map the label's tight rows back to faces of the
            // unperturbed polytope and re-certify the tuple exactly.
            std::vector<Face> tuple;
            for (const auto& tight : core.tight_per_column) {
                const auto face = face_from_tight_rows(norm.polytope, tight, d);
                if (!face)
                    throw InputError("degenerate limit tuple"); // caught by retry loop
                tuple.push_back(*face);
            }
            auto res = tuple_feasible(norm.polytope, tuple, RVector::Zero(dim));
            if (std::holds_alternative<TupleInfeasible>(res))
                throw InputError("limit tuple infeasible"); // caught by retry loop
            const Decomposition local = std::get<Decomposition>(std::move(res));
            for (int i = 0; i < local.count(); ++i) {
                const RVector point = local.points[static_cast<size_t>(i)] + target;
                const auto mf = minimal_face(p, point);
                if (!std::holds_alternative<Face>(mf))
                    throw InternalError("re-certified point escaped the polytope");
                dec.points.push_back(point);
                dec.faces.push_back(std::get<Face>(mf));
                dec.weights.push_back(Rational(1, n));
                dec.skeleton_dims.push_back(d);
            }
        }
        std::string why;
        if (!validate_decomposition(p, dec, &why))
            throw InternalError("proof pipeline produced an invalid certificate: " + why);
        {
            ordered_json rec;
            rec["stage"] = "certificate";
            ordered_json pts = ordered_json::array();
            for (const auto& pt : dec.points) pts.push_back(to_strings(pt));
            rec["points"] = pts;
            emit(trace, rec);
        }
        return dec;
    };

    // Unperturbed attempt first.
    {
        const QComplex qc = build_q(norm.polytope, n);
        const auto report = check_genericity(qc);
        emit(trace, ordered_json{{"stage", "genericity"},
                                 {"magnitude", "0"},
                                 {"generic", report.generic},
                                 {"violations", report.violations.size()}});
        if (report.generic) {
            const auto core = run_core(qc, trace);
            return finish(core, false);
        }
    }

    Rational magnitude(1, 1024);
    for (int attempt = 0; attempt < 20; ++attempt, magnitude /= 2) {
        const auto perturbed = perturb(norm.polytope, mix_seed(seed, attempt), magnitude);
        if (!perturbed) {
            emit(trace, ordered_json{{"stage", "perturb"},
                                     {"magnitude", to_string(magnitude)},
                                     {"result", "unbounded; halving"}});
            continue;
        }
        const QComplex qc = build_q(*perturbed, n);
        const auto report = check_genericity(qc);
        emit(trace, ordered_json{{"stage", "genericity"},
                                 {"magnitude", to_string(magnitude)},
                                 {"generic", report.generic},
                                 {"violations", report.violations.size()}});
        if (!report.generic) continue;
        try {
            const auto core = run_core(qc, trace);
            return finish(core, true);
        } catch (const InputError&) {
            emit(trace, ordered_json{{"stage", "limit"},
                                     {"magnitude", to_string(magnitude)},
                                     {"result", "degenerate; halving"}});
            continue; // degenerate limit tuple: halve and retry
        }
    }
    throw InternalError("perturbation retries exhausted without a generic instance "
                        "certifying the target");
}

} // namespace baryskel
