#include "pwmimo/detectors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pwmimo {

namespace {

constexpr double kDivergenceGuard = 1e6;

void check_frame(const Frame& f, const Constellation& c) {
    const int m = f.channel.tx();
    if (m < 1 || f.channel.rx() < m)
        throw std::invalid_argument("detector: channel must satisfy rx >= tx >= 1");
    if (f.received.size() != f.channel.rx())
        throw std::invalid_argument("detector: received vector length does not match rx");
    if (!(f.channel.sigma2 > 0.0))
        throw std::invalid_argument("detector: sigma2 must be positive");
    if (c.size() < 2 || c.bits_per_symbol < 1)
        throw std::invalid_argument("detector: degenerate constellation");
}

int resolve_iterations(const DetectOptions& o, int fallback) {
    if (o.iterations < 0)
        throw std::invalid_argument("detector: iterations must be >= 1 (or 0 for the default)");
    return o.iterations == 0 ? fallback : o.iterations;
}

/// Fills LLRs and hard decisions from the (already normalized) posteriors.
void finalize(DetectionResult& r, const Constellation& c) {
    r.llrs.clear();
    r.hard_symbols.clear();
    for (const auto& p : r.posteriors) {
        const auto llrs = bit_llrs(p, c);
        r.llrs.insert(r.llrs.end(), llrs.begin(), llrs.end());
        r.hard_symbols.push_back(p.argmax());
    }
}

void fill_op_counts(DetectionResult& r, DetectorId d, const Frame& f, const Constellation& c) {
    if (has_op_count_model(d)) {
        const auto ops = op_count(d, f.channel.tx(), c.bits_per_symbol, r.iterations_run);
        r.op_pre = ops.pre;
        r.op_post = ops.post;
    }
}

Complex posterior_mean(const SymbolPosterior& p, const Constellation& c) {
    Complex mu{0.0, 0.0};
    for (size_t s = 0; s < p.log_probs.size(); ++s)
        mu += std::exp(p.log_probs[s]) * c.points[s];
    return mu;
}

void record_discrete_trace(DetectionResult& r, int iteration,
                           const std::vector<std::vector<double>>& beliefs,
                           const Constellation& c) {
    IterationTrace t;
    t.iteration = iteration;
    for (const auto& b : beliefs) {
        SymbolPosterior p{b};
        p.normalize();
        t.belief_mean.push_back(posterior_mean(p, c));
        t.top_log_prob.push_back(p.log_probs[p.argmax()]);
    }
    r.trace.push_back(std::move(t));
}

void record_gaussian_trace(DetectionResult& r, int iteration,
                           const std::vector<GaussianScalar>& beliefs) {
    IterationTrace t;
    t.iteration = iteration;
    for (const auto& g : beliefs) {
        t.belief_mean.push_back(g.mean);
        t.top_log_prob.push_back(-std::log(g.variance));
    }
    r.trace.push_back(std::move(t));
}

/// Log-domain translation table of an ordered pair: entry [s_from * q + s_to]
/// is log CN(point_to; u + v point_from, u_var) up to the constant
/// -log(pi u_var), which normalization cancels.
std::vector<double> translation_table(const PairStatistics& s, const Constellation& c) {
    const int q = c.size();
    std::vector<double> t(static_cast<size_t>(q) * q);
    const auto tr = translation(s);
    for (int a = 0; a < q; ++a) {
        const Complex mean = tr.u + tr.v * c.points[a];
        for (int b = 0; b < q; ++b)
            t[static_cast<size_t>(a) * q + b] = -std::norm(c.points[b] - mean) / tr.variance;
    }
    return t;
}

void normalize_table(std::vector<double>& t) {
    const double z = log_sum_exp(t);
    for (double& v : t)
        v -= z;
}

struct MapEnumeration {
    const CMat* h = nullptr;
    const std::vector<Complex>* points = nullptr;
    double sigma2 = 1.0;
    std::vector<CVec> residual;               // residual[d]: y - sum_{k<d} h_k x_k
    std::vector<int> chosen;                  // label per antenna along the path
    std::vector<std::vector<LseAccumulator>> acc;  // [antenna][label]

    void run(int depth) {
        const int m = static_cast<int>(h->cols());
        if (depth == m) {
            const double ll = -residual[depth].squaredNorm() / sigma2;
            for (int j = 0; j < m; ++j)
                acc[j][chosen[j]].add(ll);
            return;
        }
        for (size_t s = 0; s < points->size(); ++s) {
            residual[depth + 1].noalias() = residual[depth] - h->col(depth) * (*points)[s];
            chosen[depth] = static_cast<int>(s);
            run(depth + 1);
        }
    }
};

GaussianScalar combine_precision(std::span<const GaussianScalar> gs) {
    double w = 0.0;
    Complex num{0.0, 0.0};
    for (const auto& g : gs) {
        const double p = 1.0 / g.variance;
        w += p;
        num += p * g.mean;
    }
    return {num / w, 1.0 / w};
}

}  // namespace

std::string detector_name(DetectorId d) {
    switch (d) {
        case DetectorId::Map: return "map";
        case DetectorId::Lmmse: return "mmse";
        case DetectorId::Bp1: return "bp1";
        case DetectorId::Bp2: return "bp2";
        case DetectorId::Bp3: return "bp3";
        case DetectorId::Gbp2: return "gbp2";
        case DetectorId::Gbp3: return "gbp3";
    }
    throw std::logic_error("detector_name: bad enum value");
}

DetectorId parse_detector(std::string_view name) {
    if (name == "map" || name == "ml") return DetectorId::Map;
    if (name == "mmse" || name == "lmmse") return DetectorId::Lmmse;
    if (name == "bp1") return DetectorId::Bp1;
    if (name == "bp2") return DetectorId::Bp2;
    if (name == "bp3") return DetectorId::Bp3;
    if (name == "gbp2") return DetectorId::Gbp2;
    if (name == "gbp3") return DetectorId::Gbp3;
    throw std::invalid_argument("unknown detector '" + std::string(name) +
                                "', expected one of: map, mmse, bp1, bp2, bp3, gbp2, gbp3");
}

bool has_op_count_model(DetectorId d) {
    return d == DetectorId::Map || d == DetectorId::Lmmse || d == DetectorId::Bp2 ||
           d == DetectorId::Bp3;
}

OperationCount op_count(DetectorId d, int tx, int bits_per_symbol, int iterations) {
    if (tx < 1 || bits_per_symbol < 1)
        throw std::invalid_argument("op_count: need tx >= 1 and bits_per_symbol >= 1");
    const long long m = tx;
    const long long q = 1LL << bits_per_symbol;    // 2^m alphabet size
    const long long q2 = q * q;                    // 2^(2m)
    const long long nu = iterations;
    switch (d) {
        case DetectorId::Map:
            if (static_cast<long long>(bits_per_symbol) * m > 62)
                throw std::invalid_argument("op_count: 2^(m*M) overflows the count");
            return {0, (1LL << (bits_per_symbol * m)) * (8 * m * m + 9 * m)};
        case DetectorId::Lmmse:
            return {24 * m * m * m + 18 * m * m + 2 * m, 6 * m * q};
        case DetectorId::Bp2:
            if (nu < 1)
                throw std::invalid_argument("op_count: bp2 needs iterations >= 1");
            return {16 * m * m * m * m + 60 * m * m * m + 437 * m * m - 486 * m,
                    (q2 * (2 * nu + 21) + q * nu) * m * (m - 1)};
        case DetectorId::Bp3:
            if (nu < 1)
                throw std::invalid_argument("op_count: bp3 needs iterations >= 1");
            return {56 * m * m * m + 113 * m * m + 914 * m, q2 * (2 * nu + 21) * 2 * m};
        default:
            throw std::invalid_argument("op_count: no complexity model for detector '" +
                                        detector_name(d) + "'");
    }
}

DetectionResult detect_map(const Frame& f, const Constellation& c) {
    check_frame(f, c);
    const int m = f.channel.tx();
    const long long mm = static_cast<long long>(c.bits_per_symbol) * m;
    if (mm > 24)
        throw std::invalid_argument(
            "detect_map: 2^" + std::to_string(mm) + " joint hypotheses exceed the 2^24 "
            "enumeration guard; exhaustive marginalization is exponential in m*M and this "
            "detector is meant as a desk-scale reference");

    MapEnumeration e;
    e.h = &f.channel.h;
    e.points = &c.points;
    e.sigma2 = f.channel.sigma2;
    e.residual.assign(m + 1, CVec(f.channel.rx()));
    e.residual[0] = f.received;
    e.chosen.assign(m, 0);
    e.acc.assign(m, std::vector<LseAccumulator>(c.size()));
    e.run(0);

    DetectionResult r;
    r.posteriors.resize(m);
    for (int j = 0; j < m; ++j) {
        auto& p = r.posteriors[j];
        p.log_probs.resize(c.size());
        for (int s = 0; s < c.size(); ++s)
            p.log_probs[s] = e.acc[j][s].value();
        p.normalize();
    }
    finalize(r, c);
    fill_op_counts(r, DetectorId::Map, f, c);
    return r;
}

DetectionResult detect_lmmse(const Frame& f, const Constellation& c) {
    check_frame(f, c);
    const int m = f.channel.tx();
    const int n = f.channel.rx();
    const CMat k = f.channel.sigma2 * CMat::Identity(n, n) + f.channel.h * f.channel.h.adjoint();
    const HermitianFactor factor(k);
    const CVec z = factor.solve(f.received);

    DetectionResult r;
    r.posteriors.resize(m);
    for (int j = 0; j < m; ++j) {
        const auto h_j = f.channel.h.col(j);
        const Complex x_hat = h_j.dot(z);
        const CVec w = factor.solve(h_j);
        // In exact arithmetic the estimator variance lies in (0, 1); the
        // clamp only guards roundoff at extreme SNR.
        const double mmse = std::clamp(1.0 - h_j.dot(w).real(), 1e-15, 1.0);
        r.posteriors[j] = project_gaussian({x_hat, mmse}, c);
    }
    finalize(r, c);
    fill_op_counts(r, DetectorId::Lmmse, f, c);
    return r;
}

DetectionResult detect_bp1(const Frame& f, const Constellation& c, const DetectOptions& o) {
    check_frame(f, c);
    const int m = f.channel.tx();
    const int n = f.channel.rx();
    const int q = c.size();
    const long long mm = static_cast<long long>(c.bits_per_symbol) * m;
    if (mm > 16)
        throw std::invalid_argument(
            "detect_bp1: each message update marginalizes over 2^" + std::to_string(mm) +
            " joint hypotheses, beyond the 2^16 guard for this reference detector");
    const int iters = resolve_iterations(o, kDefaultBp1Iterations);

    // lambda[j][i]: symbol j -> observation i, table over x_j.
    // pi[i][j]: observation i -> symbol j, table over x_j.
    const std::vector<double> uniform(q, -std::log(static_cast<double>(q)));
    std::vector<std::vector<std::vector<double>>> lambda(
        m, std::vector<std::vector<double>>(n, uniform));
    auto pi = std::vector<std::vector<std::vector<double>>>(
        n, std::vector<std::vector<double>>(m, uniform));

    DetectionResult r;
    std::vector<int> chosen(m, 0);
    std::vector<std::vector<LseAccumulator>> acc;
    for (int it = 0; it < iters; ++it) {
        // Observation-to-symbol updates: marginalize the scalar likelihood of
        // y_i over all symbol combinations, weighting by incoming lambdas.
        for (int i = 0; i < n; ++i) {
            acc.assign(m, std::vector<LseAccumulator>(q));
            // Depth-first over combinations with running partial sums of the
            // signal mean and of the lambda weights.
            auto walk = [&](auto&& self, int depth, Complex mean, double weight) -> void {
                if (depth == m) {
                    const double ll =
                        -std::norm(f.received(i) - mean) / f.channel.sigma2 + weight;
                    for (int j = 0; j < m; ++j)
                        acc[j][chosen[j]].add(ll - lambda[j][i][chosen[j]]);
                    return;
                }
                for (int s = 0; s < q; ++s) {
                    chosen[depth] = s;
                    self(self, depth + 1, mean + f.channel.h(i, depth) * c.points[s],
                         weight + lambda[depth][i][s]);
                }
            };
            walk(walk, 0, Complex{0.0, 0.0}, 0.0);
            for (int j = 0; j < m; ++j) {
                for (int s = 0; s < q; ++s)
                    pi[i][j][s] = acc[j][s].value();
                normalize_table(pi[i][j]);
            }
        }
        // Symbol-to-observation updates: extrinsic products of incoming pi.
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) {
                for (int s = 0; s < q; ++s) {
                    double t = 0.0;
                    for (int k = 0; k < n; ++k)
                        if (k != i)
                            t += pi[k][j][s];
                    lambda[j][i][s] = t;
                }
                normalize_table(lambda[j][i]);
            }
        if (o.record_trace) {
            std::vector<std::vector<double>> beliefs(m, std::vector<double>(q, 0.0));
            for (int j = 0; j < m; ++j)
                for (int s = 0; s < q; ++s)
                    for (int i = 0; i < n; ++i)
                        beliefs[j][s] += pi[i][j][s];
            record_discrete_trace(r, it + 1, beliefs, c);
        }
    }

    r.posteriors.resize(m);
    for (int j = 0; j < m; ++j) {
        auto& p = r.posteriors[j];
        p.log_probs.assign(q, 0.0);
        for (int s = 0; s < q; ++s)
            for (int i = 0; i < n; ++i)
                p.log_probs[s] += pi[i][j][s];
        p.normalize();
    }
    r.iterations_run = iters;
    finalize(r, c);
    return r;
}

namespace {

/// Shared update loop of the fully-connected pair-wise detector, used by both
/// detect_bp2 and the bp2_messages verification hook.
struct Bp2Core {
    int m = 0;
    int q = 0;
    PairTopology topo;
    std::vector<int> edge_of;
    std::vector<std::vector<double>> table;
    std::vector<std::vector<double>> pi;  // current messages, one table per edge

    Bp2Core(const Frame& f, const Constellation& c)
        : m(f.channel.tx()), q(c.size()), topo(PairTopology::fully_connected(m)) {
        const auto stats = compute_pair_statistics(f.channel, f.received, topo);
        const int edges = static_cast<int>(topo.ordered_pairs.size());
        edge_of.assign(static_cast<size_t>(m) * m, -1);
        table.resize(edges);
        for (int e = 0; e < edges; ++e) {
            const auto [i, j] = topo.ordered_pairs[e];
            edge_of[static_cast<size_t>(i) * m + j] = e;
            table[e] = translation_table(stats.at(i, j), c);
        }
        pi.assign(edges, std::vector<double>(q, -std::log(static_cast<double>(q))));
    }

    int edge(int i, int j) const { return edge_of[static_cast<size_t>(i) * m + j]; }

    /// One synchronous (flooding) round: every extrinsic combination reads
    /// the previous round's messages.
    void iterate() {
        std::vector<std::vector<double>> next(pi.size(), std::vector<double>(q));
        std::vector<double> lam(q);
        for (size_t e = 0; e < pi.size(); ++e) {
            const auto [i, j] = topo.ordered_pairs[e];
            lam.assign(q, 0.0);
            for (int k = 0; k < m; ++k)
                if (k != i && k != j) {
                    const auto& t = pi[edge(k, i)];
                    for (int s = 0; s < q; ++s)
                        lam[s] += t[s];
                }
            normalize_table(lam);
            const auto& t = table[e];
            for (int sj = 0; sj < q; ++sj) {
                LseAccumulator a;
                for (int si = 0; si < q; ++si)
                    a.add(t[static_cast<size_t>(si) * q + sj] + lam[si]);
                next[e][sj] = a.value();
            }
            normalize_table(next[e]);
        }
        pi.swap(next);
    }

    std::vector<std::vector<double>> beliefs() const {
        std::vector<std::vector<double>> b(m, std::vector<double>(q, 0.0));
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                if (k != j) {
                    const auto& t = pi[edge(k, j)];
                    for (int s = 0; s < q; ++s)
                        b[j][s] += t[s];
                }
        return b;
    }
};

/// Shared update loop of the ring detector. Messages are indexed by ring
/// position p: fwd[p] travels from order[p] to order[p+1] (a table over the
/// successor's symbol), bwd[p] to order[p-1].
struct Bp3Core {
    int m = 0;
    int q = 0;
    PairTopology topo;
    std::vector<std::vector<double>> tf, tb;
    std::vector<std::vector<double>> fwd, bwd;

    Bp3Core(const Frame& f, const Constellation& c, std::span<const int> permutation)
        : m(f.channel.tx()), q(c.size()), topo(PairTopology::ring(m, permutation)) {
        const auto stats = compute_pair_statistics(f.channel, f.received, topo);
        tf.resize(m);
        tb.resize(m);
        for (int p = 0; p < m; ++p) {
            tf[p] = translation_table(stats.at(topo.order[p], topo.order[(p + 1) % m]), c);
            tb[p] = translation_table(stats.at(topo.order[p], topo.order[(p + m - 1) % m]), c);
        }
        const std::vector<double> uniform(q, -std::log(static_cast<double>(q)));
        fwd.assign(m, uniform);
        bwd.assign(m, uniform);
    }

    /// One iteration: a complete sequential turn in each direction. Each
    /// position consumes the message its neighbour just produced; only the
    /// wrap-around edge reads last turn's value.
    void turn() {
        std::vector<double> scratch(q);
        for (int p = 0; p < m; ++p) {
            const auto& in = fwd[(p + m - 1) % m];
            for (int sj = 0; sj < q; ++sj) {
                LseAccumulator a;
                for (int si = 0; si < q; ++si)
                    a.add(tf[p][static_cast<size_t>(si) * q + sj] + in[si]);
                scratch[sj] = a.value();
            }
            fwd[p] = scratch;
            normalize_table(fwd[p]);
        }
        for (int p = m - 1; p >= 0; --p) {
            const auto& in = bwd[(p + 1) % m];
            for (int sj = 0; sj < q; ++sj) {
                LseAccumulator a;
                for (int si = 0; si < q; ++si)
                    a.add(tb[p][static_cast<size_t>(si) * q + sj] + in[si]);
                scratch[sj] = a.value();
            }
            bwd[p] = scratch;
            normalize_table(bwd[p]);
        }
    }

    std::vector<std::vector<double>> beliefs() const {
        std::vector<std::vector<double>> b(m, std::vector<double>(q));
        for (int p = 0; p < m; ++p) {
            const auto& in_f = fwd[(p + m - 1) % m];
            const auto& in_b = bwd[(p + 1) % m];
            for (int s = 0; s < q; ++s)
                b[topo.order[p]][s] = in_f[s] + in_b[s];
        }
        return b;
    }
};

}  // namespace

DetectionResult detect_bp2(const Frame& f, const Constellation& c, const DetectOptions& o) {
    check_frame(f, c);
    if (f.channel.tx() < 2)
        throw std::invalid_argument("detect_bp2: pair-wise detection needs tx >= 2");
    const int iters = resolve_iterations(o, kDefaultBp2Iterations);

    Bp2Core core(f, c);
    DetectionResult r;
    for (int it = 0; it < iters; ++it) {
        core.iterate();
        if (o.record_trace)
            record_discrete_trace(r, it + 1, core.beliefs(), c);
    }

    auto beliefs = core.beliefs();
    r.posteriors.resize(core.m);
    for (int j = 0; j < core.m; ++j) {
        r.posteriors[j].log_probs = std::move(beliefs[j]);
        r.posteriors[j].normalize();
    }
    r.iterations_run = iters;
    finalize(r, c);
    fill_op_counts(r, DetectorId::Bp2, f, c);
    return r;
}

Bp2Messages bp2_messages(const Frame& f, const Constellation& c, int iterations) {
    check_frame(f, c);
    if (f.channel.tx() < 2)
        throw std::invalid_argument("bp2_messages: pair-wise detection needs tx >= 2");
    if (iterations < 0)
        throw std::invalid_argument("bp2_messages: iterations must be >= 0");
    Bp2Core core(f, c);
    for (int it = 0; it < iterations; ++it)
        core.iterate();
    return {core.topo.ordered_pairs, std::move(core.pi)};
}

DetectionResult detect_bp3(const Frame& f, const Constellation& c, const DetectOptions& o) {
    check_frame(f, c);
    const int iters = resolve_iterations(o, kDefaultBp3Iterations);

    Bp3Core core(f, c, o.permutation);
    DetectionResult r;
    for (int it = 0; it < iters; ++it) {
        core.turn();
        if (o.record_trace)
            record_discrete_trace(r, it + 1, core.beliefs(), c);
    }

    auto beliefs = core.beliefs();
    r.posteriors.resize(core.m);
    for (int j = 0; j < core.m; ++j) {
        r.posteriors[j].log_probs = std::move(beliefs[j]);
        r.posteriors[j].normalize();
    }
    r.iterations_run = iters;
    finalize(r, c);
    fill_op_counts(r, DetectorId::Bp3, f, c);
    return r;
}

Bp3Messages bp3_messages(const Frame& f, const Constellation& c, int iterations,
                         std::span<const int> permutation) {
    check_frame(f, c);
    if (iterations < 0)
        throw std::invalid_argument("bp3_messages: iterations must be >= 0");
    Bp3Core core(f, c, permutation);
    for (int it = 0; it < iterations; ++it)
        core.turn();
    return {core.topo.order, std::move(core.fwd), std::move(core.bwd)};
}

DetectionResult detect_gbp2(const Frame& f, const Constellation& c, const DetectOptions& o) {
    check_frame(f, c);
    const int m = f.channel.tx();
    if (m < 2)
        throw std::invalid_argument("detect_gbp2: pair-wise detection needs tx >= 2");
    if (!(o.initial_variance > 0.0))
        throw std::invalid_argument("detect_gbp2: initial variance must be positive");
    const int iters = resolve_iterations(o, kDefaultGaussianIterations);

    const auto topo = PairTopology::fully_connected(m);
    const auto stats = compute_pair_statistics(f.channel, f.received, topo);
    const int edges = static_cast<int>(topo.ordered_pairs.size());
    std::vector<int> edge_of(static_cast<size_t>(m) * m, -1);
    for (int e = 0; e < edges; ++e) {
        const auto [i, j] = topo.ordered_pairs[e];
        edge_of[static_cast<size_t>(i) * m + j] = e;
    }

    std::vector<GaussianScalar> msg_old(edges, {o.initial_mean, o.initial_variance});
    std::vector<GaussianScalar> msg_new(edges);

    DetectionResult r;
    auto beliefs_from = [&](const std::vector<GaussianScalar>& msg) {
        std::vector<GaussianScalar> beliefs(m);
        std::vector<GaussianScalar> in;
        for (int j = 0; j < m; ++j) {
            in.clear();
            for (int k = 0; k < m; ++k)
                if (k != j)
                    in.push_back(msg[edge_of[static_cast<size_t>(k) * m + j]]);
            beliefs[j] = combine_precision(in);
        }
        return beliefs;
    };

    int ran = 0;
    for (int it = 0; it < iters && !r.diverged; ++it) {
        for (int e = 0; e < edges; ++e) {
            const auto [i, j] = topo.ordered_pairs[e];
            // Extrinsic precision-weighted combination at node i; with no
            // third node (m == 2) it degenerates to the unit-power prior.
            GaussianScalar lam{Complex{0.0, 0.0}, 1.0};
            if (m > 2) {
                double w = 0.0;
                Complex num{0.0, 0.0};
                for (int k = 0; k < m; ++k)
                    if (k != i && k != j) {
                        const auto& g = msg_old[edge_of[static_cast<size_t>(k) * m + i]];
                        w += 1.0 / g.variance;
                        num += g.mean / g.variance;
                    }
                lam = {num / w, 1.0 / w};
            }
            const auto& s = stats.at(i, j);
            msg_new[e] = {s.u + s.v * lam.mean, s.u_var + s.v_var * lam.variance};
        }
        msg_old.swap(msg_new);
        ran = it + 1;
        for (const auto& g : msg_old)
            if (std::abs(g.mean) > kDivergenceGuard)
                r.diverged = true;
        if (o.record_trace)
            record_gaussian_trace(r, ran, beliefs_from(msg_old));
    }

    const auto beliefs = beliefs_from(msg_old);
    r.posteriors.resize(m);
    for (int j = 0; j < m; ++j)
        r.posteriors[j] = project_gaussian(beliefs[j], c);
    r.iterations_run = ran;
    finalize(r, c);
    return r;
}

DetectionResult detect_gbp3(const Frame& f, const Constellation& c, const DetectOptions& o) {
    check_frame(f, c);
    const int m = f.channel.tx();
    if (!(o.initial_variance > 0.0))
        throw std::invalid_argument("detect_gbp3: initial variance must be positive");
    const int iters = resolve_iterations(o, kDefaultGaussianIterations);

    const auto topo = PairTopology::ring(m, o.permutation);
    const auto stats = compute_pair_statistics(f.channel, f.received, topo);
    const auto ops = forward_backward_operators(stats, topo);

    // Message moments by ring position, same orientation convention as bp3.
    std::vector<Complex> mu_f(m, o.initial_mean), mu_b(m, o.initial_mean);
    std::vector<double> var_f(m, o.initial_variance), var_b(m, o.initial_variance);

    DetectionResult r;
    auto beliefs_now = [&] {
        std::vector<GaussianScalar> beliefs(m);
        for (int p = 0; p < m; ++p) {
            const int prev = (p + m - 1) % m;
            const int next = (p + 1) % m;
            const GaussianScalar in[2] = {{mu_f[prev], var_f[prev]}, {mu_b[next], var_b[next]}};
            beliefs[topo.order[p]] = combine_precision(in);
        }
        return beliefs;
    };

    for (int it = 0; it < iters; ++it) {
        for (int p = 0; p < m; ++p) {
            const int prev = (p + m - 1) % m;
            mu_f[p] = ops.forward[p](mu_f[prev]);
            var_f[p] = ops.forward_var[p](var_f[prev]);
        }
        for (int p = m - 1; p >= 0; --p) {
            const int next = (p + 1) % m;
            mu_b[p] = ops.backward[p](mu_b[next]);
            var_b[p] = ops.backward_var[p](var_b[next]);
        }
        if (o.record_trace)
            record_gaussian_trace(r, it + 1, beliefs_now());
    }

    const auto beliefs = beliefs_now();
    r.posteriors.resize(m);
    for (int j = 0; j < m; ++j)
        r.posteriors[j] = project_gaussian(beliefs[j], c);
    r.iterations_run = iters;
    finalize(r, c);
    return r;
}

DetectionResult detect(DetectorId d, const Frame& f, const Constellation& c,
                       const DetectOptions& o) {
    switch (d) {
        case DetectorId::Map: return detect_map(f, c);
        case DetectorId::Lmmse: return detect_lmmse(f, c);
        case DetectorId::Bp1: return detect_bp1(f, c, o);
        case DetectorId::Bp2: return detect_bp2(f, c, o);
        case DetectorId::Bp3: return detect_bp3(f, c, o);
        case DetectorId::Gbp2: return detect_gbp2(f, c, o);
        case DetectorId::Gbp3: return detect_gbp3(f, c, o);
    }
    throw std::logic_error("detect: bad enum value");
}

}  // namespace pwmimo
