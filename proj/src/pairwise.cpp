#include "pwmimo/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pwmimo {

namespace {

void require_ring(const PairTopology& topo, const char* who) {
    if (topo.kind != PairTopology::Kind::Ring)
        throw std::invalid_argument(std::string(who) + ": topology must be a ring");
}

double rel_gap(Complex a, Complex b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TranslationFunction translation(const PairStatistics& s) {
    return {s.u, s.v, s.u_var};
}

PairTopology PairTopology::fully_connected(int nodes) {
    if (nodes < 2)
        throw std::invalid_argument("fully_connected: need at least 2 nodes, got " +
                                    std::to_string(nodes));
    PairTopology t;
    t.kind = Kind::FullyConnected;
    t.nodes = nodes;
    t.order.resize(nodes);
    std::iota(t.order.begin(), t.order.end(), 0);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j)
            if (i != j)
                t.ordered_pairs.emplace_back(i, j);
    return t;
}

PairTopology PairTopology::ring(int nodes, std::span<const int> permutation) {
    if (nodes < 3)
        throw std::invalid_argument(
            "ring: need at least 3 nodes (with 2 the ring degenerates; "
            "use the fully-connected topology), got " + std::to_string(nodes));
    PairTopology t;
    t.kind = Kind::Ring;
    t.nodes = nodes;
    if (permutation.empty()) {
        t.order.resize(nodes);
        std::iota(t.order.begin(), t.order.end(), 0);
    } else {
        if (static_cast<int>(permutation.size()) != nodes)
            throw std::invalid_argument("ring: permutation length " +
                                        std::to_string(permutation.size()) +
                                        " does not match node count " + std::to_string(nodes));
        std::vector<bool> seen(nodes, false);
        for (int p : permutation) {
            if (p < 0 || p >= nodes || seen[p])
                throw std::invalid_argument("ring: order is not a permutation of 0.." +
                                            std::to_string(nodes - 1));
            seen[p] = true;
        }
        t.order.assign(permutation.begin(), permutation.end());
    }
    for (int p = 0; p < nodes; ++p) {
        const int node = t.order[p];
        t.ordered_pairs.emplace_back(node, t.order[(p + 1) % nodes]);
        t.ordered_pairs.emplace_back(node, t.order[(p + nodes - 1) % nodes]);
    }
    return t;
}

int PairTopology::position_of(int node) const {
    auto it = std::find(order.begin(), order.end(), node);
    if (it == order.end())
        throw std::invalid_argument("position_of: node " + std::to_string(node) +
                                    " is not in the topology");
    return static_cast<int>(it - order.begin());
}

PairStatsTable::PairStatsTable(int nodes, std::vector<PairStatistics> stats)
    : nodes_(nodes), stats_(std::move(stats)), slot_(static_cast<size_t>(nodes) * nodes, -1) {
    for (size_t k = 0; k < stats_.size(); ++k) {
        const auto& s = stats_[k];
        if (s.from < 0 || s.from >= nodes_ || s.to < 0 || s.to >= nodes_ || s.from == s.to)
            throw std::invalid_argument("PairStatsTable: pair indices out of range");
        slot_[static_cast<size_t>(s.from) * nodes_ + s.to] = static_cast<int>(k);
    }
}

bool PairStatsTable::contains(int from, int to) const {
    if (from < 0 || from >= nodes_ || to < 0 || to >= nodes_)
        return false;
    return slot_[static_cast<size_t>(from) * nodes_ + to] >= 0;
}

const PairStatistics& PairStatsTable::at(int from, int to) const {
    if (!contains(from, to))
        throw std::invalid_argument("PairStatsTable: no statistics for pair (" +
                                    std::to_string(from) + " -> " + std::to_string(to) + ")");
    return stats_[slot_[static_cast<size_t>(from) * nodes_ + to]];
}

PairStatsTable compute_pair_statistics(const ChannelRealization& ch, const CVec& y,
                                       const PairTopology& topo) {
    const int m = ch.tx();
    const int n = ch.rx();
    if (topo.nodes != m)
        throw std::invalid_argument("compute_pair_statistics: topology has " +
                                    std::to_string(topo.nodes) + " nodes, channel has " +
                                    std::to_string(m) + " tx antennas");
    if (y.size() != n)
        throw std::invalid_argument("compute_pair_statistics: observation length mismatch");
    if (!(ch.sigma2 > 0.0))
        throw std::invalid_argument("compute_pair_statistics: sigma2 must be positive");

    // All exclusion matrices are rank-one downdates of the full covariance.
    const CMat k_full = ch.sigma2 * CMat::Identity(n, n) + ch.h * ch.h.adjoint();

    // The two solve routes agree to 1e-9 on well-conditioned problems; when
    // sigma2 is tiny the exclusion matrices have condition number near
    // ||H||^2/sigma2 and rounding amplification up to eps * kappa is normal.
    const double kappa_bound = 1.0 + ch.h.squaredNorm() / ch.sigma2;
    const double route_tol =
        std::max(1e-9, 32.0 * std::numeric_limits<double>::epsilon() * kappa_bound);

    // Single-exclusion solves, one factorization per node: z[i] = K_i^{-1} y
    // and g[i].col(j) = K_i^{-1} h_j. These feed the matrix-inversion-lemma
    // route below and are exactly the operator coefficients u, v.
    std::vector<CVec> z(m);
    std::vector<CMat> g(m);
    for (int i = 0; i < m; ++i) {
        const CMat k_i = k_full - ch.h.col(i) * ch.h.col(i).adjoint();
        HermitianFactor f(k_i);
        z[i] = f.solve(y);
        g[i].resize(n, m);
        for (int j = 0; j < m; ++j)
            g[i].col(j) = f.solve(ch.h.col(j));
    }

    // Pair-exclusion factorizations are shared by both orientations of a pair.
    std::vector<PairStatistics> out;
    out.reserve(topo.ordered_pairs.size());
    for (auto [i, j] : topo.ordered_pairs) {
        const CMat k_ij = k_full - ch.h.col(i) * ch.h.col(i).adjoint() -
                          ch.h.col(j) * ch.h.col(j).adjoint();
        const CVec c = hermitian_solve(k_ij, ch.h.col(j));

        PairStatistics s;
        s.from = i;
        s.to = j;
        s.y_prime = c.dot(y);
        s.a_cross = c.dot(ch.h.col(i));
        s.a_self = c.dot(ch.h.col(j)).real();
        if (!(s.a_self > 0.0))
            throw std::runtime_error("compute_pair_statistics: non-positive residual "
                                     "signal-to-noise for pair (" + std::to_string(i) + " -> " +
                                     std::to_string(j) + ")");
        const double denom = 1.0 + s.a_self;
        s.u = s.y_prime / denom;
        s.v = -s.a_cross / denom;
        s.u_var = 1.0 / denom;
        s.v_var = std::norm(s.v);

        // Independent route via the single-exclusion matrix: with
        // g = K_i^{-1} h_j and beta = h_j^H g, the lemma gives
        // K_ij^{-1} h_j = g / (1 - beta), and directly u = h_j^H K_i^{-1} y,
        // v = -h_j^H K_i^{-1} h_i.
        const Complex u_alt = ch.h.col(j).dot(z[i]);
        const Complex v_alt = -ch.h.col(j).dot(g[i].col(i));
        const double beta = ch.h.col(j).dot(g[i].col(j)).real();
        const double a_self_alt = beta / (1.0 - beta);
        if (rel_gap(s.u, u_alt) > route_tol || rel_gap(s.v, v_alt) > route_tol ||
            rel_gap(s.a_self, a_self_alt) > route_tol)
            throw std::runtime_error(
                "compute_pair_statistics: direct and inversion-lemma routes disagree for pair (" +
                std::to_string(i) + " -> " + std::to_string(j) +
                "); matrices too ill-conditioned to trust");
        out.push_back(s);
    }
    return {m, std::move(out)};
}

RingOperators forward_backward_operators(const PairStatsTable& stats, const PairTopology& ring) {
    require_ring(ring, "forward_backward_operators");
    RingOperators ops;
    ops.order = ring.order;
    const int m = ring.nodes;
    ops.forward.resize(m);
    ops.backward.resize(m);
    ops.forward_var.resize(m);
    ops.backward_var.resize(m);
    for (int p = 0; p < m; ++p) {
        const auto& fwd = stats.at(ring.order[p], ring.order[(p + 1) % m]);
        const auto& bwd = stats.at(ring.order[p], ring.order[(p + m - 1) % m]);
        ops.forward[p] = {fwd.u, fwd.v};
        ops.forward_var[p] = {fwd.u_var, fwd.v_var};
        ops.backward[p] = {bwd.u, bwd.v};
        ops.backward_var[p] = {bwd.u_var, bwd.v_var};
    }
    return ops;
}

AffineOp collective_forward(const RingOperators& ops, int start) {
    const int m = ops.size();
    if (start < 0 || start >= m)
        throw std::invalid_argument("collective_forward: start position out of range");
    AffineOp acc{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    for (int t = 0; t < m; ++t) {
        const AffineOp& op = ops.forward[(start + t) % m];
        acc.offset = op.offset + op.slope * acc.offset;
        acc.slope = op.slope * acc.slope;
    }
    return acc;
}

AffineOp collective_backward(const RingOperators& ops, int start) {
    const int m = ops.size();
    if (start < 0 || start >= m)
        throw std::invalid_argument("collective_backward: start position out of range");
    AffineOp acc{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    for (int t = 0; t < m; ++t) {
        const AffineOp& op = ops.backward[(start - t % m + m) % m];
        acc.offset = op.offset + op.slope * acc.offset;
        acc.slope = op.slope * acc.slope;
    }
    return acc;
}

double forward_slope_bound(const PairStatsTable& stats, const PairTopology& ring) {
    require_ring(ring, "forward_slope_bound");
    double b = 1.0;
    for (int p = 0; p < ring.nodes; ++p) {
        const double a = stats.at(ring.order[p], ring.order[(p + 1) % ring.nodes]).a_self;
        b *= a / (1.0 + a);
    }
    return b;
}

double backward_slope_bound(const PairStatsTable& stats, const PairTopology& ring) {
    require_ring(ring, "backward_slope_bound");
    double b = 1.0;
    for (int p = 0; p < ring.nodes; ++p) {
        const double a = stats.at(ring.order[p], ring.order[(p + ring.nodes - 1) % ring.nodes]).a_self;
        b *= a / (1.0 + a);
    }
    return b;
}

}  // namespace pwmimo
