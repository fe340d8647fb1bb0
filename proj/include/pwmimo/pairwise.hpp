#pragma once

#include "pwmimo/channel.hpp"
#include "pwmimo/numerics.hpp"

#include <span>
#include <utility>
#include <vector>

namespace pwmimo {

/// Statistics of the ordered pair (from = i, to = j), extracted from the
/// channel by nulling every other antenna into the noise covariance
///   K = sigma2 I + sum_{k != i,j} h_k h_k^H.
/// With c = K^{-1} h_j:
///   y_prime  = c^H y           (pair-filtered observation for x_j given x_i)
///   a_cross  = h_j^H K^{-1} h_i
///   a_self   = h_j^H K^{-1} h_j   (real positive; residual signal-to-noise)
/// and the affine/translation coefficients derived from them:
///   u = y_prime / (1 + a_self)      v = -a_cross / (1 + a_self)
///   u_var = 1 / (1 + a_self)        v_var = |v|^2
/// so the conditional of x_j given x_i = s is CN(u + v s, u_var).
struct PairStatistics {
    int from = -1;
    int to = -1;
    Complex y_prime{};
    Complex a_cross{};
    double a_self = 0.0;
    Complex u{};
    Complex v{};
    double u_var = 0.0;
    double v_var = 0.0;
};

/// The Gaussian conditional density of x_to given x_from under a pair's
/// statistics: at(s) = CN(u + v s, u_var).
struct TranslationFunction {
    Complex u{};
    Complex v{};
    double variance = 0.0;

    GaussianScalar at(Complex x_from) const { return {u + v * x_from, variance}; }
};

TranslationFunction translation(const PairStatistics& s);

/// Which ordered pairs participate in message passing.
///
/// FullyConnected enumerates all M(M-1) ordered pairs. Ring visits the nodes
/// in a cyclic order (optionally permuted) and keeps only the 2M pairs between
/// cyclic neighbours; it requires M >= 3, since with two nodes the "left" and
/// "right" neighbour coincide and the ring degenerates to the fully-connected
/// graph, which should be used instead.
struct PairTopology {
    enum class Kind { FullyConnected, Ring };

    Kind kind = Kind::FullyConnected;
    int nodes = 0;
    std::vector<std::pair<int, int>> ordered_pairs;
    std::vector<int> order;  // ring visiting order; identity for fully connected

    static PairTopology fully_connected(int nodes);
    static PairTopology ring(int nodes, std::span<const int> permutation = {});

    /// Position of node in the ring visiting order.
    int position_of(int node) const;
};

/// Pair statistics for every ordered pair of a topology, indexed by (from, to).
class PairStatsTable {
  public:
    PairStatsTable(int nodes, std::vector<PairStatistics> stats);

    const PairStatistics& at(int from, int to) const;
    bool contains(int from, int to) const;
    const std::vector<PairStatistics>& all() const { return stats_; }
    int nodes() const { return nodes_; }

  private:
    int nodes_ = 0;
    std::vector<PairStatistics> stats_;
    std::vector<int> slot_;  // (from * nodes + to) -> index into stats_, or -1
};

/// Computes the statistics of every ordered pair in the topology.
///
/// Each pair is evaluated through two independent routes: a direct solve
/// against the pair's own exclusion matrix K_{ij}, and a rank-one
/// matrix-inversion-lemma update of the single-exclusion matrix K_i. The two
/// must agree to 1e-9 relative; disagreement means the matrices are too
/// ill-conditioned to trust and raises std::runtime_error.
PairStatsTable compute_pair_statistics(const ChannelRealization& ch, const CVec& y,
                                       const PairTopology& topo);

/// Affine recursion step mu -> offset + slope * mu, the form every ring
/// message update takes for means (complex) and variances (real).
struct AffineOp {
    Complex offset{};
    Complex slope{};
    Complex operator()(Complex mu) const { return offset + slope * mu; }
};

struct RealAffineOp {
    double offset = 0.0;
    double slope = 0.0;
    double operator()(double var) const { return offset + slope * var; }
};

/// The per-node forward and backward recursion operators of a ring.
/// Indexing is by ring position p (not node id): forward[p] maps the mean of
/// the message arriving at position p into the mean leaving towards p+1, and
/// backward[p] likewise towards p-1. *_var are the matching variance ops.
struct RingOperators {
    std::vector<int> order;
    std::vector<AffineOp> forward;
    std::vector<AffineOp> backward;
    std::vector<RealAffineOp> forward_var;
    std::vector<RealAffineOp> backward_var;

    int size() const { return static_cast<int>(order.size()); }
};

RingOperators forward_backward_operators(const PairStatsTable& stats, const PairTopology& ring);

/// Composition of one complete turn around the ring starting at position
/// start: the forward collective operator applies forward[start] first, then
/// forward[start+1], ..., finishing with forward[start-1]; the backward one
/// applies backward[start] first, then backward[start-1], and so on. The
/// slope of the result is the ring's contraction factor.
AffineOp collective_forward(const RingOperators& ops, int start);
AffineOp collective_backward(const RingOperators& ops, int start);

/// Upper bound on the magnitude of the collective slope: the product over
/// the ring of a_self / (1 + a_self) for the forward (resp. backward)
/// neighbour pairs. Always < 1.
double forward_slope_bound(const PairStatsTable& stats, const PairTopology& ring);
double backward_slope_bound(const PairStatsTable& stats, const PairTopology& ring);

}  // namespace pwmimo
