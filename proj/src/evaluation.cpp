#include "baycausal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

namespace baycausal {

EdgeScore score_confusion(const EdgeConfusion& c) {
  EdgeScore s;
  s.confusion = c;
  s.tpr = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 1.0;
  s.fdr = c.tp + c.fp > 0 ? static_cast<double>(c.fp) / (c.tp + c.fp) : 0.0;
  const double denom = static_cast<double>(c.tp + c.fp) * (c.tp + c.fn) *
                       (c.tn + c.fp) * (c.tn + c.fn);
  s.mcc = denom > 0.0
              ? (static_cast<double>(c.tp) * c.tn - static_cast<double>(c.fp) * c.fn) /
                    std::sqrt(denom)
              : 0.0;
  s.exact = c.fp == 0 && c.fn == 0;
  return s;
}

EdgeScore score_graph(const Support& estimate, const Support& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      truth.rows() != truth.cols()) {
    throw DimensionError("estimate and truth must be square and of equal size");
  }
  EdgeConfusion c;
  for (Eigen::Index q = 0; q < truth.rows(); ++q) {
    for (Eigen::Index k = 0; k < truth.cols(); ++k) {
      if (q == k) continue;
      const bool e = estimate(q, k), t = truth(q, k);
      if (e && t) ++c.tp;
      else if (e) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return score_confusion(c);
}

bool l_support_matches(const Support& estimate, const Support& truth) {
  if (estimate.rows() != truth.rows()) {
    throw DimensionError("loading supports differ in row count");
  }
  auto nonempty = [](const Support& s) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index p = 0; p < s.cols(); ++p)
      if (s.col(p).any()) out.push_back(p);
    return out;
  };
  const auto est = nonempty(estimate), tru = nonempty(truth);
  if (est.size() != tru.size()) return false;
  struct Pair {
    long overlap;
    std::size_t e, t;
  };
  std::vector<Pair> pairs;
  for (std::size_t e = 0; e < est.size(); ++e)
    for (std::size_t t = 0; t < tru.size(); ++t)
      pairs.push_back({(estimate.col(est[e]) && truth.col(tru[t])).count(), e, t});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.overlap > b.overlap; });
  std::vector<bool> e_used(est.size(), false), t_used(tru.size(), false);
  for (const Pair& p : pairs) {
    if (e_used[p.e] || t_used[p.t]) continue;
    e_used[p.e] = t_used[p.t] = true;
    if ((estimate.col(est[p.e]) != truth.col(tru[p.t])).any()) return false;
  }
  return true;
}

void aggregate(RecoveryReport& r) {
  r.completed = 0;
  r.csr = 0;
  r.mean_tpr = r.mean_fdr = r.mean_mcc = 0.0;
  r.per_edge_confusion = {};
  r.l_match_count = 0;
  r.modal_p_star_counts.clear();
  r.A_bias = Matrix::Zero(r.A_truth.rows(), r.A_truth.cols());
  r.A_mse = Matrix::Zero(r.A_truth.rows(), r.A_truth.cols());
  for (const ReplicateResult& rep : r.replicates) {
    if (!rep.ok) continue;
    ++r.completed;
    r.csr += rep.score.exact ? 1 : 0;
    r.mean_tpr += rep.score.tpr;
    r.mean_fdr += rep.score.fdr;
    r.mean_mcc += rep.score.mcc;
    r.per_edge_confusion.tp += rep.score.confusion.tp;
    r.per_edge_confusion.fp += rep.score.confusion.fp;
    r.per_edge_confusion.tn += rep.score.confusion.tn;
    r.per_edge_confusion.fn += rep.score.confusion.fn;
    r.l_match_count += rep.l_match ? 1 : 0;
    const auto k = static_cast<std::size_t>(rep.modal_p_star);
    if (r.modal_p_star_counts.size() <= k) r.modal_p_star_counts.resize(k + 1, 0);
    ++r.modal_p_star_counts[k];
    const Matrix err = rep.A_estimate - r.A_truth;
    r.A_bias += err;
    r.A_mse += err.cwiseAbs2();
  }
  if (r.completed > 0) {
    const double m = r.completed;
    r.mean_tpr /= m;
    r.mean_fdr /= m;
    r.mean_mcc /= m;
    r.A_bias /= m;
    r.A_mse /= m;
  }
  r.pooled = score_confusion(r.per_edge_confusion);
}

RecoveryReport run_replicates(const ReplicateConfig& cfg) {
  validate_parameters(cfg.truth);
  cfg.chain.validate();
  RecoveryReport report;
  report.scenario = cfg.scenario;
  report.n = cfg.n;
  report.A_truth = cfg.truth.A;
  report.replicates.resize(static_cast<std::size_t>(std::max(0, cfg.replicates)));
  const GroundTruthGraph truth = ground_truth_of(cfg.truth);

#pragma omp parallel for schedule(dynamic) if (cfg.replicates > 1)
  for (int r = 0; r < cfg.replicates; ++r) {
    ReplicateResult& out = report.replicates[static_cast<std::size_t>(r)];
    out.index = r;
    out.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), 0});
    try {
      Rng data_rng(out.seed);
      const SimulatedData sim =
          generate_data(cfg.truth, cfg.n, covariates::StandardNormal{}, data_rng);
      ChainConfig chain = cfg.chain;
      chain.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), 1});
      const std::vector<ChainResult> chains =
          run_chains(sim.data, cfg.hyper, chain, cfg.moves, cfg.options);
      const PosteriorSummary summary = summarize(chains);
      const GraphEstimate graph = extract_graph(summary, cfg.threshold);
      out.score = score_graph(graph.b_edges, truth.b_support);
      out.modal_p_star = summary.modal_p_star;
      out.l_match = l_support_matches(graph.l_edges, truth.l_support);
      out.A_estimate = summary.mean_A_marginal;
      out.b_edges = graph.b_edges;
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  }
  aggregate(report);
  return report;
}

std::string format_table(const RecoveryReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "scenario  n      runs  CSR  TPR   FDR   MCC\n";
  os << r.scenario;
  for (std::size_t i = r.scenario.size(); i < 10; ++i) os << ' ';
  os << r.n;
  for (std::size_t i = std::to_string(r.n).size(); i < 7; ++i) os << ' ';
  os << r.completed;
  for (std::size_t i = std::to_string(r.completed).size(); i < 6; ++i) os << ' ';
  os << r.csr;
  for (std::size_t i = std::to_string(r.csr).size(); i < 5; ++i) os << ' ';
  os << r.mean_tpr << "  " << r.mean_fdr << "  " << r.mean_mcc << "\n";
  return os.str();
}

std::vector<StableSolution> admissible_stable_permutations(const Matrix& W,
                                                           double tol) {
  if (W.rows() != W.cols()) throw DimensionError("W must be square");
  if (W.rows() > 8) {
    throw DimensionError("permutation enumeration is limited to Q <= 8");
  }
  const Eigen::Index Q = W.rows();
  std::vector<int> perm(static_cast<std::size_t>(Q));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<StableSolution> out;
  do {
    bool admissible = true;
    for (Eigen::Index i = 0; i < Q && admissible; ++i)
      admissible = std::abs(W(perm[static_cast<std::size_t>(i)], i)) > tol;
    if (!admissible) continue;
    Matrix Wn(Q, Q);
    for (Eigen::Index i = 0; i < Q; ++i) {
      const int row = perm[static_cast<std::size_t>(i)];
      Wn.row(i) = W.row(row) / W(row, i);
    }
    Matrix B = Matrix::Identity(Q, Q) - Wn;
    B.diagonal().setZero();
    if (spectral_radius(B) < 1.0) out.push_back({perm, B});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Matrix random_disjoint_cycle_graph(int Q, Rng& rng, int max_cycle,
                                   double edge_prob) {
  if (Q < 1) throw ValidationError("Q must be positive");
  std::vector<int> order(static_cast<std::size_t>(Q));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  auto weight = [&rng] {
    const double mag = 0.3 + 0.6 * rng.uniform();
    return rng.uniform() < 0.5 ? -mag : mag;
  };

  // Consecutive groups of the shuffled order; each group of size >= 2 is a
  // simple cycle, groups are then joined in a topological order.
  std::vector<std::vector<int>> groups;
  for (std::size_t i = 0; i < order.size();) {
    const auto left = static_cast<int>(order.size() - i);
    const int size = 1 + static_cast<int>(rng.uniform() * std::min(max_cycle, left));
    groups.emplace_back(order.begin() + static_cast<long>(i),
                        order.begin() + static_cast<long>(i) + size);
    i += static_cast<std::size_t>(size);
  }
  Matrix B = Matrix::Zero(Q, Q);
  for (const auto& g : groups) {
    if (g.size() < 2) continue;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const int from = g[j], to = g[(j + 1) % g.size()];
      B(to, from) = weight();
    }
  }
  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t b = a + 1; b < groups.size(); ++b)
      for (int from : groups[a])
        for (int to : groups[b])
          if (rng.uniform() < edge_prob) B(to, from) = weight();
  return B;
}

}  // namespace baycausal
