#include "baycausal/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

namespace baycausal {

void ChainConfig::validate() const {
  if (iterations < 0) throw ValidationError("iterations must be non-negative");
  if (burn_in < 0) throw ValidationError("burn-in must be non-negative");
  if (burn_in > iterations) {
    throw ValidationError("burn-in must not exceed the number of iterations");
  }
  if (thin < 1) throw ValidationError("thin must be at least 1");
  if (chains < 1) throw ValidationError("chains must be at least 1");
}

Sample snapshot(const SamplerState& s, double log_joint, int iteration) {
  Sample out;
  out.iteration = iteration;
  out.B = s.params.B;
  out.A = s.params.A;
  out.L = s.params.L;
  out.mu = s.params.mu;
  out.sigma2 = s.params.sigma2;
  out.gamma_beta = (s.gamma_beta.array() == 1.0).cast<int>();
  out.gamma_beta.diagonal().setZero();
  out.gamma_alpha = (s.gamma_alpha.array() == 1.0).cast<int>();
  out.delta = s.delta;
  out.pivots = s.pivots;
  out.p_star = s.p_star();
  out.kappa = s.kappa;
  out.log_joint = log_joint;
  return out;
}

std::map<std::string, double> AcceptanceStats::rates() const {
  auto rate = [](long acc, long prop) {
    return prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop)
                    : std::nan("");
  };
  return {
      {"B", rate(b_accepted, b_proposed)},
      {"a1_a2", rate(a_accepted, a_proposed)},
      {"pivot_shift", rate(pivots.shift_accepted, pivots.shift_proposed)},
      {"pivot_switch", rate(pivots.switch_accepted, pivots.switch_proposed)},
      {"pivot_add_delete",
       rate(pivots.add_delete_accepted, pivots.add_delete_proposed)},
      {"split", rate(split_accepted, split_proposed)},
      {"merge", rate(merge_accepted, merge_proposed)},
  };
}

void sweep(SamplerState& s, const Dataset& data, const Hyperparameters& h,
           const MoveConfig& moves, const SamplerOptions& options,
           BTuning& tuning, Rng& rng, AcceptanceStats& stats) {
  update_mu(s, data, h, rng);
  update_A_block(s, data, h, rng);
  const long before_p = tuning.total_proposed, before_a = tuning.total_accepted;
  update_B_block(s, data, h, options, tuning, rng);
  stats.b_proposed += tuning.total_proposed - before_p;
  stats.b_accepted += tuning.total_accepted - before_a;
  update_L_rows(s, data, h, rng);
  update_delta(s, data, h, rng);
  update_pivots(s, moves, rng, &stats.pivots);
  update_kappa(s, h, rng);
  update_zeta(s, rng);
  stats.a_proposed += 2;
  stats.a_accepted += update_a1_a2(s, h, options, rng);
  const DimensionMoveResult dim = update_dimension(s, h, moves, rng);
  if (dim.move == DimensionMove::split) {
    ++stats.split_proposed;
    stats.split_accepted += dim.accepted ? 1 : 0;
  } else if (dim.move == DimensionMove::merge) {
    ++stats.merge_proposed;
    stats.merge_accepted += dim.accepted ? 1 : 0;
  }
  update_C(s, options, rng);
  update_tau(s, options, rng);
  update_sigma2(s, h, options, rng);
}

namespace {

std::string dump_state(const SamplerState& s) {
  std::ostringstream os;
  os.precision(6);
  os << "sigma2 = " << s.params.sigma2.transpose() << "\n";
  os << "B =\n" << s.params.B << "\n";
  os << "p_star = " << s.p_star() << ", pivots =";
  for (int piv : s.pivots) os << ' ' << piv;
  os << "\nkappa = " << s.kappa << ", a1 = " << s.a1 << ", a2 = " << s.a2;
  return os.str();
}

// Cached residuals are refreshed from scratch this often to bound drift.
constexpr int kResidualRefresh = 100;

}  // namespace

ChainResult run_chain(const Dataset& data, const Hyperparameters& hyper,
                      const ChainConfig& config, const MoveConfig& moves,
                      const SamplerOptions& options, Rng& rng) {
  config.validate();
  moves.validate();
  const Hyperparameters h = hyper.resolve(data.Q());
  SamplerState s = initialize_state(data, h, rng);
  BTuning tuning = BTuning::make(data.Q(), options.b_step);
  ChainResult out;
  out.samples.reserve(static_cast<std::size_t>(
      (config.iterations - config.burn_in) / config.thin));

  for (int it = 1; it <= config.iterations; ++it) {
    try {
      sweep(s, data, h, moves, options, tuning, rng, out.acceptance);
      if (it % kResidualRefresh == 0) {
        recompute_residuals(s, data, options.parallel_kernels);
      }
    } catch (const NumericalError& e) {
      throw ChainFailure(e.what(), it, dump_state(s));
    }
    if (it <= config.burn_in && options.adapt_interval > 0 &&
        it % options.adapt_interval == 0 &&
        options.b_proposal == BProposal::random_walk) {
      tuning.adapt(options.b_target_low, options.b_target_high);
    }
    if (it % config.thin != 0) continue;
    const double lj = log_joint_density(s, data, h);
    out.trace_iteration.push_back(it);
    out.trace_log_joint.push_back(lj);
    out.trace_p_star.push_back(s.p_star());
    if (it > config.burn_in) out.samples.push_back(snapshot(s, lj, it));
  }
  out.b_step = tuning.step;
  return out;
}

std::vector<ChainResult> run_chains(const Dataset& data,
                                    const Hyperparameters& hyper,
                                    const ChainConfig& config,
                                    const MoveConfig& moves,
                                    const SamplerOptions& options) {
  config.validate();
  std::vector<ChainResult> out(static_cast<std::size_t>(config.chains));
  std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic) if (config.chains > 1)
  for (int c = 0; c < config.chains; ++c) {
    try {
      Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(c)}));
      out[static_cast<std::size_t>(c)] =
          run_chain(data, hyper, config, moves, options, rng);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---- summaries --------------------------------------------------------------

namespace {

int mode_of(const std::vector<const Sample*>& samples) {
  std::map<int, int> counts;
  for (const Sample* s : samples) ++counts[s->p_star];
  int best = 0, best_count = -1;
  for (auto [k, c] : counts) {
    if (c > best_count) {
      best = k;
      best_count = c;
    }
  }
  return best;
}

std::vector<int> active_by_pivot(const Sample& s) {
  std::vector<int> cols;
  for (std::size_t p = 0; p < s.pivots.size(); ++p)
    if (s.pivots[p] >= 0) cols.push_back(static_cast<int>(p));
  std::sort(cols.begin(), cols.end(), [&](int a, int b) {
    return s.pivots[static_cast<std::size_t>(a)] < s.pivots[static_cast<std::size_t>(b)];
  });
  return cols;
}

int pivot_sign(const Sample& s, int p) {
  return s.L(s.pivots[static_cast<std::size_t>(p)], p) < 0.0 ? -1 : 1;
}

}  // namespace

const Sample& reference_sample(const std::vector<const Sample*>& samples) {
  if (samples.empty()) throw ValidationError("no samples to summarize");
  const int mode = mode_of(samples);
  const Sample* best = nullptr;
  for (const Sample* s : samples) {
    if (s->p_star != mode) continue;
    if (!best || s->log_joint > best->log_joint) best = s;
  }
  return *best;
}

ColumnAlignment align_columns(const Sample& sample, const Sample& ref) {
  const int P = static_cast<int>(sample.pivots.size());
  ColumnAlignment out{std::vector<int>(static_cast<std::size_t>(P), -1),
                      std::vector<int>(static_cast<std::size_t>(P), 1)};
  const std::vector<int> ref_cols = active_by_pivot(ref);
  const std::vector<int> cols = active_by_pivot(sample);

  struct Pair {
    double score;
    std::size_t r, c;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < ref_cols.size(); ++r) {
    const Vector vr = pivot_sign(ref, ref_cols[r]) * ref.L.col(ref_cols[r]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Vector vc = pivot_sign(sample, cols[c]) * sample.L.col(cols[c]);
      pairs.push_back({std::abs(vr.dot(vc)), r, c});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.score > b.score; });
  std::vector<bool> ref_used(ref_cols.size(), false), col_used(cols.size(), false);
  for (const Pair& pr : pairs) {
    if (ref_used[pr.r] || col_used[pr.c]) continue;
    ref_used[pr.r] = col_used[pr.c] = true;
    out.slot[pr.r] = cols[pr.c];
    out.sign[pr.r] = pivot_sign(sample, cols[pr.c]);
  }
  std::size_t next = ref_cols.size();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (col_used[c]) continue;
    out.slot[next] = cols[c];
    out.sign[next] = pivot_sign(sample, cols[c]);
    ++next;
  }
  return out;
}

namespace {

PosteriorSummary summarize_pointers(const std::vector<const Sample*>& samples) {
  if (samples.empty()) throw ValidationError("no retained samples to summarize");
  const Sample& first = *samples.front();
  const Eigen::Index Q = first.B.rows(), S = first.A.cols(), P = first.L.cols();
  PosteriorSummary out;
  out.n_samples = static_cast<int>(samples.size());
  out.incl_prob_B = Matrix::Zero(Q, Q);
  out.incl_prob_A = Matrix::Zero(Q, S);
  out.incl_prob_L = Matrix::Zero(Q, P);
  out.mean_B = Matrix::Zero(Q, Q);
  out.mean_A = Matrix::Zero(Q, S);
  out.mean_L = Matrix::Zero(Q, P);
  out.mean_mu = Vector::Zero(Q);
  out.mean_sigma2 = Vector::Zero(Q);
  out.mean_A_marginal = Matrix::Zero(Q, S);
  out.p_star_histogram.assign(static_cast<std::size_t>(P + 1), 0.0);

  const Sample& ref = reference_sample(samples);
  for (const Sample* sp : samples) {
    const Sample& s = *sp;
    const Matrix gb = s.gamma_beta.cast<double>();
    const Matrix ga = s.gamma_alpha.cast<double>();
    out.incl_prob_B += gb;
    out.incl_prob_A += ga;
    out.mean_B += gb.cwiseProduct(s.B);
    out.mean_A += ga.cwiseProduct(s.A);
    out.mean_A_marginal += s.A;
    out.mean_mu += s.mu;
    out.mean_sigma2 += s.sigma2;
    out.p_star_histogram[static_cast<std::size_t>(s.p_star)] += 1.0;
    const ColumnAlignment al = align_columns(s, ref);
    for (Eigen::Index j = 0; j < P; ++j) {
      const int p = al.slot[static_cast<std::size_t>(j)];
      if (p < 0) continue;
      for (Eigen::Index q = 0; q < Q; ++q) {
        if (!s.delta(q, p)) continue;
        out.incl_prob_L(q, j) += 1.0;
        out.mean_L(q, j) += al.sign[static_cast<std::size_t>(j)] * s.L(q, p);
      }
    }
  }
  auto conditional_mean = [](Matrix& sum, const Matrix& count) {
    for (Eigen::Index i = 0; i < sum.size(); ++i)
      sum(i) = count(i) > 0 ? sum(i) / count(i) : 0.0;
  };
  conditional_mean(out.mean_B, out.incl_prob_B);
  conditional_mean(out.mean_A, out.incl_prob_A);
  conditional_mean(out.mean_L, out.incl_prob_L);
  const double m = static_cast<double>(samples.size());
  out.incl_prob_B /= m;
  out.incl_prob_A /= m;
  out.incl_prob_L /= m;
  out.mean_A_marginal /= m;
  out.mean_mu /= m;
  out.mean_sigma2 /= m;
  for (double& v : out.p_star_histogram) v /= m;
  out.modal_p_star = mode_of(samples);
  return out;
}

}  // namespace

PosteriorSummary summarize(const std::vector<Sample>& samples) {
  std::vector<const Sample*> ptrs;
  for (const Sample& s : samples) ptrs.push_back(&s);
  return summarize_pointers(ptrs);
}

PosteriorSummary summarize(const std::vector<ChainResult>& chains) {
  std::vector<const Sample*> ptrs;
  for (const ChainResult& c : chains)
    for (const Sample& s : c.samples) ptrs.push_back(&s);
  return summarize_pointers(ptrs);
}

GraphEstimate extract_graph(const PosteriorSummary& sm, double threshold) {
  GraphEstimate g;
  g.b_edges = sm.incl_prob_B.array() > threshold;
  g.b_edges.matrix().diagonal().setConstant(false);
  g.a_edges = sm.incl_prob_A.array() > threshold;
  g.l_edges = sm.incl_prob_L.array() > threshold;
  for (Eigen::Index j = sm.modal_p_star; j < g.l_edges.cols(); ++j)
    g.l_edges.col(j).setConstant(false);
  g.B = g.b_edges.cast<double>().matrix().cwiseProduct(sm.mean_B);
  g.A = g.a_edges.cast<double>().matrix().cwiseProduct(sm.mean_A);
  g.L = g.l_edges.cast<double>().matrix().cwiseProduct(sm.mean_L);
  g.p_star = sm.modal_p_star;
  return g;
}

// ---- diagnostics ------------------------------------------------------------

double potential_scale_reduction(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) return std::nan("");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != n) throw ValidationError("chains differ in length");
  }
  if (n < 2) return std::nan("");
  std::vector<double> means(m);
  double W = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& c = chains[j];
    means[j] = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : c) ss += (v - means[j]) * (v - means[j]);
    W += ss / static_cast<double>(n - 1);
  }
  W /= static_cast<double>(m);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double B = 0.0;
  for (double mu : means) B += (mu - grand) * (mu - grand);
  B *= static_cast<double>(n) / static_cast<double>(m - 1);
  if (W == 0.0) return B == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt((W + B / static_cast<double>(n)) / W);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  double total = 0.0;
  for (const auto& c : chains) {
    const std::size_t n = c.size();
    if (n < 4) {
      total += static_cast<double>(n);
      continue;
    }
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
      double acc = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) acc += (c[i] - mean) * (c[i + lag] - mean);
      return acc / static_cast<double>(n);
    };
    const double g0 = autocov(0);
    if (g0 <= 0.0) {
      total += static_cast<double>(n);
      continue;
    }
    // Geyer's initial positive sequence on pairs of autocorrelations.
    double sum = 0.0;
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
      const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / g0;
      if (pair <= 0.0) break;
      sum += pair;
    }
    const double tau = std::max(2.0 * sum - 1.0, 1.0 / static_cast<double>(n));
    total += static_cast<double>(n) / tau;
  }
  return total;
}

DiagnosticsReport diagnostics(const std::vector<ChainResult>& chains) {
  DiagnosticsReport out;
  out.chains = static_cast<int>(chains.size());
  if (chains.empty()) return out;
  std::size_t n = chains.front().samples.size();
  for (const auto& c : chains) n = std::min(n, c.samples.size());
  out.samples_per_chain = static_cast<int>(n);

  std::vector<std::vector<double>> lj(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) lj[c].push_back(chains[c].samples[i].log_joint);
  out.rhat_log_joint = potential_scale_reduction(lj);
  out.ess_log_joint = effective_sample_size(lj);

  const Eigen::Index Q = n > 0 ? chains.front().samples.front().sigma2.size() : 0;
  for (Eigen::Index q = 0; q < Q; ++q) {
    std::vector<std::vector<double>> s2(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c)
      for (std::size_t i = 0; i < n; ++i) s2[c].push_back(chains[c].samples[i].sigma2(q));
    out.rhat_sigma2.push_back(potential_scale_reduction(s2));
    out.ess_sigma2.push_back(effective_sample_size(s2));
  }

  AcceptanceStats pooled;
  for (const auto& c : chains) {
    const AcceptanceStats& a = c.acceptance;
    pooled.b_proposed += a.b_proposed;
    pooled.b_accepted += a.b_accepted;
    pooled.a_proposed += a.a_proposed;
    pooled.a_accepted += a.a_accepted;
    pooled.pivots.shift_proposed += a.pivots.shift_proposed;
    pooled.pivots.shift_accepted += a.pivots.shift_accepted;
    pooled.pivots.switch_proposed += a.pivots.switch_proposed;
    pooled.pivots.switch_accepted += a.pivots.switch_accepted;
    pooled.pivots.add_delete_proposed += a.pivots.add_delete_proposed;
    pooled.pivots.add_delete_accepted += a.pivots.add_delete_accepted;
    pooled.split_proposed += a.split_proposed;
    pooled.split_accepted += a.split_accepted;
    pooled.merge_proposed += a.merge_proposed;
    pooled.merge_accepted += a.merge_accepted;
  }
  out.acceptance = pooled.rates();
  return out;
}

}  // namespace baycausal
