#include "cwopt/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "cwopt/error.hpp"

namespace cwopt {

namespace {

// Residual variances at or below this are treated as degenerate pivots.
constexpr double kPivotTol = 1e-10;

}  // namespace

TopologySampler build_sampler(const LinkStatModel& model) {
  TopologySampler s;
  const std::size_t m = model.num_edges();
  s.probs_ = model.probs();
  s.coeffs_.assign(m, {});
  s.deterministic_ = model.is_deterministic();
  if (s.deterministic_) return s;

  const auto& cov = model.cross_cov();
  // Cholesky rows of the conditioning block, grown one member at a time.
  std::vector<std::vector<double>> chol;
  std::vector<double> l;
  for (std::size_t e = 0; e < m; ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    const std::size_t k = s.members_.size();
    l.assign(k, 0.0);
    bool coupled = false;
    for (std::size_t a = 0; a < k; ++a) {
      double v = cov(static_cast<Eigen::Index>(s.members_[a]), ei);
      coupled = coupled || v != 0.0 || l[a] != 0.0;
      if (!coupled) continue;
      for (std::size_t b = 0; b < a; ++b) v -= chol[a][b] * l[b];
      l[a] = v / chol[a][a];
    }
    double residual = cov(ei, ei);
    for (double x : l) residual -= x * x;
    if (residual < -kPivotTol) {
      std::ostringstream msg;
      msg << "link covariance matrix is not positive semidefinite (residual variance " << residual
          << " at edge " << e + 1 << "); reduce c2";
      fail(ErrorCode::NotPositiveSemidefinite, msg.str());
    }

    // b = L^{-T} l
    std::vector<double> b(l);
    for (std::size_t a = k; a-- > 0;) {
      double v = b[a];
      for (std::size_t c = a + 1; c < k; ++c) v -= chol[c][a] * b[c];
      b[a] = v / chol[a][a];
    }
    while (!b.empty() && b.back() == 0.0) b.pop_back();
    s.coeffs_[e] = std::move(b);

    if (residual > kPivotTol) {
      std::vector<double> row(l);
      row.push_back(std::sqrt(residual));
      chol.push_back(std::move(row));
      s.members_.push_back(e);
    }
  }
  return s;
}

double TopologySampler::conditional_mean(std::size_t e, std::span<const char> outcomes) const {
  const auto& b = coeffs_.at(e);
  double mean = probs_[e];
  for (std::size_t k = 0; k < b.size(); ++k) {
    const std::size_t f = members_[k];
    mean += b[k] * (static_cast<double>(outcomes[f]) - probs_[f]);
  }
  return mean;
}

std::vector<double> TopologySampler::coefficients(std::size_t e) const {
  std::vector<double> dense(e, 0.0);
  const auto& b = coeffs_.at(e);
  for (std::size_t k = 0; k < b.size(); ++k) dense[members_[k]] = b[k];
  return dense;
}

void sample_topology(const TopologySampler& sampler, Rng& rng, std::vector<char>& active, ClampStats* stats) {
  const std::size_t m = sampler.num_edges();
  active.assign(m, 1);
  if (sampler.is_deterministic()) return;
  const auto& probs = sampler.probs();
  ClampStats local;
  for (std::size_t e = 0; e < m; ++e) {
    // Exact marginals, no clamping.
    if (probs[e] >= 1.0) continue;
    if (probs[e] <= 0.0) {
      active[e] = 0;
      continue;
    }
    double mean = sampler.conditional_mean(e, active);
    ++local.draws;
    if (mean < 0.0 || mean > 1.0) ++local.clamps;
    mean = std::clamp(mean, TopologySampler::kClampEps, 1.0 - TopologySampler::kClampEps);
    active[e] = uniform01(rng) < mean ? 1 : 0;
  }
  if (stats) *stats += local;
}

void apply_state_matrix(const WeightVector& weights, std::span<const char> active, const Supergraph& graph,
                        std::span<const double> x, std::span<double> out) {
  std::copy(x.begin(), x.end(), out.begin());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    if (!active[e]) continue;
    const Edge& edge = graph.edge(e);
    const auto i = static_cast<std::size_t>(edge.i);
    const auto j = static_cast<std::size_t>(edge.j);
    const double flow = weights[e] * (x[i] - x[j]);
    out[i] -= flow;
    out[j] += flow;
  }
}

std::vector<double> run_consensus(const WeightVector& weights, const TopologySampler& sampler,
                                  const Supergraph& graph, std::span<const double> x0, int horizon, Rng& rng,
                                  ClampStats* stats) {
  require(horizon >= 0, "horizon must be nonnegative");
  require(x0.size() == static_cast<std::size_t>(graph.num_nodes()), "initial state length must equal node count");
  require(weights.size() == graph.num_edges() && sampler.num_edges() == graph.num_edges(),
          "weights, sampler and graph disagree on the edge count");
  const std::size_t n = x0.size();
  auto mean_of = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(n);
  };
  auto energy = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };

  std::vector<double> err(x0.begin(), x0.end());
  const double avg = mean_of(err);
  for (double& v : err) v -= avg;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  out.push_back(energy(err));
  std::vector<double> next(n);
  std::vector<char> active;
  for (int k = 0; k < horizon; ++k) {
    sample_topology(sampler, rng, active, stats);
    const double drift = mean_of(err);  // J e(k)
    apply_state_matrix(weights, active, graph, err, next);
    for (double& v : next) v -= drift;
    err.swap(next);
    out.push_back(energy(err));
  }
  return out;
}

std::vector<double> random_initial_error(int n_nodes, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n_nodes));
  for (double& v : x) v = normal(rng);
  double avg = 0.0;
  for (double v : x) avg += v;
  avg /= static_cast<double>(n_nodes);
  double norm = 0.0;
  for (double& v : x) {
    v -= avg;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& v : x) v /= norm;
  return x;
}

ErrorTrajectory monte_carlo_mse(const WeightVector& weights, const TopologySampler& sampler,
                                const Supergraph& graph, int horizon, std::size_t n_trials, std::uint64_t seed,
                                unsigned workers) {
  require(n_trials >= 1, "at least one trial required");
  require(horizon >= 0, "horizon must be nonnegative");
  std::vector<std::vector<double>> per_trial(n_trials);
  std::vector<ClampStats> per_trial_clamps(n_trials);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng init = derive_stream(seed, Stream::InitialCondition, t);
      Rng topo = derive_stream(seed, Stream::Topology, t);
      const auto e0 = random_initial_error(graph.num_nodes(), init);
      per_trial[t] = run_consensus(weights, sampler, graph, e0, horizon, topo, &per_trial_clamps[t]);
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_trials)));
  if (workers == 1) {
    run_range(0, n_trials);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n_trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  const std::size_t len = static_cast<std::size_t>(horizon) + 1;
  ErrorTrajectory traj;
  traj.n_trials = n_trials;
  traj.seed = seed;
  traj.mse.assign(len, 0.0);
  traj.stderr_.assign(len, 0.0);
  for (std::size_t t = 0; t < n_trials; ++t) {
    for (std::size_t k = 0; k < len; ++k) traj.mse[k] += per_trial[t][k];
    traj.clamps += per_trial_clamps[t];
  }
  const auto count = static_cast<double>(n_trials);
  for (double& v : traj.mse) v /= count;
  if (n_trials > 1) {
    for (std::size_t k = 0; k < len; ++k) {
      double ss = 0.0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const double d = per_trial[t][k] - traj.mse[k];
        ss += d * d;
      }
      traj.stderr_[k] = std::sqrt(ss / (count - 1.0) / count);
    }
  }
  return traj;
}

ValidityReport validate_model(const LinkStatModel& model, std::size_t probe_samples, std::uint64_t seed) {
  ValidityReport report;
  const auto& cov = model.cross_cov();
  if (cov.rows() == 0) {
    report.psd = true;
    report.clamp_fraction = 0.0;
    return report;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.psd = report.min_eigenvalue >= -1e-10;
  for (const auto& entry : model.off_diagonal()) {
    const double bound = std::sqrt(cov(static_cast<Eigen::Index>(entry.e), static_cast<Eigen::Index>(entry.e)) *
                                   cov(static_cast<Eigen::Index>(entry.f), static_cast<Eigen::Index>(entry.f)));
    if (std::abs(entry.value) > bound) ++report.cauchy_schwarz_violations;
  }
  if (report.psd && probe_samples > 0) {
    try {
      const auto sampler = build_sampler(model);
      Rng rng = derive_stream(seed, Stream::Probe);
      ClampStats stats;
      std::vector<char> active;
      for (std::size_t s = 0; s < probe_samples; ++s) sample_topology(sampler, rng, active, &stats);
      report.clamp_fraction = stats.fraction();
      report.probe_samples = probe_samples;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NotPositiveSemidefinite) throw;
      report.psd = false;
    }
  }
  return report;
}

}  // namespace cwopt
