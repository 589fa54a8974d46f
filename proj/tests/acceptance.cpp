// Acceptance suite: one PASS/FAIL line per criterion.
//
//   cwopt_acceptance               run every criterion
//   cwopt_acceptance 3 7           run only the listed criteria
//
// Exit status is the number of failed criteria that were run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cwopt/experiment.hpp"
#include "cwopt/io.hpp"
#include "cwopt/moments.hpp"
#include "cwopt/netsim.hpp"
#include "cwopt/optimizer.hpp"
#include "cwopt/rng.hpp"
#include "cwopt/spectrum.hpp"
#include "oracles.hpp"

using namespace cwopt;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Net {
  Supergraph graph;
  LinkStatModel model;
};

Net geometric(std::uint64_t seed, int n, std::size_t m) {
  Rng rng = derive_stream(seed, Stream::Graph);
  auto gg = generate_with_edge_count(n, m, rng);
  const auto p = assign_probabilities(gg.graph, 0.6, *gg.graph.radius());
  auto model = build_correlations(gg.graph, p, 0.2, 0.6);
  return {std::move(gg.graph), std::move(model)};
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

std::string fmt_k(const std::optional<int>& k) { return k ? std::to_string(*k) : "not reached"; }

// Random feasible weights: Metropolis weights with per-edge jitter.
WeightVector random_feasible(const Net& net, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 1.7);
  const auto mw = metropolis_weights(net.graph).values();
  for (;;) {
    Eigen::VectorXd w = mw;
    for (Eigen::Index e = 0; e < w.size(); ++e) w(e) *= u(rng);
    WeightVector wv(w);
    if (phi_n(wv, net.model, net.graph, 1) < 1.0) return wv;
  }
}

Verdict criterion1() {
  Supergraph two(2, {{0, 1}});
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double p = 1.0 - u(rng) * 0.999;  // (0.001, 1]
    const double w = u(rng);
    const double phi = phi_n(WeightVector(std::vector<double>{w}), LinkStatModel({p}, {}), two, 1);
    worst = std::max(worst, std::abs(phi - (1.0 - 4.0 * p * w * (1.0 - w))));
  }
  double worst_w = 0.0;
  for (double p : {0.2, 0.5, 0.8, 1.0}) {
    auto r = optimize({ObjectiveKind::Phi, 1}, two, LinkStatModel({p}, {}), WeightVector(std::vector<double>{0.1}));
    worst_w = std::max(worst_w, std::abs(r.best_weights[0] - 0.5));
  }
  return {worst <= 1e-12 && worst_w <= 1e-3,
          "max |phi_1 - closed form| = " + fmt(worst) + " over 100 pairs; max |w* - 1/2| = " + fmt(worst_w)};
}

Verdict criterion2() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng() % 19);
    auto g = oracle::random_connected_graph(n, 0.3, rng);
    const WeightVector w(oracle::uniform_vector(g.num_edges(), -0.3, 0.7, rng));
    const std::vector<char> all(g.num_edges(), 1);
    const Eigen::MatrixXd e =
        realized_state_matrix(w, all, g) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd m = error_moment_matrix(w, LinkStatModel::deterministic(g.num_edges()), g).m;
    worst = std::max(worst, (m - e * e).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max entrywise |M - (W-J)^2| = " + fmt(worst) + " over 20 graphs"};
}

Verdict criterion3() {
  auto net = geometric(1003, 12, 26);
  const int n_nodes = net.graph.num_nodes();
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  int points = 0;
  for (int n : {1, 5, n_nodes - 1}) {
    int accepted = 0;
    while (accepted < 50) {
      const auto w = random_feasible(net, rng);
      const auto eval = evaluate_spectrum(w, net.model, net.graph, n);
      if (n < n_nodes - 1 && eval.eigenvalues(n - 1) - eval.eigenvalues(n) <= 1e-6) continue;
      const auto g = subgrad_phi_n(w, net.model, net.graph, n);
      Eigen::VectorXd fd(g.size());
      for (Eigen::Index e = 0; e < g.size(); ++e) {
        fd(e) = oracle::central_difference(
            [&](double x) {
              Eigen::VectorXd v = w.values();
              v(e) = x;
              return phi_n(WeightVector(v), net.model, net.graph, n);
            },
            w[static_cast<std::size_t>(e)]);
      }
      worst = std::max(worst, (g - fd).norm() / fd.norm());
      ++accepted;
      ++points;
    }
  }
  return {worst < 1e-5, "max relative error " + fmt(worst) + " at " + std::to_string(points) +
                            " points, n in {1, 5, N-1}, N = " + std::to_string(n_nodes)};
}

Verdict criterion4() {
  auto net = geometric(1004, 20, 45);
  const int n_nodes = net.graph.num_nodes();
  const int quarter = (n_nodes + 3) / 4;
  std::mt19937_64 rng(1004);
  int violations = 0;
  double worst = -1e300;
  const std::size_t m = net.graph.num_edges();
  for (int n : {1, quarter, n_nodes - 1}) {
    for (int t = 0; t < 200; ++t) {
      const auto xv = oracle::uniform_vector(m, -0.5, 1.0, rng);
      const auto yv = oracle::uniform_vector(m, -0.5, 1.0, rng);
      std::vector<double> mid(m);
      for (std::size_t e = 0; e < m; ++e) mid[e] = 0.5 * (xv[e] + yv[e]);
      const WeightVector x(xv), y(yv), z(mid);
      const double gap_phi = phi_n(z, net.model, net.graph, n) -
                             0.5 * (phi_n(x, net.model, net.graph, n) + phi_n(y, net.model, net.graph, n));
      const double gap_psi =
          psi_n(z, net.graph, n) - 0.5 * (psi_n(x, net.graph, n) + psi_n(y, net.graph, n));
      for (double gap : {gap_phi, gap_psi}) {
        worst = std::max(worst, gap);
        if (gap > 1e-9) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in 1200 midpoint tests (n in {1, " +
                               std::to_string(quarter) + ", " + std::to_string(n_nodes - 1) +
                               "}); max f(mid) - mean = " + fmt(worst)};
}

Verdict criterion5() {
  // (a) empirical moments on the paper-scale model.
  auto net = geometric(1, 120, 449);
  auto s = build_sampler(net.model);
  Rng rng = derive_stream(1005, Stream::Oracle);
  const std::size_t m = net.graph.num_edges();
  const int draws = 100000;
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd both = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<char> active;
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  ClampStats clamps;
  for (int d = 0; d < draws; ++d) {
    sample_topology(s, rng, active, &clamps);
    for (std::size_t e = 0; e < m; ++e) x(static_cast<Eigen::Index>(e)) = active[e];
    freq += x;
    both.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  freq /= draws;
  Eigen::MatrixXd emp = both.selfadjointView<Eigen::Lower>();
  emp = emp / draws - freq * freq.transpose();
  double worst_p = 0.0;
  for (std::size_t e = 0; e < m; ++e)
    worst_p = std::max(worst_p, std::abs(freq(static_cast<Eigen::Index>(e)) - net.model.prob(e)));
  const double worst_cov = (emp - net.model.cross_cov()).cwiseAbs().maxCoeff();

  // (b) exact joint laws on enumerable cases.
  std::mt19937_64 cases(1005);
  double worst_exact = 0.0;
  int enumerated = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t k = 2 + t % 2;
    Supergraph g = k == 2 ? Supergraph(3, {{0, 1}, {1, 2}}) : Supergraph(3, {{0, 1}, {0, 2}, {1, 2}});
    auto p = oracle::uniform_vector(k, 0.4, 1.0, cases);
    auto model = build_correlations(g, p, 0.2);
    const auto joint = oracle::enumerate_joint(build_sampler(model));
    bool clamped = false;
    for (double q : joint) clamped = clamped || q < 0.0;
    if (clamped) continue;
    for (std::size_t e = 0; e < k; ++e)
      for (std::size_t f = 0; f < k; ++f) {
        double pe = 0.0, pef = 0.0, pf = 0.0;
        for (std::size_t pattern = 0; pattern < joint.size(); ++pattern) {
          const bool xe = (pattern >> e) & 1U, xf = (pattern >> f) & 1U;
          if (xe) pe += joint[pattern];
          if (xf) pf += joint[pattern];
          if (xe && xf) pef += joint[pattern];
        }
        worst_exact = std::max(worst_exact, std::abs(pe - p[e]));
        worst_exact = std::max(
            worst_exact,
            std::abs(pef - pe * pf - model.cross_cov()(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f))));
      }
    ++enumerated;
  }
  const bool pass = worst_p <= 0.01 && worst_cov <= 0.02 && worst_exact <= 1e-12 && enumerated > 0;
  return {pass, "max |freq - P| = " + fmt(worst_p) + ", max |cov - Gamma| = " + fmt(worst_cov) +
                    " (10^5 draws, clamp rate " + fmt(clamps.fraction()) + "); exact-law error " + fmt(worst_exact) +
                    " on " + std::to_string(enumerated) + " enumerated cases"};
}

Verdict criterion6() {
  std::mt19937_64 rng(1006);
  int good = 0;
  double worst_z = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = 10 + static_cast<int>(rng() % 21);
    auto net = geometric(2000 + t, n, static_cast<std::size_t>(n * 2.5));
    const auto w = random_feasible(net, rng);
    auto s = build_sampler(net.model);
    Rng init = derive_stream(1006, Stream::InitialCondition, static_cast<std::uint64_t>(t));
    const auto e = random_initial_error(n, init);
    const Eigen::Map<const Eigen::VectorXd> ev(e.data(), n);
    const double predicted = ev.dot(error_moment_matrix(w, net.model, net.graph).m * ev);
    Rng topo = derive_stream(1006, Stream::Topology, static_cast<std::uint64_t>(t));
    const int draws = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int d = 0; d < draws; ++d) {
      const double v = run_consensus(w, s, net.graph, e, 1, topo)[1];
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / draws;
    const double se = std::sqrt(std::max(0.0, sum2 / draws - mean * mean) / (draws - 1));
    const double z = std::abs(mean - predicted) / se;
    worst_z = std::max(worst_z, z);
    if (z < 5.0) ++good;
  }
  return {good == 10, std::to_string(good) + "/10 triples within 5 SE; worst |z| = " + fmt(worst_z)};
}

ExperimentConfig paper_config() {
  ExperimentConfig c;
  c.graph.n_nodes = 120;
  c.graph.target_edges = 449;
  c.graph.c1 = 0.6;
  c.graph.c2 = 0.2;
  c.horizon = 100;
  c.n_trials = 100;
  c.seed = 1;
  return c;
}

Verdict criterion7() {
  auto c = paper_config();
  c.schemes = {parse_scheme("metropolis"), parse_scheme("sgbw"), parse_scheme("phi:1"), parse_scheme("phi:15"),
               parse_scheme("phi:30")};
  const auto report = run_experiment(c);
  const auto& t = report.table;
  auto at = [&](const char* s, double th) { return t.iterations_for(s, th); };
  auto less = [](const std::optional<int>& a, const std::optional<int>& b) {
    return a && (!b || *a < *b);
  };
  const auto mw = at("metropolis", 1e-2), sg = at("sgbw", 1e-2), p1 = at("phi:1", 1e-2), p15 = at("phi:15", 1e-2),
             p30 = at("phi:30", 1e-2);
  const auto p1f = at("phi:1", 1e-3), p30f = at("phi:30", 1e-3);
  const bool a = less(p1, mw) && less(p1, sg) && less(p30, mw) && less(p30, sg);
  const bool b = less(p30, p1) && less(p1f, p30f);
  bool c15 = false;
  if (p1 && p15 && p30) c15 = *p15 >= std::min(*p1, *p30) && *p15 <= std::max(*p1, *p30);
  std::optional<int> cross;
  for (const auto& x : t.crossings)
    if (x.a == "phi:1" && x.b == "phi:30") cross = x.k;
  std::string detail = std::string("(a) ") + (a ? "pass" : "fail") + " (b) " + (b ? "pass" : "fail") + " (c) " +
                       (c15 ? "pass" : "fail") + "; to 1%: mw " + fmt_k(mw) + ", sgbw " + fmt_k(sg) + ", phi1 " +
                       fmt_k(p1) + ", phi15 " + fmt_k(p15) + ", phi30 " + fmt_k(p30) + "; to 0.1%: phi1 " +
                       fmt_k(p1f) + ", phi30 " + fmt_k(p30f) + "; phi1/phi30 curves cross at k = " + fmt_k(cross);
  return {a && b && c15, detail};
}

Verdict criterion8() {
  auto c = paper_config();
  c.static_network = true;
  c.n_trials = 1000;
  c.schemes = {parse_scheme("metropolis"), parse_scheme("sgbw")};
  const auto report = run_experiment(c);
  const auto& mw = report.outcomes[0].trajectory.mse;
  const auto& opt = report.outcomes[1].trajectory.mse;
  int below = 0;
  std::optional<int> last_below;
  bool above_late = true;
  for (std::size_t k = 1; k < mw.size(); ++k) {
    if (mw[k] < opt[k]) {
      ++below;
      last_below = static_cast<int>(k);
    }
    if (k >= 40 && !(mw[k] > opt[k])) above_late = false;
  }
  const bool early = mw.size() > 1 && mw[1] < opt[1];
  return {early && above_late, "MW below psi_1-optimal at " + std::to_string(below) +
                                   " iterations, last at k = " + fmt_k(last_below) + "; above for all k >= 40: " +
                                   (above_late ? "yes" : "no")};
}

Verdict criterion9() {
  const auto base = fs::temp_directory_path() / "cwopt_acceptance_determinism";
  fs::remove_all(base);
  auto c = paper_config();
  c.schemes = {parse_scheme("metropolis"), parse_scheme("sgbw"), parse_scheme("phi:1"), parse_scheme("phi:30")};
  std::vector<std::map<std::string, std::string>> outputs;
  for (const char* run : {"a", "b"}) {
    c.output_dir = (base / run).string();
    run_experiment(c);
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(base / run))
      files[entry.path().filename().string()] = io::read_text(entry.path());
    files.erase("config.json");  // echoes the output directory
    outputs.push_back(std::move(files));
  }
  std::size_t differing = 0;
  for (const auto& [name, text] : outputs[0]) {
    auto it = outputs[1].find(name);
    if (it == outputs[1].end() || it->second != text) ++differing;
  }
  fs::remove_all(base);
  return {differing == 0 && outputs[0].size() == outputs[1].size() && !outputs[0].empty(),
          std::to_string(outputs[0].size()) + " output files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
      return 100;
    }
    selected.push_back(k);
  }
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);

  int failed = 0;
  for (int k : selected) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s  %s  [%.1fs]\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed;
}
