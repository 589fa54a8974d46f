#include "cwopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cwopt/error.hpp"

namespace cwopt::io {

namespace {

[[noreturn]] void parse_error(const std::string& what, std::size_t line) {
  std::ostringstream msg;
  msg << what << " (line " << line << ")";
  fail(ErrorCode::Parse, msg.str());
}

// Reads the next non-empty line; false at end of stream.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_graph(std::ostream& out, const Supergraph& graph, const LinkStatModel& model) {
  require(model.num_edges() == graph.num_edges(), "link model and graph disagree on the edge count");
  out << graph.num_nodes() << ' ' << graph.num_edges() << '\n';
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    out << edge.i + 1 << ' ' << edge.j + 1 << ' ' << format_double(model.prob(e)) << '\n';
  }
}

void write_correlations(std::ostream& out, const LinkStatModel& model) {
  for (const auto& entry : model.off_diagonal())
    out << entry.e + 1 << ' ' << entry.f + 1 << ' ' << format_double(entry.value) << '\n';
}

NetworkFiles read_network(std::istream& graph_in, std::istream* correlations_in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(graph_in, line, line_no)) parse_error("graph file is empty", line_no);
  long long n = 0;
  long long m = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> n >> m) || n < 1 || m < 0) parse_error("expected header \"N M\"", line_no);
  }
  std::vector<Edge> edges;
  std::vector<double> probs;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line(graph_in, line, line_no)) parse_error("graph file ended before M edge lines", line_no);
    std::istringstream row(line);
    long long i = 0;
    long long j = 0;
    double p = 0.0;
    if (!(row >> i >> j >> p)) parse_error("expected \"i j P\"", line_no);
    if (i < 1 || j < 1 || i > n || j > n || i >= j) parse_error("edge endpoints must satisfy 1 <= i < j <= N", line_no);
    edges.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1)});
    probs.push_back(p);
  }
  const Supergraph graph(static_cast<int>(n), edges);
  if (graph.edges() != edges) parse_error("edges must be listed in canonical lexicographic order", line_no);

  std::vector<CovarianceEntry> cross;
  if (correlations_in) {
    std::size_t corr_line = 0;
    while (next_line(*correlations_in, line, corr_line)) {
      std::istringstream row(line);
      long long e = 0;
      long long f = 0;
      double r = 0.0;
      if (!(row >> e >> f >> r)) parse_error("expected \"e f R\" in correlation file", corr_line);
      if (e < 1 || f < 1 || e > m || f > m || e >= f)
        parse_error("correlation indices must satisfy 1 <= e < f <= M", corr_line);
      cross.push_back({static_cast<std::size_t>(e - 1), static_cast<std::size_t>(f - 1), r});
    }
  }
  return {graph, LinkStatModel(std::move(probs), cross)};
}

void save_network(const std::filesystem::path& graph_path, const std::filesystem::path& corr_path,
                  const Supergraph& graph, const LinkStatModel& model) {
  auto g = open_out(graph_path);
  write_graph(g, graph, model);
  auto c = open_out(corr_path);
  write_correlations(c, model);
}

NetworkFiles load_network(const std::filesystem::path& graph_path, const std::filesystem::path& corr_path) {
  auto g = open_in(graph_path);
  if (corr_path.empty()) return read_network(g, nullptr);
  auto c = open_in(corr_path);
  return read_network(g, &c);
}

void write_weights(std::ostream& out, const WeightVector& weights) {
  for (std::size_t e = 0; e < weights.size(); ++e) out << e + 1 << ' ' << format_double(weights[e]) << '\n';
}

WeightVector read_weights(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    std::istringstream row(line);
    long long e = 0;
    double w = 0.0;
    if (!(row >> e >> w)) parse_error("expected \"e W_e\"", line_no);
    if (e != static_cast<long long>(values.size()) + 1) parse_error("weight indices must be 1..M in order", line_no);
    values.push_back(w);
  }
  return WeightVector(values);
}

void save_weights(const std::filesystem::path& path, const WeightVector& weights) {
  auto out = open_out(path);
  write_weights(out, weights);
}

WeightVector load_weights(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_weights(in);
}

void write_trajectory(std::ostream& out, const ErrorTrajectory& traj) {
  out << "k,mse,stderr\n";
  for (std::size_t k = 0; k < traj.mse.size(); ++k)
    out << k << ',' << format_double(traj.mse[k]) << ',' << format_double(traj.stderr_[k]) << '\n';
}

ErrorTrajectory read_trajectory(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no) || line.rfind("k,mse,stderr", 0) != 0)
    parse_error("expected trajectory header \"k,mse,stderr\"", line_no);
  ErrorTrajectory traj;
  while (next_line(in, line, line_no)) {
    const auto cells = split_csv(line);
    if (cells.size() != 3) parse_error("expected three trajectory columns", line_no);
    try {
      if (std::stoull(cells[0]) != traj.mse.size()) parse_error("trajectory rows must be k = 0, 1, ...", line_no);
      traj.mse.push_back(std::stod(cells[1]));
      traj.stderr_.push_back(std::stod(cells[2]));
    } catch (const std::logic_error&) {
      parse_error("malformed trajectory number", line_no);
    }
  }
  return traj;
}

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iter,value,feasible,step\n";
  for (std::size_t t = 0; t < trace.size(); ++t)
    out << t << ',' << format_double(trace[t].value) << ',' << (trace[t].feasible ? 1 : 0) << ','
        << format_double(trace[t].step) << '\n';
}

void write_spectrum(std::ostream& out, const Eigen::VectorXd& eigenvalues) {
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out << i + 1 << ',' << format_double(eigenvalues(i)) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cwopt::io
