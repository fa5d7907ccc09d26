#include "plant/processes.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace plant {

namespace {

constexpr double kRowTol = 1e-12;

void check_row(const std::vector<double>& row, int num_states, const std::string& what) {
  if (static_cast<int>(row.size()) != num_states)
    throw PlantError(Errc::BadProcessSpec, what + " has wrong length");
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw PlantError(Errc::BadProcessSpec, what + " has a negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowTol)
    throw PlantError(Errc::BadProcessSpec, what + " does not sum to 1");
}

}  // namespace

StateProcessSpec StateProcessSpec::iid(std::vector<double> probs) {
  StateProcessSpec s;
  s.mode = ProcessMode::Iid;
  s.probs = std::move(probs);
  return s;
}

StateProcessSpec StateProcessSpec::markov(std::vector<std::vector<double>> transition,
                                          int initial) {
  StateProcessSpec s;
  s.mode = ProcessMode::Markov;
  s.transition = std::move(transition);
  s.initial = initial;
  return s;
}

StateProcessSpec StateProcessSpec::from_trace(std::vector<int> trace) {
  StateProcessSpec s;
  s.mode = ProcessMode::Trace;
  s.trace = std::move(trace);
  return s;
}

void validate_process(const StateProcessSpec& spec, int num_states) {
  switch (spec.mode) {
    case ProcessMode::Iid:
      check_row(spec.probs, num_states, "iid probability vector");
      break;
    case ProcessMode::Markov:
      if (static_cast<int>(spec.transition.size()) != num_states)
        throw PlantError(Errc::BadProcessSpec, "transition matrix has wrong row count");
      for (int i = 0; i < num_states; ++i)
        check_row(spec.transition[i], num_states, "transition row " + std::to_string(i));
      if (spec.initial < 0 || spec.initial >= num_states)
        throw PlantError(Errc::BadProcessSpec, "initial state out of range");
      break;
    case ProcessMode::Trace:
      if (spec.trace.empty()) throw PlantError(Errc::BadProcessSpec, "trace is empty");
      for (int s : spec.trace)
        if (s < 0 || s >= num_states)
          throw PlantError(Errc::BadProcessSpec, "trace references an unknown state");
      break;
  }
}

int draw_categorical(const std::vector<double>& probs, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  // rounding left u above the accumulated mass
  return last_positive;
}

int StateProcess::next_state(Count t, RngStream& rng) {
  switch (spec_.mode) {
    case ProcessMode::Iid:
      return draw_categorical(spec_.probs, rng);
    case ProcessMode::Markov:
      if (t == 0) {
        current_ = spec_.initial;
      } else {
        if (t != last_t_ + 1)
          throw PlantError(Errc::BadProcessSpec, "Markov process must be stepped in order");
        current_ = draw_categorical(spec_.transition[current_], rng);
      }
      last_t_ = t;
      return current_;
    case ProcessMode::Trace:
      if (t < 0 || t >= static_cast<Count>(spec_.trace.size()))
        throw PlantError(Errc::TraceExhausted,
                         "slot " + std::to_string(t) + " is past the end of a trace of length " +
                             std::to_string(spec_.trace.size()));
      return spec_.trace[t];
  }
  return 0;
}

namespace {

std::vector<int> bfs_levels(const std::vector<std::vector<double>>& P, bool reverse) {
  const int n = static_cast<int>(P.size());
  std::vector<int> level(n, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      const double w = reverse ? P[v][u] : P[u][v];
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  return level;
}

}  // namespace

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition) {
  const int n = static_cast<int>(transition.size());
  if (n == 0) throw PlantError(Errc::BadProcessSpec, "empty transition matrix");
  for (int i = 0; i < n; ++i) check_row(transition[i], n, "transition row " + std::to_string(i));

  const auto fwd = bfs_levels(transition, false);
  const auto back = bfs_levels(transition, true);
  for (int i = 0; i < n; ++i)
    if (fwd[i] < 0 || back[i] < 0) throw PlantError(Errc::NotErgodic, "chain is reducible");

  // Period of an irreducible chain = gcd of level[u] + 1 - level[v] over edges.
  int period = 0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (transition[u][v] > 0.0) period = std::gcd(period, std::abs(fwd[u] + 1 - fwd[v]));
  if (period != 1)
    throw PlantError(Errc::NotErgodic, "chain is periodic with period " + std::to_string(period));

  std::vector<double> pi(n, 1.0 / n);
  std::vector<double> next(n);
  constexpr long kMaxIter = 50'000'000;
  for (long iter = 0; iter < kMaxIter; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) next[j] += pi[i] * transition[i][j];
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double residual = 0.0;
    for (int j = 0; j < n; ++j) {
      next[j] /= total;
      residual += std::abs(next[j] - pi[j]);
    }
    pi.swap(next);
    if (residual <= 1e-13) break;
  }
  return pi;
}

std::vector<double> long_run_distribution(const StateProcessSpec& spec, int num_states) {
  switch (spec.mode) {
    case ProcessMode::Iid:
      return spec.probs;
    case ProcessMode::Markov:
      return stationary_distribution(spec.transition);
    case ProcessMode::Trace: {
      std::vector<double> freq(num_states, 0.0);
      for (int s : spec.trace) freq[s] += 1.0;
      for (double& f : freq) f /= static_cast<double>(spec.trace.size());
      return freq;
    }
  }
  return {};
}

Count realize_demand(int k, int price_idx, const DemandState& y, const PlantConfig& cfg,
                     RngStream& rng) {
  const Count cap = cfg.d_max[k];
  const double p = y.F[k][price_idx] / static_cast<double>(cap);
  return rng.binomial(cap, p);
}

std::vector<std::pair<std::string, std::string>> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlantError(Errc::ParseError, "cannot open trace file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string x, y, extra;
    if (!(ls >> x)) continue;
    if (x[0] == '#') continue;
    if (!(ls >> y) || (ls >> extra))
      throw PlantError(Errc::ParseError, path + ":" + std::to_string(lineno) +
                                             ": expected exactly two fields 'x_id y_id'");
    rows.emplace_back(std::move(x), std::move(y));
  }
  if (rows.empty()) throw PlantError(Errc::ParseError, "trace file '" + path + "' is empty");
  return rows;
}

}  // namespace plant
