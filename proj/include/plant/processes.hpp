#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plant/model.hpp"
#include "plant/rng.hpp"

namespace plant {

enum class ProcessMode { Iid, Markov, Trace };

// Generator for a sequence of state indices (supply or demand).
struct StateProcessSpec {
  ProcessMode mode = ProcessMode::Iid;
  std::vector<double> probs;                    // Iid
  std::vector<std::vector<double>> transition;  // Markov, row-stochastic
  int initial = 0;                              // Markov
  std::vector<int> trace;                       // Trace

  static StateProcessSpec iid(std::vector<double> probs);
  static StateProcessSpec markov(std::vector<std::vector<double>> transition, int initial);
  static StateProcessSpec from_trace(std::vector<int> trace);
};

// Throws BadProcessSpec when the spec is malformed for a state set of the
// given size.
void validate_process(const StateProcessSpec& spec, int num_states);

class StateProcess {
 public:
  explicit StateProcess(StateProcessSpec spec) : spec_(std::move(spec)) {}

  // State for slot t. Markov chains must be queried at t = 0, 1, 2, ...
  int next_state(Count t, RngStream& rng);

  const StateProcessSpec& spec() const noexcept { return spec_; }

 private:
  StateProcessSpec spec_;
  int current_ = -1;
  Count last_t_ = -1;
};

int draw_categorical(const std::vector<double>& probs, RngStream& rng);

// pi with pi^T P = pi^T by power iteration; throws NotErgodic for reducible or
// periodic chains.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition);

// Long-run state probabilities of any process mode. Trace mode returns the
// empirical frequencies of the trace.
std::vector<double> long_run_distribution(const StateProcessSpec& spec, int num_states);

// Binomial(D_max, F/D_max): integer, bounded by D_max, mean exactly F.
Count realize_demand(int k, int price_idx, const DemandState& y, const PlantConfig& cfg,
                     RngStream& rng);

// "x_id y_id" per line; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_trace_file(const std::string& path);

}  // namespace plant
