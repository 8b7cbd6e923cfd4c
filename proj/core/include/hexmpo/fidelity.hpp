#pragma once

#include <vector>

namespace hexmpo {

/// Truncation bookkeeping: one entry per compression step. F_cumulative is
/// the running product of the step fidelities f_t.
struct FidelityLog {
  struct Entry {
    int step = 0;
    double epsilon = 0.0;
    double f = 1.0;
    int chi_max = 1;
    double f_cumulative = 1.0;
    bool degenerate_split = false;
  };

  std::vector<Entry> entries;
  double cumulative = 1.0;

  void record(double epsilon, double f, int chi, bool degenerate = false) {
    cumulative *= f;
    entries.push_back(
        {int(entries.size()), epsilon, f, chi, cumulative, degenerate});
  }

  double recompute_cumulative() const {
    double p = 1.0;
    for (const auto& e : entries) p *= e.f;
    return p;
  }
};

}  // namespace hexmpo
