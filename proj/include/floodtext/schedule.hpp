#pragma once

#include <string>
#include <vector>

namespace floodtext {

// Slanted triangular learning rate: linear warmup to lr_max over the first
// floor(cut_frac * total_steps) steps, then linear decay toward the
// lr_max / ratio floor.
struct StlrConfig {
  double lr_max = 0.01;
  double cut_frac = 0.1;
  double ratio = 32.0;
  long long total_steps = 0;

  long long cut() const;
  void validate() const;
};

double stlr(long long t, const StlrConfig& cfg);

// Per-group learning rates, head first: base_lr / factor^k.
std::vector<double> discriminative_lrs(double base_lr, int n_groups, double factor);

// Ordered parameter-name groups, index 0 = deepest (embedding side), last =
// head. Must partition the trainable parameter names of the model they
// describe.
struct LayerGroups {
  std::vector<std::vector<std::string>> groups;

  int size() const { return static_cast<int>(groups.size()); }

  // Index of the group containing `name`, -1 if absent.
  int group_of(const std::string& name) const;

  // Throws ConfigError unless `names` is exactly partitioned by the groups.
  void check_partition(const std::vector<std::string>& names) const;
};

}  // namespace floodtext
