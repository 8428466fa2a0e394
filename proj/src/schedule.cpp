#include "floodtext/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "floodtext/error.hpp"

namespace floodtext {

long long StlrConfig::cut() const {
  return static_cast<long long>(std::floor(cut_frac * static_cast<double>(total_steps)));
}

void StlrConfig::validate() const {
  if (lr_max <= 0.0) throw ConfigError("stlr: lr_max must be > 0");
  if (!(cut_frac > 0.0 && cut_frac < 1.0)) throw ConfigError("stlr: cut_frac must lie in (0,1)");
  if (ratio <= 1.0) throw ConfigError("stlr: ratio must be > 1");
  if (total_steps < 1) throw ConfigError("stlr: total_steps must be >= 1");
  if (cut() < 1) {
    throw ConfigError("stlr: cut_frac * total_steps must be >= 1");
  }
}

double stlr(long long t, const StlrConfig& cfg) {
  if (t < 0 || t > cfg.total_steps) {
    throw ConfigError("stlr: step " + std::to_string(t) + " outside [0," +
                      std::to_string(cfg.total_steps) + "]");
  }
  const double cut = static_cast<double>(cfg.cut());
  const double td = static_cast<double>(t);
  // The flooring in cut() can push the linear decay fractionally below the
  // lr_max/ratio floor right at the end of the range; the schedule never
  // drops below the floor.
  const double p =
      td < cut ? td / cut
               : std::max(0.0, 1.0 - (td - cut) / (cut * (1.0 / cfg.cut_frac - 1.0)));
  return cfg.lr_max * (1.0 + p * (cfg.ratio - 1.0)) / cfg.ratio;
}

std::vector<double> discriminative_lrs(double base_lr, int n_groups, double factor) {
  if (base_lr <= 0.0) throw ConfigError("discriminative_lrs: base_lr must be > 0");
  if (n_groups < 1) throw ConfigError("discriminative_lrs: n_groups must be >= 1");
  if (factor <= 1.0) throw ConfigError("discriminative_lrs: factor must be > 1");
  std::vector<double> lrs(static_cast<std::size_t>(n_groups));
  double lr = base_lr;
  for (auto& out : lrs) {
    out = lr;
    lr /= factor;
  }
  return lrs;
}

int LayerGroups::group_of(const std::string& name) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::find(groups[g].begin(), groups[g].end(), name) != groups[g].end()) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

void LayerGroups::check_partition(const std::vector<std::string>& names) const {
  std::set<std::string> in_groups;
  std::size_t total = 0;
  for (const auto& g : groups) {
    total += g.size();
    in_groups.insert(g.begin(), g.end());
  }
  if (in_groups.size() != total) {
    throw ConfigError("layer groups contain a duplicated parameter name");
  }
  if (in_groups != std::set<std::string>(names.begin(), names.end()) ||
      names.size() != total) {
    throw ConfigError("layer groups do not partition the model parameters");
  }
}

}  // namespace floodtext
