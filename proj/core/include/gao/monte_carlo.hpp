#pragma once

// Monte-Carlo simulation of the full (ln X, Y, Z) system. Serves as the
// independent price oracle for the closed forms.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "gao/model.hpp"

namespace gao {

struct McConfig {
  std::uint64_t n_paths = 100000;
  std::uint32_t n_steps = 250;
  std::uint64_t seed = 20240601;
  bool antithetic = true;
  unsigned n_threads = 0;  ///< 0 = hardware concurrency; never changes results

  void validate() const;
};

struct ConstantVol {
  double sigma = 0.2;
};

struct FullModel {
  double f_min = 0.01;
  double f_max = 2.0;
  std::optional<double> y0;  ///< fast factor start; alpha when absent
};

using VolSpec = std::variant<ConstantVol, FullModel>;

void validate_vol(const VolSpec& vol);

/// min(f_max, max(f_min, z exp(y - alpha))).
double f_full(double y, double z, double alpha, const FullModel& clamp) noexcept;

struct McEstimate {
  double price = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
  std::uint32_t n_steps = 0;
  std::uint64_t seed = 0;
};

/// Terminal values of one path.
struct PathEnd {
  double log_x = 0.0;
  double log_g = 0.0;  ///< log of the average over [0, T]
  double y = 0.0;
  double z = 0.0;
};

/// Every path of the run, in path-index order. With antithetic sampling the
/// partner of path 2i is path 2i + 1.
std::vector<PathEnd> simulate_paths(const ModelParams& model, const VolSpec& vol,
                                    const MarketState& state, double maturity,
                                    const McConfig& cfg);

/// Discounted mean of payoff(path end) with its standard error. Antithetic
/// pairs are averaged before the variance is taken.
McEstimate mc_expectation(const ModelParams& model, const VolSpec& vol,
                          const MarketState& state, double maturity, const McConfig& cfg,
                          const std::function<double(const PathEnd&)>& payoff);

McEstimate price_mc(const OptionSpec& spec, const ModelParams& model, const VolSpec& vol,
                    const MarketState& state, const McConfig& cfg);

}  // namespace gao
