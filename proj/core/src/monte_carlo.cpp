#include "gao/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "gao/closed_form.hpp"
#include "gao/philox.hpp"

namespace gao {

void PathNormals::refill() noexcept {
  const auto w = Philox4x32::generate({block_++, path_lo_, path_hi_, 0u}, key_);
  constexpr double kScale = 1.0 / 4294967296.0;
  for (int i = 0; i < 4; i += 2) {
    const double u1 = (static_cast<double>(w[i]) + 0.5) * kScale;
    const double u2 = (static_cast<double>(w[i + 1]) + 0.5) * kScale;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    buf_[i] = radius * std::cos(angle);
    buf_[i + 1] = radius * std::sin(angle);
  }
  pos_ = 0;
}

namespace {

constexpr std::uint64_t kBlockSamples = 512;

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * count * o.count / n;
    count = n;
  }
};

// Lower-triangular L with L L^T = correlation matrix.
std::array<double, 6> cholesky3(double rxy, double rxz, double ryz) {
  const double l00 = 1.0;
  const double l10 = rxy;
  const double d11 = 1.0 - l10 * l10;
  require(d11 > 0.0, ErrorCode::PDFactorizationFailure,
          "correlation matrix is not positive definite");
  const double l11 = std::sqrt(d11);
  const double l20 = rxz;
  const double l21 = (ryz - l20 * l10) / l11;
  const double d22 = 1.0 - l20 * l20 - l21 * l21;
  require(d22 > 0.0, ErrorCode::PDFactorizationFailure,
          "correlation matrix is not positive definite");
  return {l00, l10, l11, l20, l21, std::sqrt(d22)};
}

class Simulator {
 public:
  Simulator(const ModelParams& model, const VolSpec& vol, const MarketState& state,
            double maturity, const McConfig& cfg)
      : model_(model), vol_(vol), cfg_(cfg), t0_(state.t()), T_(maturity) {
    cfg.validate();
    validate_vol(vol);
    if (std::holds_alternative<FullModel>(vol)) {
      chol_ = cholesky3(model.rho_xy, model.rho_xz, model.rho_yz);
    }
    require_valid(model);
    require(maturity - state.t() > kHorizonTol, ErrorCode::InvalidArgument,
            "simulation needs t < T");
    dt_ = (T_ - t0_) / cfg.n_steps;
    sqrt_dt_ = std::sqrt(dt_);
    log_x0_ = std::log(state.spot());
    // Running average carried in as t ln g; at t = 0 it has no weight.
    carried_ = t0_ * std::log(state.avg());

    if (const auto* fm = std::get_if<FullModel>(&vol)) {
      full_ = *fm;
      y0_ = fm->y0.value_or(model.alpha);
      const double a = dt_ / model.epsilon;
      y_decay_ = std::exp(-a);
      y_sd_ = model.nu * std::sqrt(-std::expm1(-2.0 * a));
      z_decay_ = std::exp(-model.k * dt_);
      z_sd_ = model.beta * std::sqrt(-std::expm1(-2.0 * model.k * dt_) / (2.0 * model.k));
    } else {
      const double s = std::get<ConstantVol>(vol).sigma;
      const_drift_ = (model.r - 0.5 * s * s) * dt_;
      const_diff_ = s * sqrt_dt_;
    }
  }

  std::uint64_t n_samples() const noexcept {
    return cfg_.antithetic ? cfg_.n_paths / 2 : cfg_.n_paths;
  }
  int paths_per_sample() const noexcept { return cfg_.antithetic ? 2 : 1; }

  /// Simulates sample i: one path, or an antithetic pair sharing the stream.
  void run_sample(std::uint64_t i, PathEnd* out) const noexcept {
    PathNormals normals(cfg_.seed, i);
    const int m = paths_per_sample();
    double lx[2] = {log_x0_, log_x0_};
    double acc[2] = {0.5 * log_x0_, 0.5 * log_x0_};
    double y[2] = {y0_, y0_};
    double z[2] = {model_.z0, model_.z0};
    const bool constant = std::holds_alternative<ConstantVol>(vol_);

    for (std::uint32_t step = 0; step < cfg_.n_steps; ++step) {
      if (constant) {
        const double e = normals.next();
        for (int j = 0; j < m; ++j) {
          const double sign = j == 0 ? 1.0 : -1.0;
          lx[j] += const_drift_ + const_diff_ * sign * e;
          acc[j] += lx[j];
        }
        continue;
      }
      const double e1 = normals.next();
      const double e2 = normals.next();
      const double e3 = normals.next();
      const double w1 = chol_[0] * e1;
      const double w2 = chol_[1] * e1 + chol_[2] * e2;
      const double w3 = chol_[3] * e1 + chol_[4] * e2 + chol_[5] * e3;
      for (int j = 0; j < m; ++j) {
        const double sign = j == 0 ? 1.0 : -1.0;
        const double f = f_full(y[j], z[j], model_.alpha, full_);
        lx[j] += (model_.r - 0.5 * f * f) * dt_ + f * sqrt_dt_ * sign * w1;
        y[j] = model_.alpha + (y[j] - model_.alpha) * y_decay_ + y_sd_ * sign * w2;
        z[j] = model_.alpha_prime + (z[j] - model_.alpha_prime) * z_decay_ + z_sd_ * sign * w3;
        acc[j] += lx[j];
      }
    }
    for (int j = 0; j < m; ++j) {
      const double integral = dt_ * (acc[j] - 0.5 * lx[j]);
      out[j] = {lx[j], (carried_ + integral) / T_, y[j], z[j]};
    }
  }

  double discount() const noexcept { return std::exp(-model_.r * (T_ - t0_)); }

 private:
  const ModelParams& model_;
  const VolSpec& vol_;
  const McConfig& cfg_;
  double t0_;
  double T_;
  double dt_ = 0.0;
  double sqrt_dt_ = 0.0;
  double log_x0_ = 0.0;
  double carried_ = 0.0;
  double const_drift_ = 0.0;
  double const_diff_ = 0.0;
  FullModel full_;
  double y0_ = 0.0;
  double y_decay_ = 1.0;
  double y_sd_ = 0.0;
  double z_decay_ = 1.0;
  double z_sd_ = 0.0;
  std::array<double, 6> chol_{1.0, 0.0, 1.0, 0.0, 0.0, 1.0};
};

// Calls body(block) for every block; blocks are handed out dynamically, so
// body must only write block-indexed state.
template <typename Body>
void for_each_block(std::uint64_t n_blocks, unsigned n_threads, Body&& body) {
  unsigned workers = n_threads != 0 ? n_threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) body(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < n_blocks; b = next++) body(b);
    });
  }
}

}  // namespace

void McConfig::validate() const {
  require(n_paths >= 2, ErrorCode::InvalidArgument, "n_paths must be >= 2");
  require(n_steps >= 2, ErrorCode::InvalidArgument, "n_steps must be >= 2");
  require(!antithetic || n_paths % 2 == 0, ErrorCode::InvalidArgument,
          "antithetic sampling needs an even n_paths");
}

void validate_vol(const VolSpec& vol) {
  if (const auto* c = std::get_if<ConstantVol>(&vol)) {
    require(c->sigma >= 0.0 && std::isfinite(c->sigma), ErrorCode::InvalidArgument,
            "constant volatility must be >= 0");
  } else {
    const auto& f = std::get<FullModel>(vol);
    require(f.f_min > 0.0 && f.f_min < f.f_max && std::isfinite(f.f_max),
            ErrorCode::InvalidArgument, "clamp needs 0 < f_min < f_max");
  }
}

double f_full(double y, double z, double alpha, const FullModel& clamp) noexcept {
  const double f = z * std::exp(y - alpha);
  if (!(f > clamp.f_min)) return clamp.f_min;
  return std::min(clamp.f_max, f);
}

std::vector<PathEnd> simulate_paths(const ModelParams& model, const VolSpec& vol,
                                    const MarketState& state, double maturity,
                                    const McConfig& cfg) {
  const Simulator sim(model, vol, state, maturity, cfg);
  const std::uint64_t n = sim.n_samples();
  const int m = sim.paths_per_sample();
  std::vector<PathEnd> out(n * m);
  const std::uint64_t n_blocks = (n + kBlockSamples - 1) / kBlockSamples;
  for_each_block(n_blocks, cfg.n_threads, [&](std::uint64_t b) {
    const std::uint64_t end = std::min(n, (b + 1) * kBlockSamples);
    for (std::uint64_t i = b * kBlockSamples; i < end; ++i) sim.run_sample(i, &out[i * m]);
  });
  return out;
}

McEstimate mc_expectation(const ModelParams& model, const VolSpec& vol,
                          const MarketState& state, double maturity, const McConfig& cfg,
                          const std::function<double(const PathEnd&)>& payoff) {
  const Simulator sim(model, vol, state, maturity, cfg);
  const std::uint64_t n = sim.n_samples();
  const int m = sim.paths_per_sample();
  const std::uint64_t n_blocks = (n + kBlockSamples - 1) / kBlockSamples;
  std::vector<Moments> blocks(n_blocks);

  for_each_block(n_blocks, cfg.n_threads, [&](std::uint64_t b) {
    Moments acc;
    PathEnd ends[2];
    const std::uint64_t end = std::min(n, (b + 1) * kBlockSamples);
    for (std::uint64_t i = b * kBlockSamples; i < end; ++i) {
      sim.run_sample(i, ends);
      double h = payoff(ends[0]);
      if (m == 2) h = 0.5 * (h + payoff(ends[1]));
      acc.add(h);
    }
    blocks[b] = acc;
  });

  Moments total;
  for (const auto& b : blocks) total.merge(b);
  const double disc = sim.discount();
  McEstimate est;
  est.price = disc * total.mean;
  est.std_error = disc * std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  est.n_paths = cfg.n_paths;
  est.n_steps = cfg.n_steps;
  est.seed = cfg.seed;
  return est;
}

McEstimate price_mc(const OptionSpec& spec, const ModelParams& model, const VolSpec& vol,
                    const MarketState& state, const McConfig& cfg) {
  spec.validate();
  const double T = spec.maturity;
  const double strike = spec.style == StrikeStyle::Fixed ? spec.strike_or_throw() : 0.0;
  const bool call = spec.kind == OptionKind::Call;
  std::function<double(const PathEnd&)> payoff;
  if (spec.style == StrikeStyle::Floating) {
    payoff = [call](const PathEnd& e) {
      const double x = std::exp(e.log_x);
      const double g = std::exp(e.log_g);
      return std::max(call ? x - g : g - x, 0.0);
    };
  } else {
    payoff = [call, strike](const PathEnd& e) {
      const double g = std::exp(e.log_g);
      return std::max(call ? g - strike : strike - g, 0.0);
    };
  }
  return mc_expectation(model, vol, state, T, cfg, payoff);
}

}  // namespace gao
