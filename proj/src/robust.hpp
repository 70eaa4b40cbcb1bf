#pragma once

#include <array>
#include <cmath>

namespace mdn {

// Modified Huber cost: e^2/2 inside the threshold, xi^2/2 outside.
inline double huber_cost(double e, double xi) {
  return std::abs(e) < xi ? 0.5 * e * e : 0.5 * xi * xi;
}

// Derivative of huber_cost; |e| == xi falls in the rejection branch.
inline double phi_score(double e, double xi) { return std::abs(e) < xi ? e : 0.0; }

inline double finite_sample_correction(int window) {
  return 1.483 * (1.0 + 5.0 / (window - 1));
}

struct ThresholdParams {
  double gamma = 0.99;
  double k_xi = 2.576;
  int n_w = 5;
  double sigma0_sq = 1.0;
};

// Median-based running estimate of the clean error power and the derived
// threshold xi = k_xi * sigma.
class ThresholdState {
 public:
  static constexpr int kMaxWindow = 31;

  ThresholdState() = default;

  double sigma_sq() const { return sigma_sq_; }
  double xi() const { return k_xi_ * std::sqrt(sigma_sq_); }
  double gamma() const { return gamma_; }
  double k_xi() const { return k_xi_; }
  double c_factor() const { return c_; }
  int n_w() const { return n_w_; }
  int filled() const { return filled_; }

  // Median of the squared errors currently held.
  double window_median() const;

  // Push e^2, refresh sigma^2, return the new threshold.
  double update(double e);

  friend ThresholdState init_threshold(const ThresholdParams& p);

 private:
  double sigma_sq_ = 1.0;
  double gamma_ = 0.99;
  double k_xi_ = 2.576;
  double c_ = finite_sample_correction(5);
  int n_w_ = 5;
  int filled_ = 0;
  int head_ = 0;
  std::array<double, kMaxWindow> window_{};
};

ThresholdState init_threshold(const ThresholdParams& p);

inline double update_threshold(ThresholdState& state, double e) { return state.update(e); }

}  // namespace mdn
