#include "robust.hpp"

#include "common.hpp"

#include <algorithm>

namespace mdn {

ThresholdState init_threshold(const ThresholdParams& p) {
  require(p.gamma > 0.0 && p.gamma < 1.0, "forgetting factor must satisfy 0 < gamma < 1");
  require(p.n_w >= 1 && p.n_w % 2 == 1 && p.n_w <= ThresholdState::kMaxWindow,
          "median window length must be odd and at most 31");
  require(p.sigma0_sq > 0.0, "initial error power must be positive");
  require(p.k_xi > 0.0, "threshold multiplier must be positive");
  ThresholdState s;
  s.gamma_ = p.gamma;
  s.k_xi_ = p.k_xi;
  s.n_w_ = p.n_w;
  // C is undefined for a single-sample window; use the large-window limit.
  s.c_ = p.n_w > 1 ? finite_sample_correction(p.n_w) : 1.483;
  s.sigma_sq_ = p.sigma0_sq;
  return s;
}

double ThresholdState::window_median() const {
  if (filled_ == 0) return 0.0;
  std::array<double, kMaxWindow> tmp{};
  std::copy_n(window_.begin(), filled_, tmp.begin());
  const auto mid = tmp.begin() + filled_ / 2;
  std::nth_element(tmp.begin(), mid, tmp.begin() + filled_);
  if (filled_ % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(tmp.begin(), mid);
  return 0.5 * (lower + upper);
}

double ThresholdState::update(double e) {
  window_[head_] = e * e;
  head_ = (head_ + 1) % n_w_;
  if (filled_ < n_w_) ++filled_;
  sigma_sq_ = gamma_ * sigma_sq_ + c_ * (1.0 - gamma_) * window_median();
  return xi();
}

}  // namespace mdn
