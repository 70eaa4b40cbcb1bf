#include "signals.hpp"

#include <cmath>
#include <complex>

namespace mdn {

std::string to_string(InputKind kind) {
  switch (kind) {
    case InputKind::White: return "white";
    case InputKind::Ar1: return "ar1";
    case InputKind::Ar2: return "ar2";
  }
  return "white";
}

InputKind parse_input_kind(const std::string& s) {
  if (s == "white" || s == "gaussian") return InputKind::White;
  if (s == "ar1") return InputKind::Ar1;
  if (s == "ar2") return InputKind::Ar2;
  fail(ErrorKind::Config, "unknown input kind '" + s + "'");
}

void InputModel::validate() const {
  require(sigma_delta_sq > 0.0, "innovation variance must be positive");
  switch (kind) {
    case InputKind::White: break;
    case InputKind::Ar1:
      require(std::abs(beta1) < 1.0, "AR(1) coefficient must satisfy |beta| < 1");
      break;
    case InputKind::Ar2: {
      // roots of z^2 - beta1 z - beta2
      const std::complex<double> disc = std::sqrt(std::complex<double>(beta1 * beta1 + 4.0 * beta2));
      const auto r1 = (beta1 + disc) / 2.0;
      const auto r2 = (beta1 - disc) / 2.0;
      require(std::abs(r1) < 1.0 && std::abs(r2) < 1.0,
              "AR(2) coefficients are not stationary");
      break;
    }
  }
}

double InputModel::variance() const {
  switch (kind) {
    case InputKind::White: return sigma_delta_sq;
    case InputKind::Ar1: return sigma_delta_sq / (1.0 - beta1 * beta1);
    case InputKind::Ar2: {
      const double a = beta1, b = beta2;
      return sigma_delta_sq * (1.0 - b) / ((1.0 + b) * ((1.0 - b) * (1.0 - b) - a * a));
    }
  }
  return sigma_delta_sq;
}

void NoiseModel::validate() const {
  require(sigma_g_sq >= 0.0, "background noise variance must be nonnegative");
  require(p_r >= 0.0 && p_r <= 1.0, "impulse probability must lie in [0, 1]");
  require(kappa >= 1.0, "impulse variance ratio kappa must be >= 1");
}

InputSource::InputSource(const InputModel& model, std::uint64_t seed, int burn_in)
    : model_(model), rng_(seed), innov_(0.0, std::sqrt(model.sigma_delta_sq)) {
  model_.validate();
  if (model_.kind != InputKind::White)
    for (int i = 0; i < burn_in; ++i) next();
}

double InputSource::next() {
  const double delta = innov_(rng_);
  double u = delta;
  switch (model_.kind) {
    case InputKind::White: break;
    case InputKind::Ar1: u += model_.beta1 * u1_; break;
    case InputKind::Ar2: u += model_.beta1 * u1_ + model_.beta2 * u2_; break;
  }
  u2_ = u1_;
  u1_ = u;
  return u;
}

NoiseSource::NoiseSource(const NoiseModel& model, std::uint64_t seed)
    : rng_(seed),
      background_(0.0, std::sqrt(model.sigma_g_sq)),
      impulse_(0.0, std::sqrt(model.kappa * model.sigma_g_sq)),
      gate_(model.p_r) {
  model.validate();
}

double NoiseSource::next() {
  // Fixed draw order keeps the stream aligned regardless of the gate outcome.
  const double g = background_(rng_);
  last_impulse_ = gate_(rng_);
  const double c = impulse_(rng_);
  return last_impulse_ ? g + c : g;
}

std::vector<double> gen_input(const InputModel& model, std::size_t length,
                              std::uint64_t seed, int burn_in) {
  require(length >= 1, "input length must be positive");
  InputSource src(model, seed, burn_in);
  std::vector<double> out(length);
  for (auto& x : out) x = src.next();
  return out;
}

std::vector<double> gen_noise(const NoiseModel& model, std::size_t length,
                              std::uint64_t seed) {
  NoiseSource src(model, seed);
  std::vector<double> out(length);
  for (auto& x : out) x = src.next();
  return out;
}

std::vector<double> gen_reference(std::span<const double> u, const Vec& w_star,
                                  std::span<const double> v) {
  require(u.size() == v.size(), "input and noise lengths differ");
  const auto M = static_cast<std::size_t>(w_star.size());
  std::vector<double> d(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M && j <= t; ++j) acc += w_star[j] * u[t - j];
    d[t] = acc + v[t];
  }
  return d;
}

}  // namespace mdn
