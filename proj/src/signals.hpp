#pragma once

#include "common.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mdn {

enum class InputKind { White, Ar1, Ar2 };

std::string to_string(InputKind kind);
InputKind parse_input_kind(const std::string& s);

struct InputModel {
  InputKind kind = InputKind::White;
  double beta1 = 0.0;  // AR(1): beta1; AR(2): first-lag coefficient
  double beta2 = 0.0;  // AR(2) second-lag coefficient
  double sigma_delta_sq = 1.0;

  static InputModel white(double var = 1.0) { return {InputKind::White, 0, 0, var}; }
  static InputModel ar1(double b, double var = 1.0) { return {InputKind::Ar1, b, 0, var}; }
  static InputModel ar2(double b1, double b2, double var = 1.0) {
    return {InputKind::Ar2, b1, b2, var};
  }

  // Throws on non-stationary coefficients.
  void validate() const;
  // Stationary variance of the process.
  double variance() const;
};

struct NoiseModel {
  double sigma_g_sq = 1.0;
  double p_r = 0.0;
  double kappa = 1.0;  // impulse variance ratio, sigma_c^2 = kappa * sigma_g^2

  void validate() const;
};

// Streaming zero-mean AR input; the constructor discards the warm-up prefix.
class InputSource {
 public:
  InputSource(const InputModel& model, std::uint64_t seed, int burn_in);
  double next();

 private:
  InputModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> innov_;
  double u1_ = 0.0;
  double u2_ = 0.0;
};

// Contaminated Gaussian noise v = v_g + b*c.
class NoiseSource {
 public:
  NoiseSource(const NoiseModel& model, std::uint64_t seed);
  double next();
  // Bernoulli gate of the most recent sample.
  bool last_impulse() const { return last_impulse_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> background_;
  std::normal_distribution<double> impulse_;
  std::bernoulli_distribution gate_;
  bool last_impulse_ = false;
};

// Burn-in used for AR warm start.
inline int default_burn_in(int M) { return 10 * M; }

std::vector<double> gen_input(const InputModel& model, std::size_t length,
                              std::uint64_t seed, int burn_in);
std::vector<double> gen_noise(const NoiseModel& model, std::size_t length,
                              std::uint64_t seed);
// d(t) = u(t)^T w* + v(t) with u(t) = [u(t), u(t-1), ..., u(t-M+1)].
std::vector<double> gen_reference(std::span<const double> u, const Vec& w_star,
                                  std::span<const double> v);

}  // namespace mdn
