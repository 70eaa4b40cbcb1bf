#pragma once

#include "simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdn {

// Network-level matrices of the global error recursion.
struct NetworkMatrices {
  int N = 0;
  int M = 0;
  Mat C;      // [C]_{m,k} = alpha_{m,k}
  Mat Gamma;  // [P]_{k,m} = gamma_{k,m}
  Mat G;      // C^T (x) I_M
  Mat Q;      // I - P (x) I_M
  Vec w_star;  // col{w*_1, ..., w*_N}
  // zeta = mu eta G Q w*
  Vec zeta(double mu, double eta) const { return mu * eta * (G * (Q * w_star)); }
};

NetworkMatrices network_matrices(const Scenario& sc);

enum class UpdateProbabilityMode { Pilot, Analytic };

struct MomentOptions {
  long samples = 200000;  // S, regressor draws per input model
  UpdateProbabilityMode p_mode = UpdateProbabilityMode::Pilot;
  long pilot_updates = 2000;
  long pilot_window = 500;  // final updates counted by the pilot
  int pilot_trials = 20;
  bool fourth_order = true;  // estimate E{B_k (x) B_k}
  std::uint64_t seed = 1;
};

// Steady-state moment estimates feeding every theory formula.
struct MomentSet {
  int N = 0;
  int M = 0;
  int subbands = 1;
  double eta = 0.0;
  std::vector<std::vector<double>> p_upd;  // [node][subband]
  std::vector<std::vector<Mat>> EA;        // [node][subband] E{A_{k,i}}
  std::vector<Mat> EB_blocks;              // E{B_k}
  std::vector<Mat> EBB_blocks;             // E{B_k (x) B_k}, M^2 x M^2
  std::vector<Mat> ETT_blocks;             // block k of E{T T^T}
  Mat Q;
  double max_relative_se = 0.0;
  bool undersampled = false;  // relative standard error above 5%

  int dim() const { return N * M; }
  Mat EB() const;
  Mat EZ() const { return EB() + eta * Q; }
  Mat ETT() const;
  // E{Z W Z^T} without forming the N^2 M^2 Kronecker matrix.
  Mat apply_zz(const Mat& W) const;
  // Explicit E{Z (x) Z}; only for small networks.
  Mat dense_zz() const;
};

// Update probability under Gaussian background errors and rejected impulses.
double analytic_update_probability(double k_xi, double p_r);

// Pilot simulation estimate of P_{k,iD}: pass frequency over the final window.
std::vector<std::vector<double>> calibrate_update_probability(const Scenario& sc,
                                                              const MomentOptions& opt);

MomentSet estimate_moments(const Scenario& sc, const MomentOptions& opt);

double mean_step_bound(const MomentSet& m, double eta);

struct MsBound {
  double value = 0.0;      // min of the available bounds
  double companion = 0.0;  // Kronecker/companion-matrix form, 0 if unavailable
  double bisection = 0.0;  // largest mu with rho(F) < 1
  bool companion_available = false;
};

// K = I - mu A + mu^2 F stability bound: mu < min{1/lambda_max(A^{-1}F),
// 1/max positive real eigenvalue of [[A/2, -F/2], [I, 0]]}.
double companion_bound_dense(const Mat& A, const Mat& F);
// Same bound for A = EZ^T (x) I + I (x) EZ^T, F = EZ^T (x) EZ^T, evaluated
// pairwise on the eigenvalues of EZ.
double companion_bound_kron(const Mat& EZ);

// Spectral radius of the mean-square transition operator F at step mu.
double msd_spectral_radius(const MomentSet& m, const NetworkMatrices& net, double mu,
                           int iterations = 1500);

MsBound ms_step_bound(const MomentSet& m, const NetworkMatrices& net);

// Applies F: W -> G [W - mu EZ W - mu W EZ^T + mu^2 E{Z W Z^T}] G^T.
Mat apply_msd_operator(const MomentSet& m, const NetworkMatrices& net, double mu,
                       const Mat& W);
// Explicit N^2 M^2 matrix of the same operator, built column by column.
Mat dense_msd_operator(const MomentSet& m, const NetworkMatrices& net, double mu);

inline constexpr long kDefaultTheoryCap = 10000;

std::vector<Vec> mean_weight_error(const MomentSet& m, const NetworkMatrices& net,
                                   double mu, long n);
Vec mean_weight_error_fixed_point(const MomentSet& m, const NetworkMatrices& net, double mu);

// MSD(n), n = 0..T, in linear units.
std::vector<double> transient_msd(const MomentSet& m, const NetworkMatrices& net, double mu,
                                  long T, long cap = kDefaultTheoryCap);

// Closed-form MSD(infinity), linear units.
double steady_state_msd(const MomentSet& m, const NetworkMatrices& net, double mu,
                        long cap = kDefaultTheoryCap);

// CSV dump of a moment set (one matrix per section) and its reader.
void save_moments(const MomentSet& m, const std::string& path);
MomentSet load_moments(const std::string& path);

}  // namespace mdn
