#pragma once

#include "common.hpp"

#include <span>
#include <string>
#include <vector>

namespace mdn {

// N_D analysis filters of common length L_p.
struct AnalysisBank {
  int subbands = 1;
  std::vector<double> prototype;
  std::vector<std::vector<double>> filters;

  int length() const { return filters.empty() ? 0 : static_cast<int>(filters[0].size()); }
  void validate() const;
};

inline int default_prototype_length(int subbands) { return 8 * subbands; }

// Cosine-modulated pseudo-QMF bank from a Hamming-windowed sinc prototype.
// The prototype cutoff is tuned near pi/(2 N_D) for the flattest sum of
// squared magnitude responses, and the bank is scaled to unit mean power.
AnalysisBank design_bank(int subbands, int prototype_length);

// sum_i |H_i(e^{jw})|^2 on `points` frequencies uniformly covering [0, pi].
std::vector<double> power_complementarity(const AnalysisBank& bank, int points = 1024);
// Peak-to-peak of power_complementarity in dB.
double power_ripple_db(const AnalysisBank& bank, int points = 1024);

// Full-rate subband signals; subband i is signal * filter i with zero state.
std::vector<std::vector<double>> analyze(std::span<const double> signal,
                                         const AnalysisBank& bank);
// output(n) = input(n * N_D).
std::vector<std::vector<double>> decimate(const std::vector<std::vector<double>>& subbands,
                                          int factor);
std::vector<double> decimate(std::span<const double> signal, int factor);
// u_{k,i}(n) = [u_i(n N_D), u_i(n N_D - 1), ..., u_i(n N_D - M + 1)], zero before t = 0.
std::vector<Vec> subband_regressors(const std::vector<std::vector<double>>& subbands,
                                    long n, int M, int factor);

// Plain text: one coefficient per line, filters separated by blank lines.
AnalysisBank parse_bank_text(const std::string& text);
AnalysisBank load_bank_file(const std::string& path);
std::string format_bank_text(const AnalysisBank& bank);

// Newest-first delay line with contiguous windows (double-write ring buffer).
class DelayLine {
 public:
  explicit DelayLine(int length = 1)
      : len_(length), pos_(length), buf_(2 * static_cast<std::size_t>(length), 0.0) {}
  void push(double x) {
    pos_ = (pos_ == 0) ? len_ - 1 : pos_ - 1;
    buf_[pos_] = x;
    buf_[pos_ + len_] = x;
  }
  // window()[j] is the sample pushed j steps ago.
  std::span<const double> window() const {
    return {buf_.data() + (pos_ == len_ ? 0 : pos_), static_cast<std::size_t>(len_)};
  }
  int length() const { return len_; }
  void clear() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    pos_ = len_;
  }

 private:
  int len_;
  int pos_;
  std::vector<double> buf_;
};

// Streaming analysis for one node: keeps every subband's recent full-rate
// input history and filters the reference only at decimation instants.
class SubbandAnalyzer {
 public:
  SubbandAnalyzer(const AnalysisBank& bank, int M);

  // Consume one full-rate sample pair.
  void push(double u, double d);
  int subbands() const { return static_cast<int>(bank_->filters.size()); }
  // Regressor of subband i at the current time, newest first.
  std::span<const double> regressor(int i) const { return sub_u_[i].window(); }
  // d_i(t) at the current time.
  double reference(int i) const;

 private:
  const AnalysisBank* bank_;
  DelayLine u_hist_;
  DelayLine d_hist_;
  std::vector<DelayLine> sub_u_;
};

}  // namespace mdn
