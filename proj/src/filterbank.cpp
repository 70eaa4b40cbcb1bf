#include "filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace mdn {

void AnalysisBank::validate() const {
  require(subbands >= 1, "bank needs at least one subband");
  require(static_cast<int>(filters.size()) == subbands, "bank filter count mismatch");
  const auto len = filters[0].size();
  require(len >= 1, "bank filters are empty");
  for (const auto& h : filters)
    require(h.size() == len, "all bank filters must share one length");
}

namespace {

constexpr double kPi = std::numbers::pi;

AnalysisBank modulate(int subbands, int length, double cutoff) {
  AnalysisBank bank;
  bank.subbands = subbands;
  bank.prototype.resize(length);
  const double c = (length - 1) / 2.0;
  for (int m = 0; m < length; ++m) {
    const double x = m - c;  // never zero: length is even
    const double hamming = 0.54 - 0.46 * std::cos(2.0 * kPi * m / (length - 1));
    bank.prototype[m] = std::sin(cutoff * x) / (kPi * x) * hamming;
  }
  bank.filters.assign(subbands, std::vector<double>(length));
  for (int i = 0; i < subbands; ++i) {
    const double phase = (i % 2 == 0 ? 1.0 : -1.0) * kPi / 4.0;
    for (int m = 0; m < length; ++m)
      bank.filters[i][m] = 2.0 * bank.prototype[m] *
                           std::cos(kPi / subbands * (i + 0.5) * (m - c) + phase);
  }
  return bank;
}

double ripple_of(const std::vector<double>& s) {
  auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return 10.0 * std::log10(*hi / *lo);
}

}  // namespace

std::vector<double> power_complementarity(const AnalysisBank& bank, int points) {
  std::vector<double> out(points, 0.0);
  for (int p = 0; p < points; ++p) {
    const double w = kPi * p / (points - 1);
    double total = 0.0;
    for (const auto& h : bank.filters) {
      double re = 0.0, im = 0.0;
      for (std::size_t m = 0; m < h.size(); ++m) {
        re += h[m] * std::cos(w * m);
        im -= h[m] * std::sin(w * m);
      }
      total += re * re + im * im;
    }
    out[p] = total;
  }
  return out;
}

double power_ripple_db(const AnalysisBank& bank, int points) {
  return ripple_of(power_complementarity(bank, points));
}

AnalysisBank design_bank(int subbands, int prototype_length) {
  require(subbands >= 1, "subband count must be positive");
  if (subbands == 1) {
    AnalysisBank id;
    id.subbands = 1;
    id.prototype = {1.0};
    id.filters = {{1.0}};
    return id;
  }
  require(prototype_length > 0 && prototype_length % (2 * subbands) == 0,
          "prototype length must be a positive multiple of 2*N_D");

  const double nominal = kPi / (2.0 * subbands);
  constexpr int kGrid = 256;
  auto ripple_at = [&](double scale) {
    return ripple_of(power_complementarity(modulate(subbands, prototype_length, nominal * scale), kGrid));
  };
  // Coarse scan, then a refined scan around the best coarse point.
  double best = 1.0, best_r = ripple_at(1.0);
  for (double s = 0.80; s <= 1.5001; s += 0.01) {
    const double r = ripple_at(s);
    if (r < best_r) best_r = r, best = s;
  }
  const double centre = best;
  for (int k = -20; k <= 20; ++k) {
    const double s = centre + 0.0005 * k;
    const double r = ripple_at(s);
    if (r < best_r) best_r = r, best = s;
  }

  AnalysisBank bank = modulate(subbands, prototype_length, nominal * best);
  const auto pc = power_complementarity(bank, 1024);
  const double mean = std::accumulate(pc.begin(), pc.end(), 0.0) / pc.size();
  const double g = 1.0 / std::sqrt(mean);
  for (auto& x : bank.prototype) x *= g;
  for (auto& h : bank.filters)
    for (auto& x : h) x *= g;
  return bank;
}

std::vector<std::vector<double>> analyze(std::span<const double> signal,
                                         const AnalysisBank& bank) {
  std::vector<std::vector<double>> out;
  out.reserve(bank.filters.size());
  for (const auto& h : bank.filters) {
    std::vector<double> y(signal.size(), 0.0);
    for (std::size_t t = 0; t < signal.size(); ++t) {
      double acc = 0.0;
      const std::size_t taps = std::min(h.size(), t + 1);
      for (std::size_t m = 0; m < taps; ++m) acc += h[m] * signal[t - m];
      y[t] = acc;
    }
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<double> decimate(std::span<const double> signal, int factor) {
  require(factor >= 1, "decimation factor must be positive");
  std::vector<double> out;
  out.reserve(signal.size() / factor + 1);
  for (std::size_t t = 0; t < signal.size(); t += factor) out.push_back(signal[t]);
  return out;
}

std::vector<std::vector<double>> decimate(const std::vector<std::vector<double>>& subbands,
                                          int factor) {
  std::vector<std::vector<double>> out;
  out.reserve(subbands.size());
  for (const auto& s : subbands) out.push_back(decimate(std::span<const double>(s), factor));
  return out;
}

std::vector<Vec> subband_regressors(const std::vector<std::vector<double>>& subbands,
                                    long n, int M, int factor) {
  std::vector<Vec> out;
  out.reserve(subbands.size());
  const long t = n * factor;
  for (const auto& s : subbands) {
    Vec r = Vec::Zero(M);
    for (int j = 0; j < M; ++j) {
      const long idx = t - j;
      if (idx >= 0 && idx < static_cast<long>(s.size())) r[j] = s[idx];
    }
    out.push_back(std::move(r));
  }
  return out;
}

AnalysisBank parse_bank_text(const std::string& text) {
  AnalysisBank bank;
  std::istringstream in(text);
  std::string line;
  std::vector<double> current;
  auto flush = [&] {
    if (!current.empty()) bank.filters.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      flush();
      continue;
    }
    if (line[first] == '#') continue;
    try {
      current.push_back(std::stod(line.substr(first)));
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "bank file: bad coefficient '" + line + "'");
    }
  }
  flush();
  require(!bank.filters.empty(), "bank file holds no filters", ErrorKind::Config);
  bank.subbands = static_cast<int>(bank.filters.size());
  try {
    bank.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("bank file: ") + e.what());
  }
  return bank;
}

AnalysisBank load_bank_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open bank file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bank_text(ss.str());
}

std::string format_bank_text(const AnalysisBank& bank) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < bank.filters.size(); ++i) {
    if (i) out << '\n';
    for (double c : bank.filters[i]) out << c << '\n';
  }
  return out.str();
}

SubbandAnalyzer::SubbandAnalyzer(const AnalysisBank& bank, int M)
    : bank_(&bank),
      u_hist_(bank.length()),
      d_hist_(bank.length()),
      sub_u_(bank.filters.size(), DelayLine(M)) {}

void SubbandAnalyzer::push(double u, double d) {
  u_hist_.push(u);
  d_hist_.push(d);
  const auto x = u_hist_.window();
  for (std::size_t i = 0; i < sub_u_.size(); ++i) {
    const auto& h = bank_->filters[i];
    double acc = 0.0;
    for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * x[m];
    sub_u_[i].push(acc);
  }
}

double SubbandAnalyzer::reference(int i) const {
  const auto& h = bank_->filters[i];
  const auto x = d_hist_.window();
  double acc = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * x[m];
  return acc;
}

}  // namespace mdn
