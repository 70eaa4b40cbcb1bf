#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidArgument,
  Config,
  Io,
  Unstable,
  Capacity,
};

// All library failures are reported as mdn::Error; the C API maps kind() onto
// its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what,
                    ErrorKind kind = ErrorKind::InvalidArgument) {
  if (!cond) fail(kind, what);
}

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamRole : std::uint64_t {
  Input = 1,
  Noise = 2,
  Target = 3,
  Pilot = 4,
  Moments = 5,
};

// Seed for one random stream. Depends only on its own coordinates, so adding
// trials or nodes never perturbs existing streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t node, StreamRole role) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (trial * 0x100000001b3ULL + 1));
  h = mix64(h ^ (node * 0xc2b2ae3d27d4eb4fULL + 2));
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  return h;
}

}  // namespace mdn
