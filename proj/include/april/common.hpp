#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace april {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  invalid_argument,
  corpus_format,
  gold_unavailable,
  budget_exhausted,
  db_format,
  checksum_mismatch,
  cluster_mismatch,
  singular_system,
  non_finite,
  guard_exceeded,
  not_found,
  conflict,
  not_ready,
  io,
  not_implemented,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::corpus_format: return "corpus_format";
    case ErrorCode::gold_unavailable: return "gold_utility_unavailable";
    case ErrorCode::budget_exhausted: return "budget_exhausted";
    case ErrorCode::db_format: return "db_format";
    case ErrorCode::checksum_mismatch: return "checksum_mismatch";
    case ErrorCode::cluster_mismatch: return "cluster_mismatch";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::guard_exceeded: return "guard_exceeded";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::not_ready: return "not_ready";
    case ErrorCode::io: return "io";
    case ErrorCode::not_implemented: return "not_implemented";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code so the
/// CLI and the HTTP service can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

/// Which summary of an ordered pair the user (or oracle) picked.
enum class Direction { left_preferred, right_preferred };

inline const char* to_string(Direction d) {
  return d == Direction::left_preferred ? "left" : "right";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "left") return Direction::left_preferred;
  if (s == "right") return Direction::right_preferred;
  throw Error(ErrorCode::invalid_argument, "bad direction: " + std::string(s));
}

// Logistic 1/(1+exp(-x)) written so that logistic(x) + logistic(-x) == 1
// exactly in floating point: the value for negative x is the complement of
// one that lies in [0.5, 1], and that subtraction is exact.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  return 1.0 - 1.0 / (1.0 + std::exp(x));
}

// log(logistic(x)) without overflow.
inline double log_logistic(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

// FNV-1a, used for file checksums and config hashes.
inline std::uint64_t fnv1a(std::string_view data,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

// splitmix64 finalizer; child seeds are derived by folding values into it.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return derive_seed(seed, fnv1a(tag));
}

}  // namespace april
