#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace explab {

// Row-major throughout: subset scans and operator compressions walk rows.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

enum class ErrorCode {
  invalid_argument,   // bad sizes, bad indices, malformed structures
  tolerance,          // a numerical invariant failed at its tolerance
  parse,              // malformed input file; CLI exit code 2
  cap_exceeded,       // enumeration past the configured cap; CLI exit code 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Default tolerances; every one can be overridden per call or via the CLI
// --tolerance key=value flag.
struct Tolerances {
  double row_sum = 1e-12;           // row-stochasticity, absolute per row
  double detailed_balance = 1e-10;  // |m(x)P(x,y) - m(y)P(y,x)|, absolute
  double eigen = 1e-9;              // eigenvalue comparisons
  double metric = 1e-12;            // metric axioms
  double identity = 1e-10;          // operator identities
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t;
  return t;
}

// Subsets of atoms are carried as strictly increasing index lists; reports
// break ties between equal-ratio subsets by this order.
using AtomSet = std::vector<int>;

inline bool lex_less(const AtomSet& a, const AtomSet& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline AtomSet mask_to_set(std::uint32_t mask, int offset = 0) {
  AtomSet out;
  for (int i = 0; mask >> i; ++i)
    if (mask >> i & 1u) out.push_back(i + offset);
  return out;
}

inline std::uint32_t set_to_mask(const AtomSet& a, int n) {
  std::uint32_t mask = 0;
  for (int i : a) {
    if (i < 0 || i >= n) fail(ErrorCode::invalid_argument, "atom index " + std::to_string(i) + " out of range");
    mask |= 1u << i;
  }
  return mask;
}

// Hard ceiling for 2^n subset scans; callers may lower it per run.
inline constexpr int kEnumerationCap = 22;

}  // namespace explab
