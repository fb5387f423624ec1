#pragma once

#include <string>
#include <vector>

#include "ricyl/fd_oracle.hpp"

namespace ricyl {

struct OracleSuiteConfig {
  std::vector<double> lengths{6.283185307179586, 6.283185307179586};
  double a = 0.0, b = 2.0;
  int nr = 64, nx = 16;
  int order = 2;
  std::vector<double> epsilon{1e-1, 3e-2, 1e-2};
  int remainder_nr = 48, remainder_nx = 24;
  int remainder_order = 4;
};

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  // grid errors at (nr, nx) and (2nr, 2nx), for convergence checks
  double coarse = 0.0, fine = 0.0;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  RemainderScan remainder;
  bool all_pass() const;
};

// Operator convergence, flat-background identities and the quadratic remainder scan.
OracleReport run_oracle_suite(const OracleSuiteConfig& cfg);

}  // namespace ricyl
