#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hivmob/flows.hpp"

namespace hivmob {

struct Tie {
  std::size_t peer = 0;   // department index
  double flow = 0.0;      // candidate flow c(i)
  double strength = 0.0;  // s(i) = c(i) / mean of the department's candidate flows
  bool strong = false;    // s(i) >= 1, decided exactly
  double relative = 0.0;  // c(i) / max flow among strong ties; 0 for weak ties
};

struct TieSet {
  std::vector<DeptId> departments;
  std::vector<std::vector<Tie>> ties;  // per department, candidates in peer order
};

/// Sign of the exact real sum of `terms` (-1, 0, 1); exact for finite inputs.
int exact_sum_sign(std::span<const double> terms);

/// Whether candidates[i] >= mean(candidates), evaluated without rounding.
bool at_least_mean(std::span<const double> candidates, std::size_t i);

/// Candidates are the nonzero off-diagonal entries of each row.
TieSet strong_ties(const FlowMatrix& m);

void write_ties_tsv(std::ostream& out, const TieSet& ties, std::string_view manifest_hash = {});

}  // namespace hivmob
