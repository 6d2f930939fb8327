#include "hivmob/ties.hpp"

#include <cmath>
#include <ostream>

#include "hivmob/numfmt.hpp"

namespace hivmob {

namespace {

// Shewchuk's non-overlapping partials, increasing in magnitude; their sum is
// exactly the sum of the terms. Exact as long as no partial sum overflows.
std::vector<double> expansion(std::span<const double> terms) {
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t k = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      double hi = x + y;
      double lo = y - (hi - x);
      if (lo != 0.0) partials[k++] = lo;
      x = hi;
    }
    partials.resize(k);
    partials.push_back(x);
  }
  return partials;
}

int top_sign(std::span<const double> partials, double* top = nullptr) {
  for (auto it = partials.rbegin(); it != partials.rend(); ++it) {
    if (*it != 0.0) {
      if (top) *top = *it;
      return *it > 0.0 ? 1 : -1;
    }
  }
  return 0;
}

}  // namespace

int exact_sum_sign(std::span<const double> terms) {
  // Large terms are summed scaled by 2^-128 (exact: they stay normal), small
  // ones unscaled. A large scaled total dominates every small term; otherwise
  // its partials scale back without overflow and join the small terms.
  constexpr int kShift = 128;
  const double small_limit = std::ldexp(1.0, -800);
  std::vector<double> big, rest;
  for (double x : terms) {
    if (std::fabs(x) >= small_limit) {
      big.push_back(std::ldexp(x, -kShift));
    } else {
      rest.push_back(x);
    }
  }
  auto scaled = expansion(big);
  double top = 0.0;
  int sign = top_sign(scaled, &top);
  if (sign != 0 && std::fabs(top) >= std::ldexp(1.0, 900 - kShift)) return sign;
  for (double c : scaled) rest.push_back(std::ldexp(c, kShift));
  return top_sign(expansion(rest));
}

bool at_least_mean(std::span<const double> candidates, std::size_t i) {
  // c_i >= mean  <=>  sum_j c_j - N c_i <= 0, with N c_i spelled as N additions.
  std::vector<double> terms(candidates.begin(), candidates.end());
  terms.insert(terms.end(), candidates.size(), -candidates[i]);
  return exact_sum_sign(terms) <= 0;
}

TieSet strong_ties(const FlowMatrix& m) {
  const std::size_t D = m.values.rows();
  TieSet out;
  out.departments = m.departments;
  out.ties.resize(D);
  std::vector<double> flows;
  for (std::size_t a = 0; a < D; ++a) {
    flows.clear();
    auto& ties = out.ties[a];
    for (std::size_t b = 0; b < D; ++b) {
      double c = m.values(a, b);
      if (b == a || c == 0.0) continue;
      flows.push_back(c);
      ties.push_back({b, c, 0.0, false, 0.0});
    }
    if (ties.empty()) continue;
    double mean = 0.0;
    for (double c : flows) mean += c;
    mean /= static_cast<double>(flows.size());
    double max_strong = 0.0;
    for (std::size_t i = 0; i < ties.size(); ++i) {
      Tie& t = ties[i];
      t.strong = at_least_mean(flows, i);
      t.strength = t.flow / mean;
      // Keep the reported ratio on the side of 1 the exact test chose.
      if (t.strong && t.strength < 1.0) t.strength = 1.0;
      if (!t.strong && t.strength >= 1.0) t.strength = std::nextafter(1.0, 0.0);
      if (t.strong) max_strong = std::max(max_strong, t.flow);
    }
    for (Tie& t : ties) t.relative = t.strong ? t.flow / max_strong : 0.0;
  }
  return out;
}

void write_ties_tsv(std::ostream& out, const TieSet& ties, std::string_view manifest_hash) {
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "dept\tpeer\tflow\tstrength\tclass\trelative\n";
  std::string line;
  for (std::size_t a = 0; a < ties.ties.size(); ++a) {
    for (const Tie& t : ties.ties[a]) {
      line = std::to_string(ties.departments[a]) + '\t' + std::to_string(ties.departments[t.peer]) + '\t';
      append_double(line, t.flow);
      line += '\t';
      append_double(line, t.strength);
      line += t.strong ? "\tstrong\t" : "\tweak\t";
      append_double(line, t.relative);
      out << line << '\n';
    }
  }
}

}  // namespace hivmob
