#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hivmob/matrix.hpp"
#include "hivmob/regress.hpp"

namespace hivmob {

struct ContributionConfig {
  std::size_t m = 12;            // probe points per feature
  std::size_t iterations = 100;  // Monte-Carlo baselines per probe
  std::uint64_t seed = 1;
  bool joint_rows = false;  // sample baseline instances as whole rows instead of per column

  void check() const;
};

enum class Sign { positive, negative, indeterminate };
std::string_view to_string(Sign s);

struct ContributionCurve {
  std::size_t feature = 0;  // column in the data matrix
  std::string name;
  std::vector<double> probes;  // strictly increasing, observed min to max
  std::vector<double> mean;
  std::vector<double> std;     // sample standard deviation over iterations
  std::vector<Sign> sign;      // indeterminate iff |mean| <= std
  bool degenerate = false;     // zero observed range: a single probe
};

/// Baseline instances draw the model's features from their observed columns; instance
/// B copies A with `feature` set to the probe value. Baselines are shared by all probe
/// points of a feature (streams keyed by seed, feature and iteration).
ContributionCurve contribution_curve(const FittedModel& model, const Matrix& data, std::size_t feature,
                                     const ContributionConfig& cfg, std::string name = {});

/// Survivors of whole-data RFE down to k columns, ascending. Throws ConfigError when k exceeds the columns.
std::vector<std::size_t> top_features(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                                      std::size_t k = 3);

struct SignRange {
  Sign sign = Sign::indeterminate;
  std::size_t first = 0;  // probe indices, inclusive
  std::size_t last = 0;
  double from = 0.0;  // probe values
  double to = 0.0;
};

/// Maximal runs of probes sharing a sign class.
std::vector<SignRange> classify_ranges(const ContributionCurve& curve);

/// "at the maximum observed value, expected prevalence is 0.3 +- 0.15 higher than average"
std::string readout(const ContributionCurve& curve);

}  // namespace hivmob
