#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hivmob/flows.hpp"
#include "hivmob/hierarchy.hpp"
#include "hivmob/matrix.hpp"
#include "hivmob/records.hpp"
#include "hivmob/trajectory_index.hpp"

namespace hivmob {

enum class Family { connectivity, spatial, migration, activity };

inline constexpr std::array<Family, 4> kFamilies{Family::connectivity, Family::spatial, Family::migration,
                                                 Family::activity};
inline constexpr std::size_t kConnectivityColumns = 120;
inline constexpr std::size_t kSpatialColumns = 25;
inline constexpr std::size_t kMigrationColumns = 22;
inline constexpr std::size_t kActivityColumns = 57;
inline constexpr std::size_t kFeatureColumns = 224;

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);
/// Family from the name prefix (conn_, spat_, mig_, act_).
std::optional<Family> family_of(std::string_view feature_name);

struct FeatureColumn {
  std::string name;
  Family family = Family::activity;
  std::string slot;           // time slot or subset the column covers, "" when whole window
  std::string normalization;  // how raw values were scaled
  std::string note;           // imputation / degenerate-data flags, "" when none
};

struct FeatureMatrix {
  std::vector<DeptId> departments;  // rows
  std::vector<FeatureColumn> columns;
  Matrix values;

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::vector<std::size_t> family_columns(Family f) const;
  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
};

/// Horizontal concatenation; row labels must agree.
FeatureMatrix concat_columns(std::span<const FeatureMatrix> parts);

/// Type-7 percentile (linear interpolation between order statistics); values need not be sorted.
double percentile(std::vector<double> values, double p);

/// Users homed in each department, as doubles.
std::vector<double> resident_counts(const HomeAssignment& homes, std::size_t n_departments);

FeatureMatrix connectivity_features(std::span<const AntennaRecord> records, const SpatialHierarchy& h,
                                    std::span<const double> populations);
FeatureMatrix spatial_features(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h);
FeatureMatrix migration_features(std::span<const Stay> stays, const HomeAssignment& homes, const SpatialHierarchy& h);
FeatureMatrix activity_features(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h);

struct FeatureInputs {
  std::span<const AntennaRecord> antenna;
  const TrajectoryIndex* index = nullptr;
  const HomeAssignment* homes = nullptr;
  std::span<const Stay> stays;
  std::span<const double> populations;  // rescaled, hierarchy order
};

/// All four families in order connectivity, spatial, migration, activity.
FeatureMatrix extract_features(const FeatureInputs& in, const SpatialHierarchy& h);

/// Each column divided by its mean over rows; zero-mean columns left as they are and flagged.
FeatureMatrix normalize_by_mean(const FeatureMatrix& m);

void write_features_tsv(std::ostream& out, const FeatureMatrix& m, std::string_view manifest_hash = {});
/// Families are recovered from the column name prefixes.
FeatureMatrix read_features_tsv(std::istream& in);
void write_features_sidecar(std::ostream& out, const FeatureMatrix& m, std::string_view manifest_hash = {});

}  // namespace hivmob
