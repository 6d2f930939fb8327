#pragma once

#include <span>
#include <string>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/records.hpp"

namespace hivmob {

struct TrackPoint {
  Timestamp at;
  std::uint32_t subpref = 0;     // hierarchy sub-prefecture index
  std::uint32_t department = 0;  // hierarchy department index
};

/// Trajectory records grouped per user. Users are sorted by id; each user's
/// points are in time order, ties kept in input order.
class TrajectoryIndex {
 public:
  TrajectoryIndex() = default;
  /// Records with an unknown sub-prefecture are skipped and counted.
  TrajectoryIndex(std::span<const TrajectoryRecord> records, const SpatialHierarchy& h);

  std::size_t user_count() const { return users_.size(); }
  const std::string& user_id(std::size_t u) const { return users_[u]; }
  std::span<const TrackPoint> track(std::size_t u) const {
    return {points_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::optional<std::size_t> find_user(std::string_view id) const;
  std::size_t skipped() const { return skipped_; }

 private:
  std::vector<std::string> users_;
  std::vector<std::size_t> offsets_{0};
  std::vector<TrackPoint> points_;
  std::size_t skipped_ = 0;
};

}  // namespace hivmob
