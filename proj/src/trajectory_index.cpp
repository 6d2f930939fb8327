#include "hivmob/trajectory_index.hpp"

#include <algorithm>
#include <numeric>

namespace hivmob {

TrajectoryIndex::TrajectoryIndex(std::span<const TrajectoryRecord> records, const SpatialHierarchy& h) {
  std::vector<std::size_t> order;
  order.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (h.subpref_index(records[i].subpref)) {
      order.push_back(i);
    } else {
      ++skipped_;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.user_id != rb.user_id) return ra.user_id < rb.user_id;
    return ra.at < rb.at;
  });
  points_.reserve(order.size());
  for (std::size_t i : order) {
    const auto& r = records[i];
    if (users_.empty() || users_.back() != r.user_id) {
      if (!users_.empty()) offsets_.push_back(points_.size());
      users_.push_back(r.user_id);
    }
    auto sp = *h.subpref_index(r.subpref);
    auto dept = *h.department_of_subpref(r.subpref);
    points_.push_back({r.at, static_cast<std::uint32_t>(sp), static_cast<std::uint32_t>(dept)});
  }
  if (!users_.empty()) offsets_.push_back(points_.size());
}

std::optional<std::size_t> TrajectoryIndex::find_user(std::string_view id) const {
  auto it = std::lower_bound(users_.begin(), users_.end(), id);
  if (it == users_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - users_.begin());
}

}  // namespace hivmob
