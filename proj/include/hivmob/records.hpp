#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivmob/time.hpp"

namespace hivmob {

using AntennaId = std::uint32_t;
using SubprefId = std::uint32_t;
using DeptId = std::uint32_t;
using RegionId = std::uint32_t;

/// One hourly antenna-to-antenna traffic aggregate.
struct AntennaRecord {
  Timestamp hour_start;
  AntennaId origin = 0;
  AntennaId dest = 0;
  std::uint64_t n_calls = 0;
  double total_duration = 0.0;  // seconds

  friend bool operator==(const AntennaRecord&, const AntennaRecord&) = default;
};

/// One located user event at sub-prefecture resolution.
struct TrajectoryRecord {
  std::string user_id;
  Timestamp at;
  SubprefId subpref = 0;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::vector<LineError> errors, const std::string& what)
      : std::runtime_error(what), errors_(std::move(errors)) {}
  const std::vector<LineError>& errors() const { return errors_; }

 private:
  std::vector<LineError> errors_;
};

struct ParseOptions {
  /// Malformed lines tolerated before the parse fails.
  std::size_t max_errors = 0;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<LineError> errors;
  std::size_t dropped_zero_calls = 0;  // antenna rows with n_calls == 0
};

ParseResult<AntennaRecord> parse_antenna_records(std::istream& in, const ParseOptions& opts = {});
ParseResult<TrajectoryRecord> parse_trajectory_records(std::istream& in,
                                                       const ParseOptions& opts = {});

void write_antenna_records(std::ostream& out, std::span<const AntennaRecord> records);
void write_trajectory_records(std::ostream& out, std::span<const TrajectoryRecord> records);

std::string format_antenna_record(const AntennaRecord& r);
std::string format_trajectory_record(const TrajectoryRecord& r);

}  // namespace hivmob
