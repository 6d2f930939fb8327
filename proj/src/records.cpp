#include "hivmob/records.hpp"

#include <limits>
#include <optional>

#include "hivmob/numfmt.hpp"

namespace hivmob {

namespace {

template <typename T>
std::optional<T> narrow_id(std::string_view s) {
  auto v = parse_uint(s);
  if (!v || *v > std::numeric_limits<T>::max()) return std::nullopt;
  return static_cast<T>(*v);
}

template <typename Record, typename LineFn>
ParseResult<Record> parse_lines(std::istream& in, const ParseOptions& opts, LineFn&& parse_line) {
  ParseResult<Record> result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = rtrim(line);
    if (view.empty()) continue;
    std::string message;
    if (!parse_line(view, result, message)) {
      result.errors.push_back({lineno, message});
      if (result.errors.size() > opts.max_errors) {
        throw ParseError(result.errors,
                         "line " + std::to_string(lineno) + ": " + result.errors.back().message);
      }
    }
  }
  return result;
}

}  // namespace

ParseResult<AntennaRecord> parse_antenna_records(std::istream& in, const ParseOptions& opts) {
  return parse_lines<AntennaRecord>(
      in, opts, [](std::string_view line, ParseResult<AntennaRecord>& res, std::string& msg) {
        auto f = split_tabs(line);
        if (f.size() != 5) {
          msg = "expected 5 tab-separated fields, got " + std::to_string(f.size());
          return false;
        }
        auto hour = parse_hour_stamp(f[0]);
        if (!hour) {
          msg = "bad hour stamp '" + std::string(f[0]) + "'";
          return false;
        }
        auto origin = narrow_id<AntennaId>(f[1]);
        auto dest = narrow_id<AntennaId>(f[2]);
        if (!origin || !dest) {
          msg = "bad antenna id";
          return false;
        }
        auto calls = parse_uint(f[3]);
        if (!calls) {
          msg = "n_calls must be a non-negative integer, got '" + std::string(f[3]) + "'";
          return false;
        }
        auto dur = parse_double(f[4]);
        if (!dur || *dur < 0.0) {
          msg = "total_duration must be a non-negative number, got '" + std::string(f[4]) + "'";
          return false;
        }
        if (*calls == 0) {
          ++res.dropped_zero_calls;
          return true;
        }
        res.records.push_back({*hour, *origin, *dest, *calls, *dur});
        return true;
      });
}

ParseResult<TrajectoryRecord> parse_trajectory_records(std::istream& in, const ParseOptions& opts) {
  return parse_lines<TrajectoryRecord>(
      in, opts, [](std::string_view line, ParseResult<TrajectoryRecord>& res, std::string& msg) {
        auto f = split_tabs(line);
        if (f.size() != 3) {
          msg = "expected 3 tab-separated fields, got " + std::to_string(f.size());
          return false;
        }
        if (f[0].empty()) {
          msg = "empty user id";
          return false;
        }
        auto at = parse_timestamp(f[1]);
        if (!at) {
          msg = "bad timestamp '" + std::string(f[1]) + "'";
          return false;
        }
        auto sp = narrow_id<SubprefId>(f[2]);
        if (!sp) {
          msg = "bad sub-prefecture id '" + std::string(f[2]) + "'";
          return false;
        }
        res.records.push_back({std::string(f[0]), *at, *sp});
        return true;
      });
}

std::string format_antenna_record(const AntennaRecord& r) {
  std::string s = format_hour_stamp(r.hour_start);
  s += '\t';
  s += std::to_string(r.origin);
  s += '\t';
  s += std::to_string(r.dest);
  s += '\t';
  s += std::to_string(r.n_calls);
  s += '\t';
  append_double(s, r.total_duration);
  return s;
}

std::string format_trajectory_record(const TrajectoryRecord& r) {
  std::string s = r.user_id;
  s += '\t';
  s += format_timestamp(r.at);
  s += '\t';
  s += std::to_string(r.subpref);
  return s;
}

void write_antenna_records(std::ostream& out, std::span<const AntennaRecord> records) {
  std::string buf;
  for (const auto& r : records) {
    buf += format_antenna_record(r);
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_trajectory_records(std::ostream& out, std::span<const TrajectoryRecord> records) {
  std::string buf;
  for (const auto& r : records) {
    buf += format_trajectory_record(r);
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

}  // namespace hivmob
