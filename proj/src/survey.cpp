#include "hivmob/survey.hpp"

#include <string>

#include "hivmob/numfmt.hpp"

namespace hivmob {

ParseResult<SurveyCluster> parse_survey_clusters(std::istream& in, const ParseOptions& opts) {
  ParseResult<SurveyCluster> result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = rtrim(line);
    if (view.empty()) continue;
    auto f = split_tabs(view);
    std::string msg;
    if (f.size() != 4) {
      msg = "expected 4 tab-separated fields, got " + std::to_string(f.size());
    } else {
      auto x = parse_double(f[0]);
      auto y = parse_double(f[1]);
      auto tested = parse_uint(f[2]);
      auto positive = parse_uint(f[3]);
      if (!x || !y) {
        msg = "bad coordinate";
      } else if (!tested || *tested == 0) {
        msg = "n_tested must be a positive integer";
      } else if (!positive || *positive > *tested) {
        msg = "n_positive must be an integer in [0, n_tested]";
      } else {
        result.records.push_back({{*x, *y}, *tested, *positive});
        continue;
      }
    }
    result.errors.push_back({lineno, msg});
    if (result.errors.size() > opts.max_errors) {
      throw ParseError(result.errors, "line " + std::to_string(lineno) + ": " + msg);
    }
  }
  return result;
}

void write_survey_clusters(std::ostream& out, std::span<const SurveyCluster> clusters) {
  std::string buf;
  for (const auto& c : clusters) {
    append_double(buf, c.location.x);
    buf += '\t';
    append_double(buf, c.location.y);
    buf += '\t';
    buf += std::to_string(c.n_tested);
    buf += '\t';
    buf += std::to_string(c.n_positive);
    buf += '\n';
  }
  out << buf;
}

}  // namespace hivmob
