#include "hivmob/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hivmob/errors.hpp"

namespace hivmob {

using nlohmann::json;
using nlohmann::ordered_json;

ModelSpec RunManifest::model_spec(Method m) const {
  ModelSpec s;
  s.method = m;
  s.grid = m == Method::ridge ? ridge_grid : svr_grid;
  s.epsilon = epsilon;
  if (rfe_target > 0) s.rfe_target = rfe_target;
  s.reselect = reselect;
  s.protocol = protocol;
  return s;
}

void RunManifest::check() const {
  if (!(window.begin < window.end)) throw ConfigError("window begin must precede end");
  if (!(kernel.n_min >= 1.0)) throw ConfigError("kernel.n_min must be >= 1");
  if (!(kernel.grid_step > 0.0)) throw ConfigError("kernel.grid_step must be > 0");
  if (!(kernel.truncation > 0.0)) throw ConfigError("kernel.truncation must be > 0");
  if (quality.moderate > quality.good) throw ConfigError("quality.moderate must not exceed quality.good");
  if (methods.empty()) throw ConfigError("model.methods must not be empty");
  if (families.empty()) throw ConfigError("model.families must not be empty");
  if (ridge_grid.empty() || svr_grid.empty()) throw ConfigError("hyperparameter grids must not be empty");
  model_spec(Method::ridge).check();
  model_spec(Method::svr).check();
  contribution.check();
  if (top_k == 0) throw ConfigError("contribution.top_k must be >= 1");
}

namespace {

template <typename E>
std::vector<std::string> enum_names(const std::vector<E>& v) {
  std::vector<std::string> out;
  for (E e : v) out.emplace_back(to_string(e));
  return out;
}

ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["seed"] = m.seed;
  j["window"] = {{"begin", format_timestamp(m.window.begin)}, {"end", format_timestamp(m.window.end)}};
  j["inputs"] = {{"antenna", m.inputs.antenna},       {"trajectories", m.inputs.trajectories},
                 {"hierarchy", m.inputs.hierarchy},   {"population", m.inputs.population},
                 {"survey", m.inputs.survey},         {"target", m.inputs.target}};
  j["drop_invalid"] = m.drop_invalid;
  j["max_parse_errors"] = m.max_parse_errors;
  j["kernel"] = {{"n_min", m.kernel.n_min}, {"grid_step", m.kernel.grid_step}, {"truncation", m.kernel.truncation}};
  j["quality"] = {{"good", m.quality.good}, {"moderate", m.quality.moderate}};
  j["model"] = {{"methods", enum_names(m.methods)},
                {"families", enum_names(m.families)},
                {"ridge_grid", m.ridge_grid},
                {"svr_grid", m.svr_grid},
                {"epsilon", m.epsilon},
                {"rfe_target", m.rfe_target},
                {"reselect", to_string(m.reselect)},
                {"protocol", to_string(m.protocol)},
                {"permutation_seeds", m.permutation_seeds}};
  j["rows"] = {{"quality", enum_names(m.row_quality)}};
  j["contribution"] = {{"m", m.contribution.m},
                       {"iterations", m.contribution.iterations},
                       {"seed", m.contribution.seed},
                       {"joint_rows", m.contribution.joint_rows},
                       {"top_k", m.top_k},
                       {"method", to_string(m.explain_method)}};
  return j;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown manifest key '" + where + k + "'");
  }
}

template <typename T>
void take(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("manifest key '" + where + key + "' has the wrong type");
  }
}

template <typename E, typename Parse>
std::vector<E> take_enums(const json& obj, const char* key, Parse parse, std::vector<E> dflt, const std::string& where) {
  if (!obj.contains(key)) return dflt;
  std::vector<std::string> names;
  take(obj, key, names, where);
  std::vector<E> out;
  for (const auto& n : names) {
    auto e = parse(n);
    if (!e) throw ConfigError("manifest key '" + where + key + "': unknown value '" + n + "'");
    out.push_back(*e);
  }
  return out;
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  reject_unknown(j, {"seed", "window", "inputs", "out", "drop_invalid", "max_parse_errors", "kernel", "quality",
                     "model", "rows", "contribution"},
                 "");
  RunManifest m;
  take(j, "seed", m.seed, "");
  take(j, "drop_invalid", m.drop_invalid, "");
  take(j, "max_parse_errors", m.max_parse_errors, "");
  if (j.contains("out")) {
    std::string out;
    take(j, "out", out, "");
    m.out = resolve(out, base_dir);
  }
  if (j.contains("window")) {
    const auto& w = j["window"];
    reject_unknown(w, {"begin", "end"}, "window.");
    std::string b = format_timestamp(m.window.begin), e = format_timestamp(m.window.end);
    take(w, "begin", b, "window.");
    take(w, "end", e, "window.");
    auto tb = parse_date_or_timestamp(b), te = parse_date_or_timestamp(e);
    if (!tb || !te) throw ConfigError("window bounds must be dates or timestamps");
    m.window = {*tb, *te};
  }
  if (j.contains("inputs")) {
    const auto& in = j["inputs"];
    reject_unknown(in, {"antenna", "trajectories", "hierarchy", "population", "survey", "target"}, "inputs.");
    take(in, "antenna", m.inputs.antenna, "inputs.");
    take(in, "trajectories", m.inputs.trajectories, "inputs.");
    take(in, "hierarchy", m.inputs.hierarchy, "inputs.");
    take(in, "population", m.inputs.population, "inputs.");
    take(in, "survey", m.inputs.survey, "inputs.");
    take(in, "target", m.inputs.target, "inputs.");
    for (auto* p : {&m.inputs.antenna, &m.inputs.trajectories, &m.inputs.hierarchy, &m.inputs.population,
                    &m.inputs.survey, &m.inputs.target}) {
      *p = resolve(*p, base_dir);
    }
  }
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    reject_unknown(k, {"n_min", "grid_step", "truncation"}, "kernel.");
    take(k, "n_min", m.kernel.n_min, "kernel.");
    take(k, "grid_step", m.kernel.grid_step, "kernel.");
    take(k, "truncation", m.kernel.truncation, "kernel.");
  }
  if (j.contains("quality")) {
    const auto& q = j["quality"];
    reject_unknown(q, {"good", "moderate"}, "quality.");
    take(q, "good", m.quality.good, "quality.");
    take(q, "moderate", m.quality.moderate, "quality.");
  }
  if (j.contains("model")) {
    const auto& md = j["model"];
    const std::string w = "model.";
    reject_unknown(md, {"methods", "families", "ridge_grid", "svr_grid", "epsilon", "rfe_target", "reselect",
                        "protocol", "permutation_seeds"},
                   w);
    m.methods = take_enums(md, "methods", parse_method, m.methods, w);
    m.families = take_enums(md, "families", parse_family, m.families, w);
    take(md, "ridge_grid", m.ridge_grid, w);
    take(md, "svr_grid", m.svr_grid, w);
    take(md, "epsilon", m.epsilon, w);
    take(md, "rfe_target", m.rfe_target, w);
    take(md, "permutation_seeds", m.permutation_seeds, w);
    if (md.contains("reselect")) {
      std::string s;
      take(md, "reselect", s, w);
      auto r = parse_reselect(s);
      if (!r) throw ConfigError("model.reselect must be per_round or once");
      m.reselect = *r;
    }
    if (md.contains("protocol")) {
      std::string s;
      take(md, "protocol", s, w);
      auto p = parse_protocol(s);
      if (!p) throw ConfigError("model.protocol must be nested or global");
      m.protocol = *p;
    }
  }
  if (j.contains("rows")) {
    const auto& r = j["rows"];
    reject_unknown(r, {"quality"}, "rows.");
    m.row_quality = take_enums(r, "quality", parse_quality, m.row_quality, "rows.");
  }
  if (j.contains("contribution")) {
    const auto& c = j["contribution"];
    const std::string w = "contribution.";
    reject_unknown(c, {"m", "iterations", "seed", "joint_rows", "top_k", "method"}, w);
    take(c, "m", m.contribution.m, w);
    take(c, "iterations", m.contribution.iterations, w);
    take(c, "seed", m.contribution.seed, w);
    take(c, "joint_rows", m.contribution.joint_rows, w);
    take(c, "top_k", m.top_k, w);
    if (c.contains("method")) {
      std::string s;
      take(c, "method", s, w);
      auto mm = parse_method(s);
      if (!mm) throw ConfigError("contribution.method must be ridge or svr");
      m.explain_method = *mm;
    }
  }
  m.check();
  return m;
}

RunManifest read_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string canonical_manifest(const RunManifest& m) { return to_json(m).dump(1) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_hash(const RunManifest& m) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_manifest(m))));
  return buf;
}

}  // namespace hivmob
