#include "hivmob/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/explain.hpp"
#include "hivmob/features.hpp"
#include "hivmob/flows.hpp"
#include "hivmob/graph_export.hpp"
#include "hivmob/numfmt.hpp"
#include "hivmob/prevalence.hpp"
#include "hivmob/rng.hpp"
#include "hivmob/ties.hpp"
#include "hivmob/trajectory_index.hpp"
#include "hivmob/validate.hpp"

namespace hivmob {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::validate: return "validate";
    case Stage::flows: return "flows";
    case Stage::prev: return "prev";
    case Stage::ties: return "ties";
    case Stage::features: return "features";
    case Stage::fit: return "fit";
    case Stage::eval: return "eval";
    case Stage::explain: return "explain";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : kStages) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

StageError::StageError(Stage stage, const std::string& cause)
    : std::runtime_error("stage " + std::string(to_string(stage)) + ": " + cause), stage_(stage) {}

namespace {

// ---- file helpers

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  write_file(path, ss.str());
}

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("manifest does not name the ") + what + " input");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " input " + path);
  return in;
}

std::ifstream open_artifact(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing upstream artifact " + path.string());
  return in;
}

std::string json_text(const ordered_json& j) { return j.dump(1) + "\n"; }

// ---- inputs

struct Context {
  const RunManifest& m;
  std::string hash;
  SpatialHierarchy hierarchy;
  PopulationTable population;

  explicit Context(const RunManifest& manifest) : m(manifest), hash(manifest_hash(manifest)) {
    auto h = open_input(m.inputs.hierarchy, "hierarchy");
    hierarchy = read_hierarchy_json(h);
    auto p = open_input(m.inputs.population, "population");
    population = read_population_json(p);
  }

  fs::path out(const std::string& rel) const { return m.out / rel; }
  ParseOptions parse_options() const { return {m.max_parse_errors}; }
};

template <typename Record>
std::vector<Record> accept(const Context& ctx, std::vector<Record> records, const char* what) {
  auto report = validate_dataset(std::span<const Record>(records), ctx.hierarchy, ctx.m.window);
  if (!report.accepted(ctx.m.drop_invalid)) {
    throw std::runtime_error(std::string(what) + " input has " + std::to_string(report.affected) +
                             " invalid records (first: " + report.violations.front().detail +
                             "); set drop_invalid to discard them");
  }
  if (report.clean()) return records;
  return drop_invalid(std::span<const Record>(records), report);
}

std::vector<AntennaRecord> load_antenna(const Context& ctx) {
  auto in = open_input(ctx.m.inputs.antenna, "antenna");
  return accept(ctx, parse_antenna_records(in, ctx.parse_options()).records, "antenna");
}

std::vector<TrajectoryRecord> load_trajectories(const Context& ctx) {
  auto in = open_input(ctx.m.inputs.trajectories, "trajectories");
  return accept(ctx, parse_trajectory_records(in, ctx.parse_options()).records, "trajectories");
}

std::vector<SurveyCluster> load_survey(const Context& ctx) {
  auto in = open_input(ctx.m.inputs.survey, "survey");
  return parse_survey_clusters(in, ctx.parse_options()).records;
}

ordered_json validation_json(const ValidationReport& r) {
  ordered_json j;
  j["checked"] = r.checked;
  j["affected"] = r.affected;
  std::map<std::string, std::size_t> by_kind;
  for (const auto& v : r.violations) ++by_kind[std::string(to_string(v.kind))];
  j["by_kind"] = by_kind;
  ordered_json ex = ordered_json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < 20; ++i) {
    ex.push_back({{"record", r.violations[i].record},
                  {"kind", to_string(r.violations[i].kind)},
                  {"detail", r.violations[i].detail}});
  }
  j["examples"] = ex;
  return j;
}

// ---- stages

void stage_validate(const Context& ctx) {
  ParseOptions po = ctx.parse_options();
  auto ain = open_input(ctx.m.inputs.antenna, "antenna");
  auto ant = parse_antenna_records(ain, po);
  auto tin = open_input(ctx.m.inputs.trajectories, "trajectories");
  auto tra = parse_trajectory_records(tin, po);
  auto sin = open_input(ctx.m.inputs.survey, "survey");
  auto sur = parse_survey_clusters(sin, po);
  auto ra = validate_dataset(std::span<const AntennaRecord>(ant.records), ctx.hierarchy, ctx.m.window);
  auto rt = validate_dataset(std::span<const TrajectoryRecord>(tra.records), ctx.hierarchy, ctx.m.window);

  ordered_json j;
  j["manifest"] = ctx.hash;
  j["antenna"] = validation_json(ra);
  j["antenna"]["parse_errors"] = ant.errors.size();
  j["antenna"]["dropped_zero_calls"] = ant.dropped_zero_calls;
  j["trajectories"] = validation_json(rt);
  j["trajectories"]["parse_errors"] = tra.errors.size();
  j["survey"] = {{"clusters", sur.records.size()}, {"parse_errors", sur.errors.size()}};
  const bool ok = ra.accepted(ctx.m.drop_invalid) && rt.accepted(ctx.m.drop_invalid);
  j["accepted"] = ok;
  write_file(ctx.out("validation.json"), json_text(j));
  if (!ok) {
    throw std::runtime_error("dataset rejected: " + std::to_string(ra.affected + rt.affected) +
                             " invalid records (see validation.json)");
  }
}

struct FlowOutput {
  const char* name;
  FlowMatrix raw;
  std::vector<double> pops;
};

void stage_flows(const Context& ctx) {
  const auto& h = ctx.hierarchy;
  auto antenna = load_antenna(ctx);
  auto traj = load_trajectories(ctx);
  TrajectoryIndex index(traj, h);
  auto homes = infer_home(index, h);
  auto stays = detect_stays(index, homes);
  const auto pops = ctx.population.rescaled(h);
  const auto residents = homes.residents(h.department_count());

  std::vector<FlowOutput> outs;
  outs.push_back({"comm_all", comm_flow(antenna, h), pops});
  outs.push_back({"comm_night", comm_flow(antenna, h, TimeFilter::night()), pops});
  outs.push_back({"mob_all", mobility_flow(stays, homes, h), residents});
  outs.push_back({"mob_gt3d", mobility_flow(stays, homes, h, 3.0), residents});
  for (const auto& o : outs) {
    write_with(ctx.out(std::string("flows/") + o.name + ".tsv"),
               [&](std::ostream& s) { write_flow_tsv(s, o.raw, ctx.hash); });
    auto norm = normalize_flows(o.raw, o.pops);
    write_with(ctx.out(std::string("flows/") + o.name + "_norm.tsv"),
               [&](std::ostream& s) { write_flow_tsv(s, norm, ctx.hash); });
  }
  write_with(ctx.out("flows/homes.tsv"), [&](std::ostream& s) {
    s << "# manifest=" << ctx.hash << "\nuser\thome\ttie_broken\n";
    for (std::size_t u = 0; u < homes.users.size(); ++u) {
      s << homes.users[u] << '\t' << h.departments()[homes.home[u]].id << '\t' << (homes.tie_broken[u] ? 1 : 0)
        << '\n';
    }
  });
  write_with(ctx.out("flows/stays.tsv"), [&](std::ostream& s) {
    s << "# manifest=" << ctx.hash << "\nuser\tdept\tstart\tend\tdays\n";
    for (const auto& st : stays) {
      s << st.user_id << '\t' << h.departments()[st.department].id << '\t' << format_timestamp(st.start) << '\t'
        << format_timestamp(st.end) << '\t' << format_double(st.duration_days()) << '\n';
    }
  });
}

void stage_prev(const Context& ctx) {
  const auto& h = ctx.hierarchy;
  auto clusters = load_survey(ctx);
  auto bw = adaptive_bandwidth(clusters, ctx.m.kernel);
  auto field = estimate_surface(clusters, bw, ctx.m.kernel, hierarchy_bbox(h));
  auto grades = quality_indicator(clusters, h, ctx.m.quality);
  auto est = department_prevalence(field, h, grades);
  write_with(ctx.out("prev/bandwidths.tsv"), [&](std::ostream& s) {
    s << "# manifest=" << ctx.hash << (bw.degenerate ? " degenerate=1" : "") << "\nx\ty\tn_tested\tn_positive\th\n";
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      s << format_double(clusters[i].location.x) << '\t' << format_double(clusters[i].location.y) << '\t'
        << clusters[i].n_tested << '\t' << clusters[i].n_positive << '\t' << format_double(bw.h[i]) << '\n';
    }
  });
  write_with(ctx.out("prev/surface.tsv"), [&](std::ostream& s) { write_surface_tsv(s, field, ctx.hash); });
  write_with(ctx.out("prev/estimates.tsv"), [&](std::ostream& s) { write_estimates_tsv(s, est, ctx.hash); });
  write_with(ctx.out("prev/choropleth.geojson"),
             [&](std::ostream& s) { write_choropleth_geojson(s, h, est, ctx.hash); });
}

std::vector<HivEstimate> read_estimates(const fs::path& p) {
  auto in = open_artifact(p);
  return read_estimates_tsv(in);
}

void stage_ties(const Context& ctx) {
  std::vector<HivEstimate> est;
  if (fs::exists(ctx.out("prev/estimates.tsv"))) est = read_estimates(ctx.out("prev/estimates.tsv"));
  for (const char* name : {"comm_all", "comm_night", "mob_all", "mob_gt3d"}) {
    auto in = open_artifact(ctx.out(std::string("flows/") + name + "_norm.tsv"));
    auto flow = read_flow_tsv(in);
    if (flow.departments != ctx.hierarchy.department_ids()) {
      throw std::runtime_error(std::string("flows/") + name + "_norm.tsv does not match the hierarchy");
    }
    auto ties = strong_ties(pair_strength(flow));
    const std::string base = std::string("ties/") + name;
    write_with(ctx.out(base + ".tsv"), [&](std::ostream& s) { write_ties_tsv(s, ties, ctx.hash); });
    write_with(ctx.out(base + ".dot"), [&](std::ostream& s) { write_tie_dot(s, ties, ctx.hierarchy, est, ctx.hash); });
    write_with(ctx.out(base + ".geojson"),
               [&](std::ostream& s) { write_tie_geojson(s, ties, ctx.hierarchy, est, ctx.hash); });
  }
}

void stage_features(const Context& ctx) {
  const auto& h = ctx.hierarchy;
  auto antenna = load_antenna(ctx);
  auto traj = load_trajectories(ctx);
  TrajectoryIndex index(traj, h);
  auto homes = infer_home(index, h);
  auto stays = detect_stays(index, homes);
  auto pops = ctx.population.rescaled(h);
  FeatureInputs in{antenna, &index, &homes, stays, pops};
  auto fm = extract_features(in, h);
  write_with(ctx.out("features/features.tsv"), [&](std::ostream& s) { write_features_tsv(s, fm, ctx.hash); });
  write_with(ctx.out("features/features.json"), [&](std::ostream& s) { write_features_sidecar(s, fm, ctx.hash); });
  auto norm = normalize_by_mean(fm);
  write_with(ctx.out("features/normalized.tsv"), [&](std::ostream& s) { write_features_tsv(s, norm, ctx.hash); });
}

// Feature rows and percent-prevalence target for the departments selected by the manifest.
struct RegressionData {
  FeatureMatrix features;  // raw (unnormalised), selected rows
  std::vector<double> y;   // prevalence in percent
};

RegressionData load_regression(const Context& ctx) {
  auto fin = open_artifact(ctx.out("features/features.tsv"));
  auto fm = read_features_tsv(fin);

  std::map<DeptId, double> target;
  std::map<DeptId, Quality> grade;
  const bool need_estimates = ctx.m.inputs.target.empty() || !ctx.m.row_quality.empty();
  if (need_estimates) {
    for (const auto& e : read_estimates(ctx.out("prev/estimates.tsv"))) {
      target[e.department] = e.prevalence;
      grade[e.department] = e.quality;
    }
  }
  if (!ctx.m.inputs.target.empty()) {
    auto tin = open_input(ctx.m.inputs.target, "target");
    target.clear();
    for (const auto& [d, p] : read_target_tsv(tin)) target[d] = p;
  }

  RegressionData out;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fm.departments.size(); ++r) {
    DeptId d = fm.departments[r];
    auto t = target.find(d);
    if (t == target.end()) continue;
    if (!ctx.m.row_quality.empty()) {
      auto g = grade.find(d);
      if (g == grade.end() ||
          std::find(ctx.m.row_quality.begin(), ctx.m.row_quality.end(), g->second) == ctx.m.row_quality.end()) {
        continue;
      }
    }
    rows.push_back(r);
    out.y.push_back(100.0 * t->second);
  }
  if (rows.size() < 3) {
    throw std::runtime_error("only " + std::to_string(rows.size()) +
                             " departments remain for regression; at least 3 are needed");
  }
  out.features = fm.select_rows(rows);
  return out;
}

std::vector<std::string> names_of(const FeatureMatrix& fm, std::span<const std::size_t> cols) {
  std::vector<std::string> out;
  for (std::size_t c : cols) out.push_back(fm.columns[c].name);
  return out;
}

ordered_json model_json(const FittedModel& m, const FeatureMatrix& fm) {
  ordered_json j;
  j["method"] = to_string(m.method);
  j["hyper"] = m.hyper;
  j["features"] = names_of(fm, m.features);
  j["coef"] = m.fit.coef;
  j["intercept"] = m.fit.intercept;
  j["eliminated"] = names_of(fm, m.elimination_order);
  j[m.method == Method::svr ? "duality_gap" : "residual"] = m.fit.residual;
  return j;
}

ModelSpec spec_for(const RunManifest& m, Method method, std::size_t n_cols) {
  ModelSpec s = m.model_spec(method);
  if (s.rfe_target && *s.rfe_target >= n_cols) s.rfe_target.reset();
  return s;
}

void stage_fit(const Context& ctx) {
  auto data = load_regression(ctx);
  ordered_json j;
  j["manifest"] = ctx.hash;
  j["target"] = "prevalence percent";
  j["rows"] = data.features.departments;
  j["models"] = ordered_json::array();
  for (Method method : ctx.m.methods) {
    for (Family f : ctx.m.families) {
      auto fam = data.features.select_columns(data.features.family_columns(f));
      auto spec = spec_for(ctx.m, method, fam.columns.size());
      auto model = fit_model(spec, normalize_columns(fam.values), data.y);
      auto mj = model_json(model, fam);
      mj["family"] = to_string(f);
      j["models"].push_back(std::move(mj));
    }
  }
  write_file(ctx.out("fit/models.json"), json_text(j));
}

ordered_json metrics_json(const Metrics& m) {
  return {{"rho", m.rho}, {"rho_undefined", m.rho_undefined}, {"rrmse", m.rrmse}};
}

void stage_eval(const Context& ctx) {
  auto data = load_regression(ctx);
  const auto& fm = data.features;
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < ctx.m.permutation_seeds; ++k) {
    seeds.push_back(derive_seed(ctx.m.seed, {stream_tag::permutation, k}));
  }

  ordered_json j;
  j["manifest"] = ctx.hash;
  j["target"] = "prevalence percent";
  j["rrmse_definition"] = "RMSE / mean(actual)";
  j["rows"] = fm.departments;
  j["methods"] = ordered_json::array();
  std::vector<std::string> pred_names;
  std::vector<std::vector<double>> pred_cols;

  for (Method method : ctx.m.methods) {
    ordered_json mj;
    mj["method"] = to_string(method);
    mj["families"] = ordered_json::array();
    std::vector<std::vector<double>> base;
    for (Family f : ctx.m.families) {
      auto fam = fm.select_columns(fm.family_columns(f));
      auto spec = spec_for(ctx.m, method, fam.columns.size());
      auto rep = loo_evaluate(spec, fam.values, data.y);
      ordered_json fj;
      fj["family"] = to_string(f);
      fj["real"] = metrics_json(rep.metrics);
      ordered_json folds = ordered_json::array();
      for (const auto& fold : rep.folds) folds.push_back({{"hyper", fold.hyper}, {"features", names_of(fam, fold.features)}});
      fj["folds"] = folds;
      if (!seeds.empty()) {
        auto perms = permutation_baseline(spec, fam.values, data.y, seeds);
        ordered_json pj = ordered_json::array();
        for (const auto& p : perms) {
          auto e = metrics_json(p.metrics);
          e["seed"] = *p.seed;
          pj.push_back(std::move(e));
        }
        fj["permutations"] = pj;
        const auto& best = perms[best_random(perms)];
        fj["best_random"] = metrics_json(best.metrics);
        fj["best_random"]["seed"] = *best.seed;
      }
      mj["families"].push_back(std::move(fj));
      pred_names.push_back(std::string(to_string(method)) + "_" + std::string(to_string(f)));
      pred_cols.push_back(rep.predictions);
      base.push_back(std::move(rep.predictions));
    }
    auto stack = stack_ensemble(base, data.y);
    ordered_json ej = metrics_json(stack.metrics);
    ordered_json w = ordered_json::object();
    for (std::size_t k = 0; k < ctx.m.families.size(); ++k) w[std::string(to_string(ctx.m.families[k]))] = stack.weights[k];
    ej["weights"] = w;
    ej["degenerate"] = stack.degenerate;
    mj["ensemble"] = ej;
    j["methods"].push_back(std::move(mj));
    pred_names.push_back(std::string(to_string(method)) + "_ensemble");
    pred_cols.push_back(stack.predictions);
  }
  write_file(ctx.out("eval/evaluation.json"), json_text(j));
  write_with(ctx.out("eval/predictions.tsv"), [&](std::ostream& s) {
    s << "# manifest=" << ctx.hash << "\ndept\tactual";
    for (const auto& n : pred_names) s << '\t' << n;
    s << '\n';
    for (std::size_t r = 0; r < fm.departments.size(); ++r) {
      s << fm.departments[r] << '\t' << format_double(data.y[r]);
      for (const auto& c : pred_cols) s << '\t' << format_double(c[r]);
      s << '\n';
    }
  });
}

void stage_explain(const Context& ctx) {
  auto data = load_regression(ctx);
  const auto& fm = data.features;
  ordered_json j;
  j["manifest"] = ctx.hash;
  j["method"] = to_string(ctx.m.explain_method);
  j["m"] = ctx.m.contribution.m;
  j["iterations"] = ctx.m.contribution.iterations;
  j["families"] = ordered_json::array();
  std::ostringstream tsv;
  tsv << "# manifest=" << ctx.hash << "\nfamily\trank\tfeature\tprobe\tvalue\tmean\tstd\tsign\n";
  for (Family f : ctx.m.families) {
    auto fam = fm.select_columns(fm.family_columns(f));
    Matrix x = normalize_columns(fam.values);
    ModelSpec spec = ctx.m.model_spec(ctx.m.explain_method);
    spec.rfe_target.reset();
    const std::size_t k = std::min(ctx.m.top_k, fam.columns.size());
    auto top = top_features(spec, x, data.y, k);
    auto model = fit_model(spec, x.select_cols(top), data.y);
    Matrix xt = x.select_cols(top);
    ordered_json fj;
    fj["family"] = to_string(f);
    fj["model"] = model_json(model, fam.select_columns(top));
    fj["curves"] = ordered_json::array();
    for (std::size_t r = 0; r < top.size(); ++r) {
      const std::string& name = fam.columns[top[r]].name;
      auto curve = contribution_curve(model, xt, r, ctx.m.contribution, name);
      for (std::size_t p = 0; p < curve.probes.size(); ++p) {
        tsv << to_string(f) << '\t' << r + 1 << '\t' << name << '\t' << p << '\t' << format_double(curve.probes[p])
            << '\t' << format_double(curve.mean[p]) << '\t' << format_double(curve.std[p]) << '\t'
            << to_string(curve.sign[p]) << '\n';
      }
      ordered_json cj;
      cj["rank"] = r + 1;
      cj["feature"] = name;
      cj["degenerate"] = curve.degenerate;
      ordered_json ranges = ordered_json::array();
      for (const auto& rg : classify_ranges(curve)) {
        ranges.push_back({{"sign", to_string(rg.sign)}, {"from", rg.from}, {"to", rg.to}});
      }
      cj["ranges"] = ranges;
      cj["readout"] = readout(curve);
      fj["curves"].push_back(std::move(cj));
    }
    j["families"].push_back(std::move(fj));
  }
  write_file(ctx.out("explain/curves.tsv"), tsv.str());
  write_file(ctx.out("explain/summary.json"), json_text(j));
}

}  // namespace

void run_stage(Stage stage, const RunManifest& manifest) {
  if (manifest.out.empty()) throw ConfigError("no output directory given");
  manifest.check();
  try {
    Context ctx(manifest);
    write_file(ctx.out("manifest.json"), canonical_manifest(manifest));
    switch (stage) {
      case Stage::validate: stage_validate(ctx); break;
      case Stage::flows: stage_flows(ctx); break;
      case Stage::prev: stage_prev(ctx); break;
      case Stage::ties: stage_ties(ctx); break;
      case Stage::features: stage_features(ctx); break;
      case Stage::fit: stage_fit(ctx); break;
      case Stage::eval: stage_eval(ctx); break;
      case Stage::explain: stage_explain(ctx); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void run_pipeline(const RunManifest& manifest) {
  for (Stage s : kStages) run_stage(s, manifest);
}

std::vector<std::pair<DeptId, double>> read_target_tsv(std::istream& in) {
  std::vector<std::pair<DeptId, double>> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = rtrim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    auto cells = split_tabs(text);
    std::optional<std::uint64_t> id;
    std::optional<double> p;
    if (cells.size() >= 2) {
      id = parse_uint(cells[0]);
      p = parse_double(cells[1]);
    }
    if (!id || !p || *p < 0.0 || *p > 1.0) {
      throw ParseError({{lineno, "malformed target row"}}, "target line " + std::to_string(lineno) + ": malformed row");
    }
    out.emplace_back(static_cast<DeptId>(*id), *p);
  }
  return out;
}

void generate_dataset(const GenOptions& opts, const fs::path& out) {
  synth::WorldSpec ws = opts.world;
  ws.seed = opts.seed;
  auto world = synth::generate_world(ws);
  auto plan = synth::default_plan(world, opts.seed);
  plan.users_total = opts.users;
  auto antenna = synth::generate_cdr(world, plan, opts.window, opts.seed);
  auto traj = synth::generate_trajectories(world, plan, opts.window, opts.seed);

  // Equal-weight affine law mapping the summed driver values onto [lo, hi].
  std::vector<double> drive(world.hierarchy.department_count(), 0.0);
  for (const auto& f : opts.drivers) {
    auto v = synth::expected_feature(world, plan, opts.window, f);
    for (std::size_t d = 0; d < drive.size(); ++d) drive[d] += v[d];
  }
  auto [coef, intercept] = synth::range_mapping(drive, opts.prevalence_lo, opts.prevalence_hi);
  std::vector<synth::PlantedLink> links;
  for (const auto& f : opts.drivers) links.push_back({f, coef});
  const double noise = opts.noise_fraction * (opts.prevalence_hi - opts.prevalence_lo);
  auto truth = synth::plant_prevalence(world, plan, opts.window, links, intercept, noise, opts.seed);
  auto survey = synth::generate_survey(world, truth, opts.survey, opts.seed);

  write_with(out / "hierarchy.json", [&](std::ostream& s) { write_hierarchy_json(s, world.hierarchy); });
  write_with(out / "population.json", [&](std::ostream& s) { write_population_json(s, world.populations); });
  write_with(out / "antenna.tsv", [&](std::ostream& s) { write_antenna_records(s, antenna); });
  write_with(out / "trajectories.tsv", [&](std::ostream& s) { write_trajectory_records(s, traj.records); });
  write_with(out / "survey.tsv", [&](std::ostream& s) { write_survey_clusters(s, survey); });
  write_with(out / "truth.tsv", [&](std::ostream& s) {
    s << "dept\tprevalence\n";
    for (std::size_t d = 0; d < truth.departments.size(); ++d) {
      s << truth.departments[d] << '\t' << format_double(truth.prevalence[d]) << '\n';
    }
  });
  write_with(out / "stays.tsv", [&](std::ostream& s) {
    s << "user\tdept\tstart\tend\n";
    for (const auto& st : traj.stays) {
      s << st.user_id << '\t' << st.department << '\t' << format_timestamp(st.start) << '\t'
        << format_timestamp(st.end) << '\n';
    }
  });

  ordered_json planted;
  planted["seed"] = opts.seed;
  planted["world"] = {{"departments", ws.n_departments}, {"subprefs", ws.n_subprefs}, {"antennas", ws.n_antennas},
                      {"regions", ws.n_regions},         {"width_km", ws.width_km},   {"height_km", ws.height_km},
                      {"user_scale", ws.user_scale}};
  planted["window"] = {{"begin", format_timestamp(opts.window.begin)}, {"end", format_timestamp(opts.window.end)}};
  planted["plan"] = {{"night_rate", plan.night_rate},
                     {"day_rate", plan.day_rate},
                     {"weekend_night_factor", plan.weekend_night_factor},
                     {"weekend_day_factor", plan.weekend_day_factor},
                     {"event_scale", plan.event_scale},
                     {"users_total", plan.users_total}};
  ordered_json lj = ordered_json::array();
  for (std::size_t k = 0; k < links.size(); ++k) {
    lj.push_back({{"feature", links[k].feature}, {"coefficient", links[k].coefficient},
                  {"values", truth.feature_values[k]}});
  }
  planted["truth"] = {{"intercept", truth.intercept}, {"noise_sd", truth.noise_sd}, {"links", lj},
                      {"departments", truth.departments}, {"prevalence", truth.prevalence}};
  planted["counts"] = {{"antenna_records", antenna.size()}, {"trajectory_records", traj.records.size()},
                       {"users", traj.users.size()}, {"stays", traj.stays.size()}, {"survey_clusters", survey.size()}};
  write_file(out / "planted.json", json_text(planted));

  ordered_json manifest;
  manifest["seed"] = opts.seed;
  manifest["window"] = planted["window"];
  manifest["inputs"] = {{"antenna", "antenna.tsv"},         {"trajectories", "trajectories.tsv"},
                        {"hierarchy", "hierarchy.json"},    {"population", "population.json"},
                        {"survey", "survey.tsv"}};
  write_file(out / "manifest.json", json_text(manifest));
}

}  // namespace hivmob
