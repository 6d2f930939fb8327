// Command-line entry point. Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/pipeline.hpp"
#include "hivmob/simd.hpp"

namespace {

using namespace hivmob;

struct RunFlags {
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string simd = "auto";
  std::string quality;
  std::string departments;
  std::string methods;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--manifest", f.manifest, "run manifest (JSON)")->required();
  cmd->add_option("--out", f.out, "output directory (overrides the manifest)");
  cmd->add_option("--seed", f.seed, "seed (overrides the manifest)");
  cmd->add_option("--threads", f.threads, "worker cap, 0 = all cores; results do not depend on it");
  cmd->add_option("--simd", f.simd, "kernel set: auto, scalar or avx2");
  cmd->add_option("--quality", f.quality, "regression rows by estimate quality, e.g. good,moderate");
  cmd->add_option("--departments", f.departments, "'all' uses every department as a regression row");
  cmd->add_option("--methods", f.methods, "comma list of svr, ridge");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flags override manifest keys.
RunManifest load(const RunFlags& f) {
  RunManifest m = read_manifest_file(f.manifest);
  if (!f.out.empty()) m.out = f.out;
  if (m.out.empty()) throw ConfigError("no output directory: pass --out or set \"out\" in the manifest");
  if (f.seed) m.seed = *f.seed;
  if (!f.quality.empty() && !f.departments.empty()) {
    throw ConfigError("--quality and --departments are mutually exclusive");
  }
  if (!f.departments.empty()) {
    if (f.departments != "all") throw ConfigError("--departments accepts only 'all'");
    m.row_quality.clear();
  }
  if (!f.quality.empty()) {
    m.row_quality.clear();
    for (const auto& q : split_commas(f.quality)) {
      auto parsed = parse_quality(q);
      if (!parsed) throw ConfigError("unknown quality '" + q + "'");
      m.row_quality.push_back(*parsed);
    }
  }
  if (!f.methods.empty()) {
    m.methods.clear();
    for (const auto& s : split_commas(f.methods)) {
      auto parsed = parse_method(s);
      if (!parsed) throw ConfigError("unknown method '" + s + "'");
      m.methods.push_back(*parsed);
    }
  }
  m.check();
  return m;
}

void apply_runtime(const RunFlags& f) {
  set_thread_count(f.threads);
  if (!simd::force(f.simd)) throw ConfigError("kernel set '" + f.simd + "' is not available here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hivmob: mobile-phone records to department prevalence models"};
  app.require_subcommand(1);

  GenOptions gen;
  std::string gen_out;
  std::string gen_preset = "small";
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset with planted prevalence");
  gen_cmd->add_option("--out", gen_out, "output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "seed");
  gen_cmd->add_option("--users", gen.users, "synthetic subscribers");
  gen_cmd->add_option("--preset", gen_preset, "world size: small or full")->check(CLI::IsMember({"small", "full"}));
  gen_cmd->add_option("--drivers", gen.drivers, "activity features the planted prevalence follows");
  gen_cmd->add_option("--noise", gen.noise_fraction, "noise sd as a share of the prevalence range");

  RunFlags flags;
  std::vector<std::pair<CLI::App*, std::optional<Stage>>> runs;
  for (Stage s : kStages) {
    auto* cmd = app.add_subcommand(std::string(to_string(s)), "run the " + std::string(to_string(s)) + " stage");
    add_run_flags(cmd, flags);
    runs.emplace_back(cmd, s);
  }
  auto* pipe_cmd = app.add_subcommand("pipeline", "run every stage in order");
  add_run_flags(pipe_cmd, flags);
  runs.emplace_back(pipe_cmd, std::nullopt);

  std::string stage_name;
  auto* stage_cmd = app.add_subcommand("stage", "run one named stage");
  stage_cmd->add_option("name", stage_name, "stage name")->required();
  add_run_flags(stage_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) {
      gen.world = gen_preset == "small" ? synth::WorldSpec::small(gen.seed) : synth::WorldSpec{};
      generate_dataset(gen, gen_out);
      return 0;
    }
    if (stage_cmd->parsed()) {
      auto s = parse_stage(stage_name);
      if (!s) throw ConfigError("unknown stage '" + stage_name + "'");
      apply_runtime(flags);
      run_stage(*s, load(flags));
      return 0;
    }
    for (auto& [cmd, stage] : runs) {
      if (!cmd->parsed()) continue;
      apply_runtime(flags);
      auto m = load(flags);
      if (stage) {
        run_stage(*stage, m);
      } else {
        run_pipeline(m);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "hivmob: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hivmob: %s\n", e.what());
    return 1;
  }
  return 2;
}
