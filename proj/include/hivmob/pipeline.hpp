#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hivmob/manifest.hpp"
#include "hivmob/synthgen.hpp"

namespace hivmob {

enum class Stage { validate, flows, prev, ties, features, fit, eval, explain };

inline constexpr std::array<Stage, 8> kStages{Stage::validate, Stage::flows, Stage::prev,  Stage::ties,
                                              Stage::features, Stage::fit,   Stage::eval, Stage::explain};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

/// A stage failed; what() carries the stage name and the cause.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& cause);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

/// Runs one stage against the inputs and the artifacts earlier stages left under manifest.out.
void run_stage(Stage stage, const RunManifest& manifest);
/// All stages in order; each reads what the previous ones wrote, exactly as stage-wise runs do.
void run_pipeline(const RunManifest& manifest);

struct GenOptions {
  std::uint64_t seed = 1;
  synth::WorldSpec world = synth::WorldSpec::small(1);  // world.seed is replaced by seed
  std::size_t users = 400;
  TimeWindow window = default_observation_window();
  std::vector<std::string> drivers{"act_we_h02"};  // features the planted prevalence follows
  double prevalence_lo = 0.005;
  double prevalence_hi = 0.08;
  double noise_fraction = 0.05;  // noise sd as a share of the planted range
  synth::SurveyPlan survey;
};

/// Writes hierarchy.json, population.json, antenna.tsv, trajectories.tsv, survey.tsv,
/// truth.tsv, stays.tsv, planted.json and a run manifest.json into `out`.
void generate_dataset(const GenOptions& opts, const std::filesystem::path& out);

/// (dept, prevalence fraction) rows as written to truth.tsv.
std::vector<std::pair<DeptId, double>> read_target_tsv(std::istream& in);

}  // namespace hivmob
