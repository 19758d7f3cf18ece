#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pdpath/continuation.hpp"
#include "pdpath/linops.hpp"
#include "pdpath/solver.hpp"
#include "pdpath/vec.hpp"

namespace pdpath {

inline constexpr const char* kVersion = "0.1.0";

/// Convolution kernel: either a truncated Gaussian (size x size, std dev
/// sigma, normalized to unit mass) or explicit row-major values.
struct KernelSpec {
  std::size_t size = 5;
  double sigma = 1.0;
  std::size_t kh = 0, kw = 0;  // explicit kernel when kh*kw > 0
  Vec values;

  Vec build(std::size_t& out_kh, std::size_t& out_kw) const;
};

/// Default grid spans the informative mu range of the desk-scale instance:
/// with pixel values boxed into [0,1] the TV term saturates the minimizer
/// to a flat image for mu beyond ~1.5, so a wider grid only piles endpoints
/// onto a single point of the trade-off curve.
struct MuGrid {
  double from = 1.0;
  double to = 0.05;
  long count = 8;
};

/// Deblurring experiment at desk scale: blur a piecewise-constant phantom,
/// add seeded Gaussian noise (mt19937_64 + Box-Muller, portable across
/// platforms) and trace the trade-off curve both by a fixed-mu sweep and by
/// a single continuation run.
struct ExperimentConfig {
  std::size_t height = 16;
  std::size_t width = 16;
  KernelSpec kernel;
  double noise_sigma = 0.05;
  std::uint64_t noise_seed = 20240001;
  MuGrid mu_grid;
  /// Continuation mu-schedule spec; when absent, defaults to
  /// log_spaced_then_constant over the mu grid with count = iters_per_run.
  std::string continuation_json;
  long iters_per_run = 2000;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string output_dir = "experiment-out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;

  ParamSchedule continuation_schedule() const;
};

struct Instance {
  ProblemSpec problem;  // f = 0.5||Ku-y||^2, g = ind_[0,1], h = ||.||_{1,2}
  LinearMap K;
  Vec phantom;
  Vec blurred;
  Vec noisy;
  StepSizes steps;
};

Instance make_instance(const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<Trajectory> runs;  // one per grid value, largest mu first
  std::vector<double> mu_values;
  IterateState warm_start;  // final iterate of the largest-mu run
};

/// Fixed-parameter baseline for every mu in the log grid, each run starting
/// from (0, 0). Runs are independent and execute on up to `parallel`
/// threads.
SweepResult run_sweep(const ExperimentConfig& cfg, const Instance& inst,
                      int parallel = 1);

/// Single continuation run along the mu schedule, warm-started from the
/// largest-mu sweep endpoint.
Trajectory run_continuation(const ExperimentConfig& cfg, const Instance& inst,
                            const IterateState& warm_start);

/// Maximum relative deviation of the continuation path from the
/// piecewise-linear (in log-log (h, f) coordinates) interpolation of the
/// sweep endpoints, restricted to mu values interior to the grid.
struct TubeCheck {
  double max_rel_deviation = 0.0;
  double threshold = 0.05;
  bool ok = true;
  long points_checked = 0;
};

TubeCheck continuation_tube_check(const SweepResult& sweep,
                                  const Trajectory& continuation,
                                  double threshold = 0.05);

/// Writes sweep_<k>.csv, continuation.csv, manifest.json and the phantom /
/// blurred / noisy PGM images into out_dir (created if missing).
void emit(const ExperimentConfig& cfg, const Instance& inst,
          const SweepResult& sweep, const Trajectory& continuation,
          const TubeCheck& tube, const std::string& out_dir);

/// Full pipeline as driven by the CLI; returns a process exit code.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   int parallel);

/// Pareto checks over previously emitted CSVs; 0 = clean, 2 = violations.
int validate_records(const std::string& records_dir, double tol);

}  // namespace pdpath
