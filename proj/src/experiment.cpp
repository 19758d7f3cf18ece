#include "pdpath/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pdpath/io.hpp"
#include "pdpath/pareto.hpp"
#include "pdpath/prox.hpp"

namespace pdpath {

namespace fs = std::filesystem;
using nlohmann::json;

Vec KernelSpec::build(std::size_t& out_kh, std::size_t& out_kw) const {
  if (kh * kw > 0) {
    if (values.size() != kh * kw)
      throw std::invalid_argument("kernel: values length != shape");
    out_kh = kh;
    out_kw = kw;
    return values;
  }
  if (size == 0 || size % 2 == 0)
    throw std::invalid_argument("kernel: gaussian size must be odd and > 0");
  out_kh = out_kw = size;
  const long c = static_cast<long>(size / 2);
  Vec k(size * size);
  double mass = 0.0;
  for (long i = 0; i < static_cast<long>(size); ++i)
    for (long j = 0; j < static_cast<long>(size); ++j) {
      const double di = static_cast<double>(i - c), dj = static_cast<double>(j - c);
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      k[static_cast<std::size_t>(i) * size + static_cast<std::size_t>(j)] = v;
      mass += v;
    }
  for (auto& v : k) v /= mass;  // unit mass, so ||K|| <= 1
  return k;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("image_size")) {
    const auto& sz = j.at("image_size");
    cfg.height = sz.at(0).get<std::size_t>();
    cfg.width = sz.at(1).get<std::size_t>();
  }
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    if (k.contains("shape")) {
      cfg.kernel.kh = k.at("shape").at(0).get<std::size_t>();
      cfg.kernel.kw = k.at("shape").at(1).get<std::size_t>();
      cfg.kernel.values = k.at("values").get<Vec>();
    } else {
      cfg.kernel.size = k.at("size").get<std::size_t>();
      cfg.kernel.sigma = k.at("sigma").get<double>();
    }
  }
  if (j.contains("noise_sigma")) cfg.noise_sigma = j.at("noise_sigma").get<double>();
  if (j.contains("noise_seed"))
    cfg.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  if (j.contains("mu_grid")) {
    const auto& g = j.at("mu_grid");
    cfg.mu_grid.from = g.at("from").get<double>();
    cfg.mu_grid.to = g.at("to").get<double>();
    cfg.mu_grid.count = g.at("count").get<long>();
  }
  if (j.contains("iters_per_run"))
    cfg.iters_per_run = j.at("iters_per_run").get<long>();
  if (j.contains("continuation")) cfg.continuation_json = j.at("continuation").dump();
  if (j.contains("alpha") && !j.at("alpha").is_null())
    cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("beta") && !j.at("beta").is_null())
    cfg.beta = j.at("beta").get<double>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

  if (cfg.height == 0 || cfg.width == 0)
    throw std::invalid_argument("config: image_size must be positive");
  if (cfg.mu_grid.count < 1)
    throw std::invalid_argument("config: mu_grid.count must be >= 1");
  if (cfg.iters_per_run < 1)
    throw std::invalid_argument("config: iters_per_run must be >= 1");
  if (!(cfg.noise_sigma >= 0.0))
    throw std::invalid_argument("config: noise_sigma must be >= 0");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["image_size"] = {height, width};
  if (kernel.kh * kernel.kw > 0)
    j["kernel"] = {{"shape", {kernel.kh, kernel.kw}}, {"values", kernel.values}};
  else
    j["kernel"] = {{"size", kernel.size}, {"sigma", kernel.sigma}};
  j["noise_sigma"] = noise_sigma;
  j["noise_seed"] = noise_seed;
  j["mu_grid"] = {{"from", mu_grid.from}, {"to", mu_grid.to}, {"count", mu_grid.count}};
  j["iters_per_run"] = iters_per_run;
  j["continuation"] = continuation_json.empty() ? json()
                                                : json::parse(continuation_json);
  if (alpha) j["alpha"] = *alpha;
  if (beta) j["beta"] = *beta;
  j["output_dir"] = output_dir;
  return j;
}

ParamSchedule ExperimentConfig::continuation_schedule() const {
  if (!continuation_json.empty())
    return parse_param_schedule(json::parse(continuation_json));
  return ParamSchedule::log_spaced_then_constant(mu_grid.from, mu_grid.to,
                                                 iters_per_run);
}

namespace {

Vec make_phantom(std::size_t H, std::size_t W) {
  // Piecewise-constant scene: a centered bright rectangle plus a mid-gray
  // disk toward the lower-right corner on a zero background.
  Vec img(H * W, 0.0);
  const std::size_t r0 = H / 4, r1 = (3 * H) / 4, c0 = W / 4, c1 = (3 * W) / 4;
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = c0; j < c1; ++j) img[i * W + j] = 1.0;
  const double ci = 3.0 * static_cast<double>(H) / 4.0;
  const double cj = 3.0 * static_cast<double>(W) / 4.0;
  const double rad = static_cast<double>(std::min(H, W)) / 5.0;
  for (std::size_t i = 0; i < H; ++i)
    for (std::size_t j = 0; j < W; ++j) {
      const double di = static_cast<double>(i) - ci;
      const double dj = static_cast<double>(j) - cj;
      if (di * di + dj * dj <= rad * rad) img[i * W + j] = 0.5;
    }
  return img;
}

StepSizes steps_for(const ExperimentConfig& cfg, const ProblemSpec& p) {
  StepSizes s = default_steps(p);
  if (cfg.alpha) s.alpha = *cfg.alpha;
  if (cfg.beta) s.beta = *cfg.beta;
  const StepCheck c =
      validate_steps(s.alpha, s.beta, p.f.lipschitz, p.A.norm_bound());
  if (!c.ok)
    throw std::invalid_argument("config: step sizes inadmissible: " + c.message);
  return s;
}

std::vector<double> mu_grid_values(const MuGrid& g) {
  std::vector<double> mus;
  if (g.count == 1) {
    mus.push_back(g.from);
    return mus;
  }
  const double lr = std::log(g.to / g.from);
  for (long k = 0; k < g.count; ++k)
    mus.push_back(k + 1 == g.count
                      ? g.to
                      : g.from * std::exp(lr * static_cast<double>(k) /
                                          static_cast<double>(g.count - 1)));
  return mus;
}

ProblemSpec problem_at_mu(const Instance& inst, double mu) {
  return ProblemSpec(inst.problem.f, inst.problem.g, inst.problem.h,
                     inst.problem.A, inst.problem.lambda, mu);
}

}  // namespace

Instance make_instance(const ExperimentConfig& cfg) {
  const std::size_t H = cfg.height, W = cfg.width;
  std::size_t kh = 0, kw = 0;
  Vec kernel = cfg.kernel.build(kh, kw);
  LinearMap K = LinearMap::conv2d(H, W, kh, kw, std::move(kernel));

  Vec phantom = make_phantom(H, W);
  Vec blurred = K.apply(phantom);
  Vec noisy = blurred;
  if (cfg.noise_sigma > 0.0) {
    NormalSampler noise(cfg.noise_seed);
    for (auto& px : noisy) px += cfg.noise_sigma * noise.normal();
  }

  SmoothTerm f = SmoothTerm::least_squares(K, noisy);
  ProxFunction g = ProxFunction::box_indicator(H * W, 0.0, 1.0);
  ProxFunction h = ProxFunction::group_l21(2 * H * W, 2);
  LinearMap A = LinearMap::grad2d(H, W);

  // lambda is the indicator weight; scaling an indicator does not change
  // its prox, so the sweep varies mu only and lambda stays at 1.
  ProblemSpec p(std::move(f), std::move(g), std::move(h), std::move(A), 1.0,
                cfg.mu_grid.to);
  StepSizes s = steps_for(cfg, p);
  return Instance{std::move(p), std::move(K), std::move(phantom),
                  std::move(blurred), std::move(noisy), s};
}

SweepResult run_sweep(const ExperimentConfig& cfg, const Instance& inst,
                      int parallel) {
  SweepResult result;
  result.mu_values = mu_grid_values(cfg.mu_grid);
  const std::size_t count = result.mu_values.size();
  result.runs.resize(count);

  TraceConfig trace;
  trace.record_every = 1;
  trace.snapshot_every = 0;

  auto one = [&](std::size_t k) {
    const ProblemSpec p = problem_at_mu(inst, result.mu_values[k]);
    result.runs[k] = run_fixed(p, inst.steps, cfg.iters_per_run, /*tol=*/0.0,
                               trace);
  };

  const int workers =
      std::max(1, std::min<int>(parallel, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < count;
             k = next.fetch_add(1))
          one(k);
      });
    for (auto& t : pool) t.join();
  }

  result.warm_start = result.runs.front().final_state;
  return result;
}

Trajectory run_continuation(const ExperimentConfig& cfg, const Instance& inst,
                            const IterateState& warm_start) {
  const ParamSchedule mu_schedule = cfg.continuation_schedule();
  Schedule schedule{ParamSchedule::constant(inst.problem.lambda), mu_schedule};
  const ProblemSpec target = problem_at_mu(inst, mu_schedule.target());
  TraceConfig trace;
  trace.record_every = 1;
  return run(target, schedule, inst.steps, cfg.iters_per_run, /*tol=*/0.0,
             trace, warm_start);
}

TubeCheck continuation_tube_check(const SweepResult& sweep,
                                  const Trajectory& continuation,
                                  double threshold) {
  TubeCheck tube;
  tube.threshold = threshold;
  if (sweep.runs.size() < 3) return tube;  // no interior grid points

  // Converged sweep endpoints as a polyline in the (h, f) plane.
  std::vector<std::pair<double, double>> pts;
  for (const auto& traj : sweep.runs) {
    const auto& row = traj.rows.back();
    pts.emplace_back(row.hAu, row.f);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) return tube;

  // Interior of the mu grid: strictly between the extreme grid values.
  const double mu_hi = sweep.mu_values[1];
  const double mu_lo = sweep.mu_values[sweep.mu_values.size() - 2];

  for (const auto& row : continuation.rows) {
    if (row.mu_n > mu_hi || row.mu_n < mu_lo) continue;
    const double h = row.hAu;
    if (h < pts.front().first || h > pts.back().first) continue;
    std::size_t seg = 1;
    while (seg + 1 < pts.size() && pts[seg].first < h) ++seg;
    const auto& a = pts[seg - 1];
    const auto& b = pts[seg];
    if (!(b.first > a.first)) continue;  // coincident endpoints (saturated mu)
    const double t = (h - a.first) / (b.first - a.first);
    const double f_interp = (1.0 - t) * a.second + t * b.second;
    if (!(f_interp > 0.0)) continue;
    const double dev = std::abs(row.f / f_interp - 1.0);
    ++tube.points_checked;
    tube.max_rel_deviation = std::max(tube.max_rel_deviation, dev);
  }
  tube.ok = tube.max_rel_deviation <= threshold;
  return tube;
}

void emit(const ExperimentConfig& cfg, const Instance& inst,
          const SweepResult& sweep, const Trajectory& continuation,
          const TubeCheck& tube, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  for (std::size_t k = 0; k < sweep.runs.size(); ++k)
    write_trajectory_csv((dir / ("sweep_" + std::to_string(k) + ".csv")).string(),
                         sweep.runs[k]);
  write_trajectory_csv((dir / "continuation.csv").string(), continuation);

  write_pgm((dir / "phantom.pgm").string(), cfg.height, cfg.width, inst.phantom);
  write_pgm((dir / "blurred.pgm").string(), cfg.height, cfg.width, inst.blurred);
  write_pgm((dir / "noisy.pgm").string(), cfg.height, cfg.width, inst.noisy);

  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = cfg.to_json();
  manifest["noise_seed"] = cfg.noise_seed;
  manifest["rng"] = "mt19937_64 + Box-Muller";
  manifest["mu_values"] = sweep.mu_values;
  manifest["alpha"] = inst.steps.alpha;
  manifest["beta"] = inst.steps.beta;
  manifest["lipschitz"] = inst.problem.f.lipschitz;
  manifest["norm_bound_A"] = inst.problem.A.norm_bound();
  manifest["norm_bound_K"] = inst.K.norm_bound();
  manifest["sweep_total_iters"] =
      static_cast<long>(sweep.runs.size()) * cfg.iters_per_run;
  // warm start (shared with the sweep's largest-mu run) plus the run itself
  manifest["continuation_total_iters"] = 2 * cfg.iters_per_run;
  manifest["tube_max_rel_deviation"] = tube.max_rel_deviation;
  manifest["tube_threshold"] = tube.threshold;
  manifest["tube_points_checked"] = tube.points_checked;

  std::ofstream mout(dir / "manifest.json");
  if (!mout) throw std::runtime_error("cannot write manifest in " + out_dir);
  mout << manifest.dump(2) << '\n';
}

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   int parallel) {
  const Instance inst = make_instance(cfg);
  const SweepResult sweep = run_sweep(cfg, inst, parallel);
  const Trajectory continuation = run_continuation(cfg, inst, sweep.warm_start);
  const TubeCheck tube = continuation_tube_check(sweep, continuation);
  emit(cfg, inst, sweep, continuation, tube, out_dir);
  std::cout << "sweep: " << sweep.runs.size() << " runs x " << cfg.iters_per_run
            << " iters; continuation: " << continuation.iterations
            << " iters (+ " << cfg.iters_per_run << " warm start)\n";
  std::cout << "tube max relative deviation: " << tube.max_rel_deviation
            << " (threshold " << tube.threshold << ")\n";
  std::cout << "wrote " << out_dir << '\n';
  return 0;
}

int validate_records(const std::string& records_dir, double tol) {
  const fs::path dir(records_dir);
  if (!fs::is_directory(dir)) {
    std::cerr << "not a directory: " << records_dir << '\n';
    return 1;
  }

  std::vector<ParetoRecord> endpoints;
  for (long k = 0;; ++k) {
    const fs::path p = dir / ("sweep_" + std::to_string(k) + ".csv");
    if (!fs::exists(p)) break;
    const auto rows = read_trajectory_csv(p.string());
    if (rows.empty()) continue;
    const auto& row = rows.back();
    ParetoRecord rec;
    rec.tau1 = row.g;
    rec.tau2 = row.hAu;
    rec.sigma = row.f;
    rec.lambda = row.lambda_n;
    rec.mu = row.mu_n;
    rec.n = row.n;
    rec.feasible = std::isfinite(rec.tau1) && std::isfinite(rec.tau2);
    endpoints.push_back(rec);
  }
  if (endpoints.empty()) {
    std::cerr << "no sweep_<k>.csv files found in " << records_dir << '\n';
    return 1;
  }

  int violations = 0;
  const auto mono = check_monotone(endpoints, tol);
  for (const auto& v : mono)
    std::cerr << "monotonicity violation: records " << v.i << "," << v.j
              << " slack " << v.slack << '\n';
  violations += static_cast<int>(mono.size());

  const auto convex = check_convex(endpoints, tol);
  for (const auto& v : convex)
    std::cerr << "convexity violation: record " << v.i << " above hull by "
              << v.gap << '\n';
  violations += static_cast<int>(convex.size());

  for (std::size_t i = 0; i < endpoints.size(); ++i)
    if (!subgradient_check(endpoints[i], endpoints, tol)) {
      std::cerr << "subgradient inequality violated at record " << i << '\n';
      ++violations;
    }

  std::cout << "validated " << endpoints.size() << " sweep endpoints: "
            << violations << " violation(s) at tol " << tol << '\n';
  return violations == 0 ? 0 : 2;
}

}  // namespace pdpath
