#pragma once

#include <string>
#include <vector>

#include "pdpath/pareto.hpp"
#include "pdpath/solver.hpp"
#include "pdpath/vec.hpp"

namespace pdpath {

/// Trajectory CSV, columns: n,lambda_n,mu_n,f,g,hAu,objective_target,residual.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
std::vector<TrajectoryRow> read_trajectory_csv(const std::string& path);

/// Pareto record CSV, columns: n,lambda,mu,tau1,tau2,sigma,feasible.
void write_records_csv(const std::string& path,
                       const std::vector<ParetoRecord>& records);
std::vector<ParetoRecord> read_records_csv(const std::string& path);

/// Binary 8-bit PGM (P5), values clamped to [0,1] then quantized to 0..255.
void write_pgm(const std::string& path, std::size_t height, std::size_t width,
               const Vec& image);
Vec read_pgm(const std::string& path, std::size_t& height, std::size_t& width);

/// Shortest decimal form that round-trips a double (used everywhere CSV
/// output must be byte-identical across runs).
std::string format_double(double x);

}  // namespace pdpath
