#include "pdpath/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdpath {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "n,lambda_n,mu_n,f,g,hAu,objective_target,residual\n";
  for (const auto& r : traj.rows)
    out << r.n << ',' << format_double(r.lambda_n) << ','
        << format_double(r.mu_n) << ',' << format_double(r.f) << ','
        << format_double(r.g) << ',' << format_double(r.hAu) << ','
        << format_double(r.objective_target) << ','
        << format_double(r.residual) << '\n';
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trajectory csv: " + path);
  if (line != "n,lambda_n,mu_n,f,g,hAu,objective_target,residual")
    throw std::runtime_error("unexpected trajectory csv header in " + path);
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8)
      throw std::runtime_error("bad trajectory row in " + path + ": " + line);
    TrajectoryRow r;
    r.n = std::stol(cells[0]);
    r.lambda_n = std::stod(cells[1]);
    r.mu_n = std::stod(cells[2]);
    r.f = std::stod(cells[3]);
    r.g = std::stod(cells[4]);
    r.hAu = std::stod(cells[5]);
    r.objective_target = std::stod(cells[6]);
    r.residual = std::stod(cells[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_records_csv(const std::string& path,
                       const std::vector<ParetoRecord>& records) {
  auto out = open_out(path);
  out << "n,lambda,mu,tau1,tau2,sigma,feasible\n";
  for (const auto& r : records)
    out << r.n << ',' << format_double(r.lambda) << ',' << format_double(r.mu)
        << ',' << format_double(r.tau1) << ',' << format_double(r.tau2) << ','
        << format_double(r.sigma) << ',' << (r.feasible ? 1 : 0) << '\n';
}

std::vector<ParetoRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty records csv: " + path);
  if (line != "n,lambda,mu,tau1,tau2,sigma,feasible")
    throw std::runtime_error("unexpected records csv header in " + path);
  std::vector<ParetoRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7)
      throw std::runtime_error("bad record row in " + path + ": " + line);
    ParetoRecord r;
    r.n = std::stol(cells[0]);
    r.lambda = std::stod(cells[1]);
    r.mu = std::stod(cells[2]);
    r.tau1 = std::stod(cells[3]);
    r.tau2 = std::stod(cells[4]);
    r.sigma = std::stod(cells[5]);
    r.feasible = cells[6] == "1";
    records.push_back(r);
  }
  return records;
}

void write_pgm(const std::string& path, std::size_t height, std::size_t width,
               const Vec& image) {
  if (image.size() != height * width)
    throw std::invalid_argument("write_pgm: image size mismatch");
  auto out = open_out(path, /*binary=*/true);
  out << "P5\n" << width << ' ' << height << "\n255\n";
  std::string bytes(height * width, '\0');
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double clamped = std::min(1.0, std::max(0.0, image[i]));
    bytes[i] = static_cast<char>(
        static_cast<unsigned char>(std::lround(clamped * 255.0)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Vec read_pgm(const std::string& path, std::size_t& height, std::size_t& width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a P5 pgm: " + path);
  std::size_t maxval = 0;
  in >> width >> height >> maxval;
  if (maxval != 255) throw std::runtime_error("expected 8-bit pgm: " + path);
  in.get();  // single whitespace after the header
  std::string bytes(height * width, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw std::runtime_error("truncated pgm: " + path);
  Vec image(height * width);
  for (std::size_t i = 0; i < image.size(); ++i)
    image[i] = static_cast<double>(static_cast<unsigned char>(bytes[i])) / 255.0;
  return image;
}

}  // namespace pdpath
