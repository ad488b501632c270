#include "sleigh/trajectory_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sleigh {

namespace {

void put(std::ostream& out, double v, bool last) {
  std::array<char, 40> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  out.write(buf.data(), n);
  out.put(last ? '\n' : ',');
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& s : traj.samples) {
    const std::array<double, 18> row{s.t,        s.state.q[0], s.state.q[1], s.state.q[2],
                                     s.state.p[0], s.state.p[1], s.z.z[0],     s.z.z[1],
                                     s.z.z[2],   s.w.w[0],     s.w.w[1],     s.w.w[2],
                                     s.u[0],     s.u[1],       s.H,          s.H_d,
                                     s.H_d_rate, s.constraint_residual};
    for (std::size_t i = 0; i < row.size(); ++i) put(out, row[i], i + 1 == row.size());
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  write_trajectory_csv(out, traj);
}

}  // namespace sleigh
