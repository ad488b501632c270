#pragma once

#include <filesystem>
#include <ostream>
#include <string_view>

#include "sleigh/integrator.hpp"

namespace sleigh {

/// Column order of the trajectory CSV; part of the file format.
inline constexpr std::string_view kTrajectoryCsvHeader =
    "t,x,y,theta,p1,p2,z1,z2,z3,w1,w2,w3,u1,u2,H,H_d,Hd_dot,constraint_residual";

/// One header line, then one row per sample, every value with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace sleigh
