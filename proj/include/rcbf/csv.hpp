#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "rcbf/sim.hpp"
#include "rcbf/sweep.hpp"

namespace rcbf::csv {

inline constexpr const char* kTrajectoryHeader =
    "t,x1,x2,u,w,f_thrust,h_ub,h_lb,H_ub,H_lb,phi_lb,phi_ub,lo,hi,feasible";
inline constexpr const char* kGridHeader = "x1,x2,in_set,feasible,phi_lb,phi_ub,lo,hi";

/// 17 significant digits: enough for any double to round-trip.
inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_trajectory(std::ostream& os, const std::vector<TrajectoryRecord>& records)
{
    os << kTrajectoryHeader << '\n';
    for (const auto& r : records) {
        os << fmt(r.t) << ',' << fmt(r.x1) << ',' << fmt(r.x2) << ',' << fmt(r.u) << ','
           << fmt(r.w) << ',' << (r.f_thrust ? fmt(*r.f_thrust) : std::string()) << ','
           << fmt(r.h_ub) << ',' << fmt(r.h_lb) << ',' << fmt(r.H_ub) << ',' << fmt(r.H_lb) << ','
           << fmt(r.phi_lb) << ',' << fmt(r.phi_ub) << ',' << fmt(r.lo) << ',' << fmt(r.hi) << ','
           << (r.feasible ? 1 : 0) << '\n';
    }
}

inline void write_grid(std::ostream& os, const std::vector<GridCell>& cells)
{
    os << kGridHeader << '\n';
    for (const auto& c : cells) {
        os << fmt(c.x1) << ',' << fmt(c.x2) << ',' << (c.in_set ? 1 : 0) << ','
           << (c.feasible ? 1 : 0) << ',' << fmt(c.phi_lb) << ',' << fmt(c.phi_ub) << ','
           << fmt(c.lo) << ',' << fmt(c.hi) << '\n';
    }
}

}  // namespace rcbf::csv
