#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

#include "rcbf/core.hpp"
#include "rcbf/error.hpp"
#include "rcbf/filter.hpp"

namespace rcbf {

struct GridSpec {
    std::pair<double, double> x1_range{0.0, 1.0};
    std::pair<double, double> x2_range{0.0, 1.0};
    std::size_t n1 = 2;
    std::size_t n2 = 2;
    double t_eval = 0.0;

    void validate() const
    {
        if (n1 < 2 || n2 < 2)
            throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 cells per axis");
        if (!(x1_range.second > x1_range.first) || !(x2_range.second > x2_range.first))
            throw Error(ErrorCode::InvalidArgument, "grid ranges must be nondegenerate");
        if (!std::isfinite(x1_range.first) || !std::isfinite(x1_range.second) ||
            !std::isfinite(x2_range.first) || !std::isfinite(x2_range.second) ||
            !std::isfinite(t_eval))
            throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite");
    }

    // Cell centers.
    double x1_at(std::size_t i) const
    {
        return x1_range.first + (static_cast<double>(i) + 0.5) * (x1_range.second - x1_range.first) /
                                    static_cast<double>(n1);
    }
    double x2_at(std::size_t j) const
    {
        return x2_range.first + (static_cast<double>(j) + 0.5) * (x2_range.second - x2_range.first) /
                                    static_cast<double>(n2);
    }
};

struct GridCell {
    double x1 = 0.0;
    double x2 = 0.0;
    bool in_set = false;
    bool feasible = false;
    double phi_lb = 0.0;
    double phi_ub = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct SweepCounts {
    std::size_t cells = 0;
    std::size_t in_set = 0;
    std::size_t in_set_infeasible = 0;
};

/// Cells are stored row-major: row j walks x2, column i walks x1, so
/// cells[j * n1 + i] is (x1_at(i), x2_at(j)).
struct SweepResult {
    GridSpec spec;
    std::vector<GridCell> cells;
    SweepCounts counts;

    const GridCell& at(std::size_t i, std::size_t j) const { return cells[j * spec.n1 + i]; }
};

inline GridCell evaluate_cell(double x1, double x2, double t, const BoxProfile& box,
                              const ActuationLimits& lim, const RcbfParams& p)
{
    const State2 s{x1, x2, t};
    const FeasibleInterval fi = phi_bounds(s, box, lim, p);
    GridCell cell;
    cell.x1 = x1;
    cell.x2 = x2;
    cell.in_set = in_restricted_set(s, box, p, 0.0);
    cell.feasible = fi.lo <= fi.hi + kBoundaryTol;
    cell.phi_lb = fi.phi_lb;
    cell.phi_ub = fi.phi_ub;
    cell.lo = fi.lo;
    cell.hi = fi.hi;
    return cell;
}

/// Evaluates membership and input feasibility at every cell center. Rows are
/// split across `threads` workers; the output does not depend on the count.
inline SweepResult run_sweep(const GridSpec& spec, const BoxProfile& box,
                             const ActuationLimits& lim, const RcbfParams& p,
                             unsigned threads = 1)
{
    spec.validate();
    lim.validate();
    p.validate();

    SweepResult result;
    result.spec = spec;
    result.cells.resize(spec.n1 * spec.n2);

    auto fill_rows = [&](std::size_t j_begin, std::size_t j_end) {
        for (std::size_t j = j_begin; j < j_end; ++j) {
            const double x2 = spec.x2_at(j);
            for (std::size_t i = 0; i < spec.n1; ++i)
                result.cells[j * spec.n1 + i] =
                    evaluate_cell(spec.x1_at(i), x2, spec.t_eval, box, lim, p);
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, spec.n2);
    if (workers == 1) {
        fill_rows(0, spec.n2);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (spec.n2 + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(spec.n2, begin + chunk);
            if (begin < end)
                pool.emplace_back(fill_rows, begin, end);
        }
    }

    result.counts.cells = result.cells.size();
    for (const auto& c : result.cells) {
        result.counts.in_set += c.in_set;
        result.counts.in_set_infeasible += c.in_set && !c.feasible;
    }
    return result;
}

/// Grid covering the box widened by `margin` of its width, and the relative
/// speeds reachable inside the restricted set widened by the same fraction.
inline GridSpec default_grid(const BoxProfile& box, const RcbfParams& p, double margin,
                             double t_eval, std::size_t n1 = 400, std::size_t n2 = 400)
{
    const double width = box.width();
    if (!(width > 0.0))
        throw Error(ErrorCode::DegenerateBox, "l_ub0 - l_lb0 must be > 0");
    if (!(margin >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "margin must be >= 0");
    const double vb = velocity_bound(box, p);
    const double rate = box.rate(t_eval);
    GridSpec spec;
    spec.x1_range = {box.lower(t_eval) - margin * width, box.upper(t_eval) + margin * width};
    spec.x2_range = {rate - (1.0 + margin) * vb, rate + (1.0 + margin) * vb};
    spec.n1 = n1;
    spec.n2 = n2;
    spec.t_eval = t_eval;
    return spec;
}

}  // namespace rcbf
