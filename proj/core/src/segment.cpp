#include "blp/segment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blp/error.hpp"

namespace blp {

TemporalSegment::TemporalSegment(double start, double end) : start_(start), end_(end) {
    if (!std::isfinite(start) || !std::isfinite(end) || !(start < end)) {
        throw InvalidParameter("segment requires start < end, got (" + std::to_string(start) + ", " +
                               std::to_string(end) + ")");
    }
}

UnitGrid::UnitGrid(TemporalSegment interval, int m)
    : interval_(interval), m_(m), unit_width_(interval.length() / m) {
    if (m < 2) {
        throw InvalidParameter("unit grid needs m >= 2, got " + std::to_string(m));
    }
}

double UnitGrid::left_edge(int unit) const noexcept {
    if (unit >= m_) {
        return interval_.end();
    }
    return interval_.start() + unit * unit_width_;
}

double UnitGrid::right_edge(int unit) const noexcept { return left_edge(unit + 1); }

TemporalSegment extend_interval(const TemporalSegment& proposal, double gamma) {
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
        throw InvalidParameter("extension factor gamma must be >= 1.0, got " + std::to_string(gamma));
    }
    const double half = 0.5 * gamma * proposal.length();
    return {proposal.center() - half, proposal.center() + half};
}

TemporalSegment clamp_interval(const TemporalSegment& interval, double signal_length) {
    const double start = std::max(interval.start(), 0.0);
    const double end = std::min(interval.end(), signal_length);
    if (!(start < end)) {
        throw InvalidParameter("interval does not intersect the signal extent");
    }
    return {start, end};
}

double tiou(const TemporalSegment& a, const TemporalSegment& b) noexcept {
    const double inter = std::min(a.end(), b.end()) - std::max(a.start(), b.start());
    if (inter <= 0.0) {
        return 0.0;
    }
    const double uni = std::max(a.end(), b.end()) - std::min(a.start(), b.start());
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<int> unit_of_time(const UnitGrid& grid, double t) noexcept {
    const auto& iv = grid.interval();
    if (!(t >= iv.start()) || !(t < iv.end())) {
        return std::nullopt;
    }
    int unit = static_cast<int>(std::floor((t - iv.start()) / grid.unit_width()));
    unit = std::clamp(unit, 0, grid.m() - 1);
    // Reconcile rounding in the division with the edges as the grid defines them.
    while (unit > 0 && t < grid.left_edge(unit)) {
        --unit;
    }
    while (unit + 1 < grid.m() && t >= grid.left_edge(unit + 1)) {
        ++unit;
    }
    return unit;
}

TemporalSegment time_of_units(const UnitGrid& grid, int s_unit, int e_unit) {
    if (s_unit < 0 || e_unit >= grid.m() || s_unit > e_unit) {
        throw InvalidParameter("unit range (" + std::to_string(s_unit) + ", " + std::to_string(e_unit) +
                               ") invalid for m=" + std::to_string(grid.m()));
    }
    return {grid.left_edge(s_unit), grid.right_edge(e_unit)};
}

}  // namespace blp
