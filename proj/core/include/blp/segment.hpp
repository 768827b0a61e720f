#pragma once

#include <cstddef>
#include <optional>

namespace blp {

/// Half-open interval [start, end) in frame coordinates.
class TemporalSegment {
public:
    /// Throws InvalidParameter unless start < end and both are finite.
    TemporalSegment(double start, double end);

    double start() const noexcept { return start_; }
    double end() const noexcept { return end_; }
    double length() const noexcept { return end_ - start_; }
    double center() const noexcept { return 0.5 * (start_ + end_); }

    friend bool operator==(const TemporalSegment&, const TemporalSegment&) = default;

private:
    double start_;
    double end_;
};

/// Class index: 0 is background, 1..C are action categories.
struct ClassLabel {
    int index = 0;

    bool is_background() const noexcept { return index == 0; }
    friend auto operator<=>(const ClassLabel&, const ClassLabel&) = default;
};

/// A search interval divided into `m` equal half-open units.
class UnitGrid {
public:
    /// Throws InvalidParameter when m < 2.
    UnitGrid(TemporalSegment interval, int m);

    const TemporalSegment& interval() const noexcept { return interval_; }
    int m() const noexcept { return m_; }
    double unit_width() const noexcept { return unit_width_; }

    double left_edge(int unit) const noexcept;
    double right_edge(int unit) const noexcept;
    double unit_center(int unit) const noexcept { return left_edge(unit) + 0.5 * unit_width_; }

private:
    TemporalSegment interval_;
    int m_;
    double unit_width_;
};

/// Scales `proposal` about its center by `gamma` (>= 1). The result may
/// extend below zero; see clamp_interval.
TemporalSegment extend_interval(const TemporalSegment& proposal, double gamma);

/// Intersects `interval` with [0, signal_length]. Throws InvalidParameter
/// when nothing remains.
TemporalSegment clamp_interval(const TemporalSegment& interval, double signal_length);

/// Temporal intersection over union.
double tiou(const TemporalSegment& a, const TemporalSegment& b) noexcept;

/// Unit containing t, or nullopt when t lies outside [start, end).
std::optional<int> unit_of_time(const UnitGrid& grid, double t) noexcept;

/// Segment from the left edge of `s_unit` to the right edge of `e_unit`.
TemporalSegment time_of_units(const UnitGrid& grid, int s_unit, int e_unit);

}  // namespace blp
