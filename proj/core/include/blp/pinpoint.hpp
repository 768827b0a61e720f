#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blp/segment.hpp"

namespace blp {

/// Probabilities are clipped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon]
/// before any logarithm is taken.
inline constexpr double kProbabilityEpsilon = 1e-6;

double clip_probability(double p) noexcept;

/// Per-unit class-conditional probabilities for one search interval. Either
/// `p_io` (In-Out model) or both `p_s` and `p_e` (Boundary model) are set.
struct ProbabilityTracks {
    std::optional<std::vector<double>> p_io;
    std::optional<std::vector<double>> p_s;
    std::optional<std::vector<double>> p_e;
    ClassLabel class_label;

    static ProbabilityTracks in_out(std::vector<double> p, ClassLabel label = {});
    static ProbabilityTracks boundary(std::vector<double> p_s, std::vector<double> p_e, ClassLabel label = {});
};

struct PinpointResult {
    int s_unit = 0;
    int e_unit = 0;
    double log_likelihood = 0.0;
    TemporalSegment segment{0.0, 1.0};
};

/// Maximizes prod_{i in [s,e]} p(i) * prod_{i outside} (1 - p(i)) over
/// non-empty ranges. Runs a maximum-sum subarray scan over per-unit log-odds.
/// Ties go to the smallest s, then the smallest e.
PinpointResult pinpoint_in_out(const ProbabilityTracks& tracks, const UnitGrid& grid);

/// Maximizes p_s(s) * p_e(e) subject to s <= e using a suffix maximum of p_e.
PinpointResult pinpoint_boundary(const ProbabilityTracks& tracks, const UnitGrid& grid);

/// O(M^2) enumeration of every range; same objective and tie-break as the
/// fast solvers.
PinpointResult pinpoint_in_out_exhaustive(const ProbabilityTracks& tracks, const UnitGrid& grid);
PinpointResult pinpoint_boundary_exhaustive(const ProbabilityTracks& tracks, const UnitGrid& grid);

/// Log-likelihood of a given range under each model (clipped).
double in_out_log_likelihood(std::span<const double> p_io, int s_unit, int e_unit);
double boundary_log_likelihood(std::span<const double> p_s, std::span<const double> p_e, int s_unit,
                               int e_unit);

}  // namespace blp
