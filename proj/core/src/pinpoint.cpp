#include "blp/pinpoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blp/error.hpp"

namespace blp {

namespace {

void check_track(const std::vector<double>& p, const UnitGrid& grid, const char* name) {
    if (static_cast<int>(p.size()) != grid.m()) {
        throw ContractError(std::string(name) + " has " + std::to_string(p.size()) + " entries, grid has m=" +
                            std::to_string(grid.m()));
    }
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ContractError(std::string(name) + " entry outside [0, 1]");
        }
    }
}

const std::vector<double>& require_in_out(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    if (!tracks.p_io) {
        throw ContractError("in-out pinpointing needs p_io");
    }
    check_track(*tracks.p_io, grid, "p_io");
    return *tracks.p_io;
}

void require_boundary(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    if (!tracks.p_s || !tracks.p_e) {
        throw ContractError("boundary pinpointing needs p_s and p_e");
    }
    check_track(*tracks.p_s, grid, "p_s");
    check_track(*tracks.p_e, grid, "p_e");
}

PinpointResult make_result(const UnitGrid& grid, int s, int e, double ll) {
    return {s, e, ll, time_of_units(grid, s, e)};
}

}  // namespace

double clip_probability(double p) noexcept {
    return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

ProbabilityTracks ProbabilityTracks::in_out(std::vector<double> p, ClassLabel label) {
    ProbabilityTracks t;
    t.p_io = std::move(p);
    t.class_label = label;
    return t;
}

ProbabilityTracks ProbabilityTracks::boundary(std::vector<double> p_s, std::vector<double> p_e, ClassLabel label) {
    ProbabilityTracks t;
    t.p_s = std::move(p_s);
    t.p_e = std::move(p_e);
    t.class_label = label;
    return t;
}

double in_out_log_likelihood(std::span<const double> p_io, int s_unit, int e_unit) {
    double ll = 0.0;
    for (int i = 0; i < static_cast<int>(p_io.size()); ++i) {
        const double p = clip_probability(p_io[i]);
        ll += (i >= s_unit && i <= e_unit) ? std::log(p) : std::log1p(-p);
    }
    return ll;
}

double boundary_log_likelihood(std::span<const double> p_s, std::span<const double> p_e, int s_unit, int e_unit) {
    return std::log(clip_probability(p_s[s_unit])) + std::log(clip_probability(p_e[e_unit]));
}

PinpointResult pinpoint_in_out(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    const auto& p = require_in_out(tracks, grid);
    const int m = grid.m();

    double base = 0.0;
    std::vector<double> log_odds(m);
    for (int i = 0; i < m; ++i) {
        const double q = clip_probability(p[i]);
        const double out = std::log1p(-q);
        base += out;
        log_odds[i] = std::log(q) - out;
    }

    // Kadane over non-empty ranges. Extending a zero-sum prefix keeps the
    // earlier start, which realizes the smallest-s tie-break.
    double run = log_odds[0];
    int run_start = 0;
    double best = run;
    int best_s = 0;
    int best_e = 0;
    for (int j = 1; j < m; ++j) {
        if (run < 0.0) {
            run = log_odds[j];
            run_start = j;
        } else {
            run += log_odds[j];
        }
        if (run > best || (run == best && run_start < best_s)) {
            best = run;
            best_s = run_start;
            best_e = j;
        }
    }
    return make_result(grid, best_s, best_e, base + best);
}

PinpointResult pinpoint_boundary(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    require_boundary(tracks, grid);
    const auto& ps = *tracks.p_s;
    const auto& pe = *tracks.p_e;
    const int m = grid.m();

    // suffix_arg[s] = smallest e >= s maximizing p_e(e).
    std::vector<int> suffix_arg(m);
    suffix_arg[m - 1] = m - 1;
    for (int s = m - 2; s >= 0; --s) {
        const int prev = suffix_arg[s + 1];
        suffix_arg[s] = clip_probability(pe[s]) >= clip_probability(pe[prev]) ? s : prev;
    }

    int best_s = 0;
    int best_e = suffix_arg[0];
    double best = boundary_log_likelihood(ps, pe, best_s, best_e);
    for (int s = 1; s < m; ++s) {
        const double ll = boundary_log_likelihood(ps, pe, s, suffix_arg[s]);
        if (ll > best) {
            best = ll;
            best_s = s;
            best_e = suffix_arg[s];
        }
    }
    return make_result(grid, best_s, best_e, best);
}

PinpointResult pinpoint_in_out_exhaustive(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    const auto& p = require_in_out(tracks, grid);
    const int m = grid.m();
    int best_s = 0;
    int best_e = 0;
    double best = in_out_log_likelihood(p, 0, 0);
    for (int s = 0; s < m; ++s) {
        for (int e = s; e < m; ++e) {
            const double ll = in_out_log_likelihood(p, s, e);
            if (ll > best) {
                best = ll;
                best_s = s;
                best_e = e;
            }
        }
    }
    return make_result(grid, best_s, best_e, best);
}

PinpointResult pinpoint_boundary_exhaustive(const ProbabilityTracks& tracks, const UnitGrid& grid) {
    require_boundary(tracks, grid);
    const int m = grid.m();
    int best_s = 0;
    int best_e = 0;
    double best = boundary_log_likelihood(*tracks.p_s, *tracks.p_e, 0, 0);
    for (int s = 0; s < m; ++s) {
        for (int e = s; e < m; ++e) {
            const double ll = boundary_log_likelihood(*tracks.p_s, *tracks.p_e, s, e);
            if (ll > best) {
                best = ll;
                best_s = s;
                best_e = e;
            }
        }
    }
    return make_result(grid, best_s, best_e, best);
}

}  // namespace blp
