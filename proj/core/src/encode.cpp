#include "blp/encode.hpp"

namespace blp {

std::vector<double> encode_in_out(const UnitGrid& grid, const TemporalSegment& gt) {
    std::vector<double> t(grid.m(), 0.0);
    for (int i = 0; i < grid.m(); ++i) {
        const double c = grid.unit_center(i);
        if (c >= gt.start() && c <= gt.end()) {
            t[i] = 1.0;
        }
    }
    return t;
}

BoundaryTargets encode_boundaries(const UnitGrid& grid, const TemporalSegment& gt) {
    BoundaryTargets out{std::vector<double>(grid.m(), 0.0), std::vector<double>(grid.m(), 0.0)};
    if (auto s = unit_of_time(grid, gt.start())) {
        out.t_s[*s] = 1.0;
    }
    if (auto e = unit_of_time(grid, gt.end())) {
        out.t_e[*e] = 1.0;
    }
    return out;
}

TargetEncoding encode_targets(const UnitGrid& grid, const TemporalSegment& gt, ClassLabel label) {
    auto bd = encode_boundaries(grid, gt);
    return {encode_in_out(grid, gt), std::move(bd.t_s), std::move(bd.t_e), label};
}

}  // namespace blp
