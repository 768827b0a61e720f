#pragma once

#include <vector>

#include "blp/segment.hpp"

namespace blp {

/// Binary per-unit targets for one search interval.
struct TargetEncoding {
    std::vector<double> t_io;
    std::vector<double> t_s;
    std::vector<double> t_e;
    ClassLabel class_label;
};

/// Unit i is 1 iff its center lies in [gt.start, gt.end].
std::vector<double> encode_in_out(const UnitGrid& grid, const TemporalSegment& gt);

struct BoundaryTargets {
    std::vector<double> t_s;
    std::vector<double> t_e;
};

/// One-hot start/end units; a boundary outside the grid gives an all-zero side.
BoundaryTargets encode_boundaries(const UnitGrid& grid, const TemporalSegment& gt);

TargetEncoding encode_targets(const UnitGrid& grid, const TemporalSegment& gt, ClassLabel label);

}  // namespace blp
