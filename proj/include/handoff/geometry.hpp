#pragma once

#include <utility>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

inline constexpr double kDenomGuard = 1e-12;

struct GeomReport {
    double iou = 0.0;
    double giou = 0.0;
    double intersection_area = 0.0;
    double union_area = 0.0;
    double enclosure_area = 0.0;
};

GeomReport box_geometry(const Box& a, const Box& b);

double iou(const Box& a, const Box& b);
double giou(const Box& a, const Box& b);

std::pair<double, double> center(const Box& b);

/// Count of elements in `others` whose center lies inside (boundary
/// inclusive) the axis-aligned rectangle spanned by the centers of i and j.
int n_mid(const GroundTruthElement& i, const GroundTruthElement& j,
          const std::vector<GroundTruthElement>& others);

/// d(giou)/d(a coords) as {x1,y1,x2,y2}, one-sided subgradient at ties.
std::array<double, 4> giou_grad_a(const Box& a, const Box& b);

}  // namespace handoff
