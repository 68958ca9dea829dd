#pragma once

#include <optional>
#include <string>

#include "handoff/core.hpp"

namespace handoff {

/// Deterministic SVG overlay: gt boxes outlined, predicted boxes filled
/// translucent with class colors, reading-order arrows between consecutive
/// instances, score labels.
std::string render_svg(const std::optional<ParserInterface>& iface,
                       const std::optional<GroundTruthPage>& gt, int width = 800,
                       int height = 1120);

}  // namespace handoff
