#pragma once

#include <string>

#include "alluvial/layout.hpp"

namespace alluvial {

struct RenderStyle {
    std::string entity_fill = "#4C78A8";
    std::string flow_fill = "#B0B0B0";
    double flow_opacity = 0.6;
    std::string background = "#FFFFFF";
};

/// Standalone SVG document. Ribbons are painted first (cubic Beziers with
/// control points at the horizontal midpoint), entity rects on top. All
/// coordinates use fixed two-decimal formatting, so output is byte-stable
/// across runs and platforms.
std::string render_svg(const LayoutGeometry& geometry, const RenderStyle& style = {});

} // namespace alluvial
