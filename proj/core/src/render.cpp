#include "alluvial/render.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace alluvial {

namespace {

/// Fixed two-decimal formatting keeps output identical across platforms;
/// whole numbers drop the fraction for readability.
std::string num(double value) {
    if (value == std::floor(value) && std::abs(value) < 1e15)
        return std::to_string(static_cast<long long>(value));
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

} // namespace

std::string render_svg(const LayoutGeometry& geometry, const RenderStyle& style) {
    const LayoutConfig& config = geometry.config;
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(config.canvas_width_px) +
           "\" height=\"" + num(config.canvas_height_px) + "\" viewBox=\"0 0 " +
           num(config.canvas_width_px) + " " + num(config.canvas_height_px) +
           "\" style=\"background-color:" + style.background + "\">\n";

    svg += "  <g fill=\"" + style.flow_fill + "\" fill-opacity=\"" + num(style.flow_opacity) +
           "\">\n";
    for (const Ribbon& ribbon : geometry.flow_ribbons) {
        const EntityRect& src =
            geometry.entity_rects[static_cast<std::size_t>(ribbon.source.column)]
                                 [static_cast<std::size_t>(ribbon.source.slot)];
        const EntityRect& tgt =
            geometry.entity_rects[static_cast<std::size_t>(ribbon.target.column)]
                                 [static_cast<std::size_t>(ribbon.target.slot)];
        const double x0 = src.x + src.width;
        const double x1 = tgt.x;
        const double xm = (x0 + x1) / 2.0;
        const double top0 = src.y + ribbon.source_offset;
        const double top1 = tgt.y + ribbon.target_offset;
        const double bot0 = top0 + ribbon.thickness;
        const double bot1 = top1 + ribbon.thickness;
        svg += "    <path d=\"M " + num(x0) + "," + num(top0) + " C " + num(xm) + "," + num(top0) +
               " " + num(xm) + "," + num(top1) + " " + num(x1) + "," + num(top1) + " L " + num(x1) +
               "," + num(bot1) + " C " + num(xm) + "," + num(bot1) + " " + num(xm) + "," +
               num(bot0) + " " + num(x0) + "," + num(bot0) + " Z\"/>\n";
    }
    svg += "  </g>\n";

    svg += "  <g fill=\"" + style.entity_fill + "\">\n";
    for (const auto& column : geometry.entity_rects) {
        for (const EntityRect& rect : column) {
            svg += "    <rect x=\"" + num(rect.x) + "\" y=\"" + num(rect.y) + "\" width=\"" +
                   num(rect.width) + "\" height=\"" + num(rect.height) + "\"/>\n";
        }
    }
    svg += "  </g>\n</svg>\n";
    return svg;
}

} // namespace alluvial
