#include <doctest.h>

#include <random>
#include <string>

#include "alluvial/generator.hpp"
#include "alluvial/layout.hpp"
#include "alluvial/render.hpp"
#include "builders.hpp"

using namespace alluvial;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

} // namespace

TEST_CASE("svg has one rect per entity and one path per flow") {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 30; ++i) {
        const auto d = testsupport::random_dataset(rng);
        const auto svg = render_svg(assign_geometry(d, order_columns(d)));
        CHECK(count_occurrences(svg, "<rect ") == d.entity_count());
        CHECK(count_occurrences(svg, "<path ") == static_cast<int>(d.flows().size()));
    }
}

TEST_CASE("rendering is byte-deterministic") {
    GeneratorConfig config;
    config.seed = 3;
    const auto d = generate(config);
    const auto geometry = assign_geometry(d, order_columns(d));
    CHECK(render_svg(geometry) == render_svg(geometry));
}

TEST_CASE("svg document structure is well-formed and sized to the canvas") {
    std::mt19937_64 rng(56);
    const auto d = testsupport::random_dataset(rng);
    const auto svg = render_svg(assign_geometry(d, order_columns(d)));
    CHECK(svg.rfind("<svg ", 0) == 0);
    CHECK(svg.find("viewBox=\"0 0 1920 1080\"") != std::string::npos);
    CHECK(svg.find("</svg>\n") == svg.size() - 7);
    CHECK(count_occurrences(svg, "<g ") == 2);
    // flows are painted first so entity bars sit on top
    CHECK(svg.find("<path ") < svg.find("<rect "));
    CHECK(svg.find("background-color:#FFFFFF") != std::string::npos);
}

TEST_CASE("numeric attributes avoid scientific notation and non-finite values") {
    std::mt19937_64 rng(57);
    for (int i = 0; i < 10; ++i) {
        const auto d = testsupport::random_dataset(rng);
        const auto svg = render_svg(assign_geometry(d, order_columns(d)));
        CHECK(svg.find("nan") == std::string::npos);
        CHECK(svg.find("inf") == std::string::npos);
        CHECK(svg.find("e+") == std::string::npos);
        CHECK(svg.find("e-") == std::string::npos);
    }
}

TEST_CASE("style options land in the output") {
    std::mt19937_64 rng(58);
    const auto d = testsupport::random_dataset(rng);
    RenderStyle style;
    style.entity_fill = "#112233";
    style.flow_fill = "#445566";
    style.flow_opacity = 0.25;
    style.background = "#000000";
    const auto svg = render_svg(assign_geometry(d, order_columns(d)), style);
    CHECK(svg.find("#112233") != std::string::npos);
    CHECK(svg.find("#445566") != std::string::npos);
    CHECK(svg.find("fill-opacity=\"0.25\"") != std::string::npos);
    CHECK(svg.find("background-color:#000000") != std::string::npos);
}
