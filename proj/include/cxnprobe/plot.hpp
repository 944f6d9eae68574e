#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace cxnprobe::plot {

struct Color {
    std::uint8_t r = 0, g = 0, b = 0;
};

inline Color lighten(Color c, double t) {  // t in [0,1] toward white
    auto mix = [&](std::uint8_t v) {
        return static_cast<std::uint8_t>(v + t * (255.0 - v));
    };
    return {mix(c.r), mix(c.g), mix(c.b)};
}

struct Style {
    Color color{0, 0, 0};
    double width = 1.0;
    std::vector<double> dash;  // empty = solid
};

enum class Marker { None, Square, Triangle, Circle };

enum class Anchor { Start, Middle, End };

// Deterministic dual-backend figure: same scene rendered to SVG (vector)
// and PNG (raster, zlib-deflated, no timestamps). Coordinates are pixels,
// origin top-left; text y is the baseline.
class Figure {
public:
    Figure(int width, int height);

    void line(double x1, double y1, double x2, double y2, const Style& style);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const Style& style, Marker marker = Marker::None,
                  double marker_size = 3.0);
    void rect(double x, double y, double w, double h, Color fill);
    void frame(double x, double y, double w, double h, const Style& style);
    void circle(double x, double y, double radius, Color fill);
    void text(double x, double y, const std::string& s, double size = 10.0,
              Anchor anchor = Anchor::Start, Color color = {0, 0, 0});

    int width() const { return width_; }
    int height() const { return height_; }

    void save_svg(const std::filesystem::path& path) const;
    void save_png(const std::filesystem::path& path) const;

private:
    struct LineItem {
        double x1, y1, x2, y2;
        Style style;
    };
    struct PolyItem {
        std::vector<std::pair<double, double>> points;
        Style style;
        Marker marker;
        double marker_size;
    };
    struct RectItem {
        double x, y, w, h;
        Color fill;
    };
    struct FrameItem {
        double x, y, w, h;
        Style style;
    };
    struct CircleItem {
        double x, y, r;
        Color fill;
    };
    struct TextItem {
        double x, y;
        std::string s;
        double size;
        Anchor anchor;
        Color color;
    };
    using Item =
        std::variant<LineItem, PolyItem, RectItem, FrameItem, CircleItem, TextItem>;

    int width_;
    int height_;
    std::vector<Item> items_;
};

}  // namespace cxnprobe::plot
