#include "cxnprobe/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"

namespace cxnprobe::plot {

namespace {

// Classic 5x7 column-major bitmap font, ASCII 32..126; bit 0 = top row.
constexpr unsigned char kFont[95][5] = {
    {0x00, 0x00, 0x00, 0x00, 0x00},  // ' '
    {0x00, 0x00, 0x5F, 0x00, 0x00},  // !
    {0x00, 0x07, 0x00, 0x07, 0x00},  // "
    {0x14, 0x7F, 0x14, 0x7F, 0x14},  // #
    {0x24, 0x2A, 0x7F, 0x2A, 0x12},  // $
    {0x23, 0x13, 0x08, 0x64, 0x62},  // %
    {0x36, 0x49, 0x55, 0x22, 0x50},  // &
    {0x00, 0x05, 0x03, 0x00, 0x00},  // '
    {0x00, 0x1C, 0x22, 0x41, 0x00},  // (
    {0x00, 0x41, 0x22, 0x1C, 0x00},  // )
    {0x14, 0x08, 0x3E, 0x08, 0x14},  // *
    {0x08, 0x08, 0x3E, 0x08, 0x08},  // +
    {0x00, 0x50, 0x30, 0x00, 0x00},  // ,
    {0x08, 0x08, 0x08, 0x08, 0x08},  // -
    {0x00, 0x60, 0x60, 0x00, 0x00},  // .
    {0x20, 0x10, 0x08, 0x04, 0x02},  // /
    {0x3E, 0x51, 0x49, 0x45, 0x3E},  // 0
    {0x00, 0x42, 0x7F, 0x40, 0x00},  // 1
    {0x42, 0x61, 0x51, 0x49, 0x46},  // 2
    {0x21, 0x41, 0x45, 0x4B, 0x31},  // 3
    {0x18, 0x14, 0x12, 0x7F, 0x10},  // 4
    {0x27, 0x45, 0x45, 0x45, 0x39},  // 5
    {0x3C, 0x4A, 0x49, 0x49, 0x30},  // 6
    {0x01, 0x71, 0x09, 0x05, 0x03},  // 7
    {0x36, 0x49, 0x49, 0x49, 0x36},  // 8
    {0x06, 0x49, 0x49, 0x29, 0x1E},  // 9
    {0x00, 0x36, 0x36, 0x00, 0x00},  // :
    {0x00, 0x56, 0x36, 0x00, 0x00},  // ;
    {0x08, 0x14, 0x22, 0x41, 0x00},  // <
    {0x14, 0x14, 0x14, 0x14, 0x14},  // =
    {0x00, 0x41, 0x22, 0x14, 0x08},  // >
    {0x02, 0x01, 0x51, 0x09, 0x06},  // ?
    {0x32, 0x49, 0x79, 0x41, 0x3E},  // @
    {0x7E, 0x11, 0x11, 0x11, 0x7E},  // A
    {0x7F, 0x49, 0x49, 0x49, 0x36},  // B
    {0x3E, 0x41, 0x41, 0x41, 0x22},  // C
    {0x7F, 0x41, 0x41, 0x22, 0x1C},  // D
    {0x7F, 0x49, 0x49, 0x49, 0x41},  // E
    {0x7F, 0x09, 0x09, 0x09, 0x01},  // F
    {0x3E, 0x41, 0x49, 0x49, 0x7A},  // G
    {0x7F, 0x08, 0x08, 0x08, 0x7F},  // H
    {0x00, 0x41, 0x7F, 0x41, 0x00},  // I
    {0x20, 0x40, 0x41, 0x3F, 0x01},  // J
    {0x7F, 0x08, 0x14, 0x22, 0x41},  // K
    {0x7F, 0x40, 0x40, 0x40, 0x40},  // L
    {0x7F, 0x02, 0x0C, 0x02, 0x7F},  // M
    {0x7F, 0x04, 0x08, 0x10, 0x7F},  // N
    {0x3E, 0x41, 0x41, 0x41, 0x3E},  // O
    {0x7F, 0x09, 0x09, 0x09, 0x06},  // P
    {0x3E, 0x41, 0x51, 0x21, 0x5E},  // Q
    {0x7F, 0x09, 0x19, 0x29, 0x46},  // R
    {0x46, 0x49, 0x49, 0x49, 0x31},  // S
    {0x01, 0x01, 0x7F, 0x01, 0x01},  // T
    {0x3F, 0x40, 0x40, 0x40, 0x3F},  // U
    {0x1F, 0x20, 0x40, 0x20, 0x1F},  // V
    {0x3F, 0x40, 0x38, 0x40, 0x3F},  // W
    {0x63, 0x14, 0x08, 0x14, 0x63},  // X
    {0x07, 0x08, 0x70, 0x08, 0x07},  // Y
    {0x61, 0x51, 0x49, 0x45, 0x43},  // Z
    {0x00, 0x7F, 0x41, 0x41, 0x00},  // [
    {0x02, 0x04, 0x08, 0x10, 0x20},  // backslash
    {0x00, 0x41, 0x41, 0x7F, 0x00},  // ]
    {0x04, 0x02, 0x01, 0x02, 0x04},  // ^
    {0x40, 0x40, 0x40, 0x40, 0x40},  // _
    {0x00, 0x01, 0x02, 0x04, 0x00},  // `
    {0x20, 0x54, 0x54, 0x54, 0x78},  // a
    {0x7F, 0x48, 0x44, 0x44, 0x38},  // b
    {0x38, 0x44, 0x44, 0x44, 0x20},  // c
    {0x38, 0x44, 0x44, 0x48, 0x7F},  // d
    {0x38, 0x54, 0x54, 0x54, 0x18},  // e
    {0x08, 0x7E, 0x09, 0x01, 0x02},  // f
    {0x0C, 0x52, 0x52, 0x52, 0x3E},  // g
    {0x7F, 0x08, 0x04, 0x04, 0x78},  // h
    {0x00, 0x44, 0x7D, 0x40, 0x00},  // i
    {0x20, 0x40, 0x44, 0x3D, 0x00},  // j
    {0x7F, 0x10, 0x28, 0x44, 0x00},  // k
    {0x00, 0x41, 0x7F, 0x40, 0x00},  // l
    {0x7C, 0x04, 0x18, 0x04, 0x78},  // m
    {0x7C, 0x08, 0x04, 0x04, 0x78},  // n
    {0x38, 0x44, 0x44, 0x44, 0x38},  // o
    {0x7C, 0x14, 0x14, 0x14, 0x08},  // p
    {0x08, 0x14, 0x14, 0x18, 0x7C},  // q
    {0x7C, 0x08, 0x04, 0x04, 0x08},  // r
    {0x48, 0x54, 0x54, 0x54, 0x20},  // s
    {0x04, 0x3F, 0x44, 0x40, 0x20},  // t
    {0x3C, 0x40, 0x40, 0x20, 0x7C},  // u
    {0x1C, 0x20, 0x40, 0x20, 0x1C},  // v
    {0x3C, 0x40, 0x30, 0x40, 0x3C},  // w
    {0x44, 0x28, 0x10, 0x28, 0x44},  // x
    {0x0C, 0x50, 0x50, 0x50, 0x3C},  // y
    {0x44, 0x64, 0x54, 0x4C, 0x44},  // z
    {0x00, 0x08, 0x36, 0x41, 0x00},  // {
    {0x00, 0x00, 0x7F, 0x00, 0x00},  // |
    {0x00, 0x41, 0x36, 0x08, 0x00},  // }
    {0x08, 0x04, 0x08, 0x10, 0x08},  // ~
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string svg_color(Color c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string dash_attr(const std::vector<double>& dash) {
    if (dash.empty()) return "";
    std::string s = " stroke-dasharray=\"";
    for (std::size_t i = 0; i < dash.size(); ++i) {
        if (i) s += ",";
        s += fmt(dash[i]);
    }
    s += "\"";
    return s;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Raster canvas with the drawing primitives the figure items need.
class Raster {
public:
    Raster(int w, int h) : w_(w), h_(h), pixels_(static_cast<std::size_t>(w) * h * 3, 255) {}

    void set(int x, int y, Color c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        const std::size_t i = (static_cast<std::size_t>(y) * w_ + x) * 3;
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    void fill_rect(double x, double y, double w, double h, Color c) {
        const int x0 = static_cast<int>(std::lround(x));
        const int y0 = static_cast<int>(std::lround(y));
        const int x1 = static_cast<int>(std::lround(x + w));
        const int y1 = static_cast<int>(std::lround(y + h));
        for (int yy = y0; yy < y1; ++yy) {
            for (int xx = x0; xx < x1; ++xx) set(xx, yy, c);
        }
    }

    void stamp(double x, double y, double radius, Color c) {
        const int r = std::max(0, static_cast<int>(std::lround(radius)));
        const int cx = static_cast<int>(std::lround(x));
        const int cy = static_cast<int>(std::lround(y));
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) set(cx + dx, cy + dy, c);
        }
    }

    void line(double x1, double y1, double x2, double y2, const Style& style) {
        const double dx = x2 - x1;
        const double dy = y2 - y1;
        const double len = std::hypot(dx, dy);
        const int steps = std::max(1, static_cast<int>(std::ceil(len)));
        const double half = std::max(0.0, style.width / 2.0 - 0.5);
        double dash_total = 0.0;
        for (double d : style.dash) dash_total += d;
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            if (dash_total > 0.0) {
                double pos = std::fmod(t * len, dash_total);
                bool on = true;
                for (double seg : style.dash) {
                    if (pos < seg) break;
                    pos -= seg;
                    on = !on;
                }
                if (!on) continue;
            }
            stamp(x1 + t * dx, y1 + t * dy, half, style.color);
        }
    }

    void circle_fill(double x, double y, double radius, Color c) {
        const int r = std::max(1, static_cast<int>(std::lround(radius)));
        const int cx = static_cast<int>(std::lround(x));
        const int cy = static_cast<int>(std::lround(y));
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy <= r * r) set(cx + dx, cy + dy, c);
            }
        }
    }

    void triangle_fill(double x, double y, double size, Color c) {
        // upward triangle centered on (x, y)
        const int s = std::max(1, static_cast<int>(std::lround(size)));
        for (int dy = -s; dy <= s; ++dy) {
            const double frac = (dy + s) / (2.0 * s);
            const int half = static_cast<int>(std::lround(frac * s));
            for (int dx = -half; dx <= half; ++dx) {
                set(static_cast<int>(std::lround(x)) + dx,
                    static_cast<int>(std::lround(y)) + dy, c);
            }
        }
    }

    void glyphs(double x, double y, const std::string& s, double size, Anchor anchor,
                Color color) {
        const int scale = std::max(1, static_cast<int>(std::lround(size / 8.0)));
        const int advance = 6 * scale;
        const int width = static_cast<int>(s.size()) * advance - scale;
        int x0 = static_cast<int>(std::lround(x));
        if (anchor == Anchor::Middle) x0 -= width / 2;
        if (anchor == Anchor::End) x0 -= width;
        const int y0 = static_cast<int>(std::lround(y)) - 7 * scale;  // baseline
        for (unsigned char uc : s) {
            const unsigned char g = (uc < 32 || uc > 126) ? '?' : uc;
            const unsigned char* cols = kFont[g - 32];
            for (int cx = 0; cx < 5; ++cx) {
                for (int cy = 0; cy < 7; ++cy) {
                    if (cols[cx] & (1 << cy)) {
                        fill_rect(x0 + cx * scale, y0 + cy * scale, scale, scale, color);
                    }
                }
            }
            x0 += advance;
        }
    }

    void save_png(const std::filesystem::path& path) const {
        // filter byte 0 per row
        std::vector<unsigned char> raw;
        raw.reserve(static_cast<std::size_t>(h_) * (static_cast<std::size_t>(w_) * 3 + 1));
        for (int y = 0; y < h_; ++y) {
            raw.push_back(0);
            const std::size_t off = static_cast<std::size_t>(y) * w_ * 3;
            raw.insert(raw.end(), pixels_.begin() + static_cast<std::ptrdiff_t>(off),
                       pixels_.begin() + static_cast<std::ptrdiff_t>(off + w_ * 3));
        }
        uLongf bound = compressBound(static_cast<uLong>(raw.size()));
        std::vector<unsigned char> compressed(bound);
        if (compress2(compressed.data(), &bound, raw.data(),
                      static_cast<uLong>(raw.size()), 6) != Z_OK) {
            throw Error("png: deflate failed");
        }
        compressed.resize(bound);

        std::string out;
        const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
        out.append(reinterpret_cast<const char*>(sig), 8);
        auto be32 = [](std::uint32_t v) {
            std::string s(4, '\0');
            s[0] = static_cast<char>(v >> 24);
            s[1] = static_cast<char>(v >> 16);
            s[2] = static_cast<char>(v >> 8);
            s[3] = static_cast<char>(v);
            return s;
        };
        auto chunk = [&](const char* type, const std::string& data) {
            out += be32(static_cast<std::uint32_t>(data.size()));
            std::string body = std::string(type, 4) + data;
            out += body;
            const auto crc =
                crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                      static_cast<uInt>(body.size()));
            out += be32(static_cast<std::uint32_t>(crc));
        };
        std::string ihdr = be32(static_cast<std::uint32_t>(w_)) +
                           be32(static_cast<std::uint32_t>(h_));
        ihdr += static_cast<char>(8);  // bit depth
        ihdr += static_cast<char>(2);  // RGB
        ihdr += static_cast<char>(0);
        ihdr += static_cast<char>(0);
        ihdr += static_cast<char>(0);
        chunk("IHDR", ihdr);
        chunk("IDAT", std::string(reinterpret_cast<const char*>(compressed.data()),
                                  compressed.size()));
        chunk("IEND", "");
        io::write_file(path, out);
    }

private:
    int w_, h_;
    std::vector<unsigned char> pixels_;
};

}  // namespace

Figure::Figure(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw Error("Figure: non-positive size");
}

void Figure::line(double x1, double y1, double x2, double y2, const Style& style) {
    items_.push_back(LineItem{x1, y1, x2, y2, style});
}

void Figure::polyline(const std::vector<std::pair<double, double>>& points,
                      const Style& style, Marker marker, double marker_size) {
    items_.push_back(PolyItem{points, style, marker, marker_size});
}

void Figure::rect(double x, double y, double w, double h, Color fill) {
    items_.push_back(RectItem{x, y, w, h, fill});
}

void Figure::frame(double x, double y, double w, double h, const Style& style) {
    items_.push_back(FrameItem{x, y, w, h, style});
}

void Figure::circle(double x, double y, double radius, Color fill) {
    items_.push_back(CircleItem{x, y, radius, fill});
}

void Figure::text(double x, double y, const std::string& s, double size,
                  Anchor anchor, Color color) {
    items_.push_back(TextItem{x, y, s, size, anchor, color});
}

void Figure::save_svg(const std::filesystem::path& path) const {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
           "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
           std::to_string(height_) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    for (const auto& item : items_) {
        if (const auto* l = std::get_if<LineItem>(&item)) {
            out += "<line x1=\"" + fmt(l->x1) + "\" y1=\"" + fmt(l->y1) + "\" x2=\"" +
                   fmt(l->x2) + "\" y2=\"" + fmt(l->y2) + "\" stroke=\"" +
                   svg_color(l->style.color) + "\" stroke-width=\"" +
                   fmt(l->style.width) + "\"" + dash_attr(l->style.dash) + "/>\n";
        } else if (const auto* p = std::get_if<PolyItem>(&item)) {
            out += "<polyline fill=\"none\" stroke=\"" + svg_color(p->style.color) +
                   "\" stroke-width=\"" + fmt(p->style.width) + "\"" +
                   dash_attr(p->style.dash) + " points=\"";
            for (std::size_t i = 0; i < p->points.size(); ++i) {
                if (i) out += " ";
                out += fmt(p->points[i].first) + "," + fmt(p->points[i].second);
            }
            out += "\"/>\n";
            if (p->marker != Marker::None) {
                for (const auto& [px, py] : p->points) {
                    const double s = p->marker_size;
                    if (p->marker == Marker::Square) {
                        out += "<rect x=\"" + fmt(px - s) + "\" y=\"" + fmt(py - s) +
                               "\" width=\"" + fmt(2 * s) + "\" height=\"" + fmt(2 * s) +
                               "\" fill=\"" + svg_color(p->style.color) + "\"/>\n";
                    } else if (p->marker == Marker::Triangle) {
                        out += "<polygon points=\"" + fmt(px) + "," + fmt(py - s) + " " +
                               fmt(px - s) + "," + fmt(py + s) + " " + fmt(px + s) + "," +
                               fmt(py + s) + "\" fill=\"" + svg_color(p->style.color) +
                               "\"/>\n";
                    } else {
                        out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) +
                               "\" r=\"" + fmt(s) + "\" fill=\"" +
                               svg_color(p->style.color) + "\"/>\n";
                    }
                }
            }
        } else if (const auto* r = std::get_if<RectItem>(&item)) {
            out += "<rect x=\"" + fmt(r->x) + "\" y=\"" + fmt(r->y) + "\" width=\"" +
                   fmt(r->w) + "\" height=\"" + fmt(r->h) + "\" fill=\"" +
                   svg_color(r->fill) + "\"/>\n";
        } else if (const auto* f = std::get_if<FrameItem>(&item)) {
            out += "<rect x=\"" + fmt(f->x) + "\" y=\"" + fmt(f->y) + "\" width=\"" +
                   fmt(f->w) + "\" height=\"" + fmt(f->h) + "\" fill=\"none\" stroke=\"" +
                   svg_color(f->style.color) + "\" stroke-width=\"" +
                   fmt(f->style.width) + "\"/>\n";
        } else if (const auto* c = std::get_if<CircleItem>(&item)) {
            out += "<circle cx=\"" + fmt(c->x) + "\" cy=\"" + fmt(c->y) + "\" r=\"" +
                   fmt(c->r) + "\" fill=\"" + svg_color(c->fill) + "\"/>\n";
        } else if (const auto* t = std::get_if<TextItem>(&item)) {
            const char* anchor = t->anchor == Anchor::Start
                                     ? "start"
                                     : t->anchor == Anchor::Middle ? "middle" : "end";
            out += "<text x=\"" + fmt(t->x) + "\" y=\"" + fmt(t->y) +
                   "\" font-family=\"monospace\" font-size=\"" + fmt(t->size) +
                   "\" text-anchor=\"" + anchor + "\" fill=\"" + svg_color(t->color) +
                   "\">" + xml_escape(t->s) + "</text>\n";
        }
    }
    out += "</svg>\n";
    io::write_file(path, out);
}

void Figure::save_png(const std::filesystem::path& path) const {
    Raster raster(width_, height_);
    for (const auto& item : items_) {
        if (const auto* l = std::get_if<LineItem>(&item)) {
            raster.line(l->x1, l->y1, l->x2, l->y2, l->style);
        } else if (const auto* p = std::get_if<PolyItem>(&item)) {
            for (std::size_t i = 1; i < p->points.size(); ++i) {
                raster.line(p->points[i - 1].first, p->points[i - 1].second,
                            p->points[i].first, p->points[i].second, p->style);
            }
            if (p->marker != Marker::None) {
                for (const auto& [px, py] : p->points) {
                    if (p->marker == Marker::Square) {
                        raster.fill_rect(px - p->marker_size, py - p->marker_size,
                                         2 * p->marker_size, 2 * p->marker_size,
                                         p->style.color);
                    } else if (p->marker == Marker::Triangle) {
                        raster.triangle_fill(px, py, p->marker_size, p->style.color);
                    } else {
                        raster.circle_fill(px, py, p->marker_size, p->style.color);
                    }
                }
            }
        } else if (const auto* r = std::get_if<RectItem>(&item)) {
            raster.fill_rect(r->x, r->y, r->w, r->h, r->fill);
        } else if (const auto* f = std::get_if<FrameItem>(&item)) {
            raster.line(f->x, f->y, f->x + f->w, f->y, f->style);
            raster.line(f->x + f->w, f->y, f->x + f->w, f->y + f->h, f->style);
            raster.line(f->x + f->w, f->y + f->h, f->x, f->y + f->h, f->style);
            raster.line(f->x, f->y + f->h, f->x, f->y, f->style);
        } else if (const auto* c = std::get_if<CircleItem>(&item)) {
            raster.circle_fill(c->x, c->y, c->r, c->fill);
        } else if (const auto* t = std::get_if<TextItem>(&item)) {
            raster.glyphs(t->x, t->y, t->s, t->size, t->anchor, t->color);
        }
    }
    raster.save_png(path);
}

}  // namespace cxnprobe::plot
