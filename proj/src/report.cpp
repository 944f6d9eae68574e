#include "cxnprobe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/plot.hpp"

namespace cxnprobe {

namespace {

constexpr plot::Color kUnkColor{200, 30, 30};     // red, square markers
constexpr plot::Color kPrepColor{235, 140, 20};   // orange, triangle markers
constexpr plot::Color kGrey{120, 120, 120};
constexpr plot::Color kAxis{40, 40, 40};

constexpr int kPanelW = 360;
constexpr int kPanelH = 260;
constexpr int kMarginL = 52;
constexpr int kMarginR = 16;
constexpr int kMarginT = 34;
constexpr int kMarginB = 40;

std::string short_label(const std::string& s, std::size_t max_len = 40) {
    if (s.size() <= max_len) return s;
    return s.substr(0, max_len - 2) + "..";
}

std::string fmt1(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

struct PanelGeometry {
    double x0, y0;  // top-left of the plotting area

    double map_x(double layer, int max_layer) const {
        const double usable = kPanelW - kMarginL - kMarginR;
        return x0 + kMarginL + (layer - 1.0) / std::max(1, max_layer - 1) * usable;
    }
    double map_y(double accuracy) const {
        const double usable = kPanelH - kMarginT - kMarginB;
        return y0 + kMarginT + (1.0 - accuracy) * usable;
    }
};

void draw_axes(plot::Figure& fig, const PanelGeometry& geo, int max_layer,
               const std::string& title) {
    const double px = geo.x0 + kMarginL;
    const double py = geo.y0 + kMarginT;
    const double pw = kPanelW - kMarginL - kMarginR;
    const double ph = kPanelH - kMarginT - kMarginB;
    fig.frame(px, py, pw, ph, {kAxis, 1.0, {}});
    fig.text(geo.x0 + kPanelW / 2.0, geo.y0 + kMarginT - 12, title, 12,
             plot::Anchor::Middle);
    for (int i = 0; i <= 5; ++i) {
        const double acc = i / 5.0;
        const double y = geo.map_y(acc);
        fig.line(px - 3, y, px, y, {kAxis, 1.0, {}});
        fig.text(px - 6, y + 3, fmt1(acc), 9, plot::Anchor::End);
        if (i > 0 && i < 5) {
            fig.line(px, y, px + pw, y, {plot::Color{225, 225, 225}, 0.6, {}});
        }
    }
    const int step = max_layer > 16 ? 4 : max_layer > 8 ? 2 : 1;
    for (int layer = 1; layer <= max_layer; layer += step) {
        const double x = geo.map_x(layer, max_layer);
        fig.line(x, py + ph, x, py + ph + 3, {kAxis, 1.0, {}});
        fig.text(x, py + ph + 14, std::to_string(layer), 9, plot::Anchor::Middle);
    }
    fig.text(geo.x0 + kMarginL + pw / 2.0, geo.y0 + kPanelH - 8, "layer", 10,
             plot::Anchor::Middle);
}

}  // namespace

void render_layer_curves(const std::vector<SummaryRow>& summary,
                         const CurveSpec& spec,
                         const std::filesystem::path& out_base) {
    std::vector<const SummaryRow*> rows;
    for (const auto& r : summary) {
        if (r.config == spec.config) rows.push_back(&r);
    }
    if (rows.empty()) {
        throw DataError("render_layer_curves: no summary rows for config '" +
                        spec.config + "'");
    }

    std::vector<std::string> models = spec.models;
    if (models.empty()) {
        std::set<std::string> seen;
        for (const auto* r : rows) {
            if (r->mode == CellMode::Unk || r->mode == CellMode::Prep ||
                r->mode == CellMode::Control) {
                if (seen.insert(r->model_id).second) models.push_back(r->model_id);
            }
        }
        std::sort(models.begin(), models.end());
    }
    if (models.empty()) {
        throw DataError("render_layer_curves: no contextual series for config '" +
                        spec.config + "'");
    }

    int max_layer = 0;
    for (const auto* r : rows) {
        if (r->layer) max_layer = std::max(max_layer, *r->layer);
    }
    if (max_layer < 1) {
        throw DataError("render_layer_curves: no layer-indexed series for '" +
                        spec.config + "'");
    }

    const int cols = models.size() > 1 ? 2 : 1;
    const int grid_rows = (static_cast<int>(models.size()) + cols - 1) / cols;
    const int title_h = spec.title.empty() ? 0 : 22;
    plot::Figure fig(cols * kPanelW, grid_rows * kPanelH + title_h + 26);
    if (!spec.title.empty()) {
        fig.text(cols * kPanelW / 2.0, 16, spec.title, 13, plot::Anchor::Middle);
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
        const std::string& model = models[m];
        PanelGeometry geo{static_cast<double>((m % cols) * kPanelW),
                          static_cast<double>((m / cols) * kPanelH + title_h)};
        draw_axes(fig, geo, max_layer, short_label(model));

        auto series_points = [&](CellMode mode, int train_size) {
            std::vector<std::pair<double, double>> pts;
            for (int layer = 1; layer <= max_layer; ++layer) {
                for (const auto* r : rows) {
                    if (r->model_id == model && r->mode == mode && r->layer &&
                        *r->layer == layer && r->train_size == train_size) {
                        pts.emplace_back(geo.map_x(layer, max_layer),
                                         geo.map_y(r->mean_accuracy));
                    }
                }
            }
            return pts;
        };

        // Train sizes present for this model's contextual series, descending
        // so the full run draws darkest.
        std::vector<int> sizes = spec.train_sizes;
        if (sizes.empty()) {
            std::set<int> found;
            for (const auto* r : rows) {
                if (r->model_id == model &&
                    (r->mode == CellMode::Unk || r->mode == CellMode::Prep)) {
                    found.insert(r->train_size);
                }
            }
            sizes.assign(found.rbegin(), found.rend());
        }
        if (sizes.empty()) {
            throw DataError("render_layer_curves: no contextual cells for model '" +
                            model + "' in config '" + spec.config + "'");
        }

        bool drew_any = false;
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            const double fade =
                sizes.size() > 1 ? 0.65 * static_cast<double>(s) / (sizes.size() - 1) : 0.0;
            auto unk = series_points(CellMode::Unk, sizes[s]);
            if (!unk.empty()) {
                fig.polyline(unk, {plot::lighten(kUnkColor, fade), 1.6, {}},
                             plot::Marker::Square, 2.5);
                drew_any = true;
            }
            auto prep = series_points(CellMode::Prep, sizes[s]);
            if (!prep.empty()) {
                fig.polyline(prep, {plot::lighten(kPrepColor, fade), 1.6, {}},
                             plot::Marker::Triangle, 3.0);
                drew_any = true;
            }
        }
        if (!drew_any) {
            throw DataError("render_layer_curves: empty series for model '" + model +
                            "', config '" + spec.config + "'");
        }

        // Control: solid grey, full train size only (whatever sizes exist).
        std::set<int> control_sizes;
        for (const auto* r : rows) {
            if (r->model_id == model && r->mode == CellMode::Control) {
                control_sizes.insert(r->train_size);
            }
        }
        for (int cs : control_sizes) {
            auto control = series_points(CellMode::Control, cs);
            if (!control.empty()) {
                fig.polyline(control, {kGrey, 1.2, {}}, plot::Marker::None);
            }
        }

        // Static baselines: horizontal reference lines (layer-independent).
        const double px = geo.x0 + kMarginL;
        const double pw = kPanelW - kMarginL - kMarginR;
        bool first_static = true;
        for (const auto* r : rows) {
            if (r->layer || (r->mode != CellMode::StaticLemma &&
                             r->mode != CellMode::StaticForm)) {
                continue;
            }
            const double y = geo.map_y(r->mean_accuracy);
            const std::vector<double> dash = r->mode == CellMode::StaticLemma
                                                 ? std::vector<double>{6, 4}
                                                 : std::vector<double>{2, 3};
            fig.line(px, y, px + pw, y, {kGrey, 1.2, dash});
            (void)first_static;
            first_static = false;
        }
    }

    // Legend strip.
    const double ly = grid_rows * kPanelH + title_h + 14;
    double lx = 16;
    auto legend_entry = [&](const std::string& name, plot::Color color,
                            plot::Marker marker, const std::vector<double>& dash) {
        fig.polyline({{lx, ly}, {lx + 22, ly}}, {color, 1.6, dash}, marker, 2.5);
        fig.text(lx + 28, ly + 3, name, 9);
        lx += 28 + 6.5 * name.size() + 14;
    };
    legend_entry("UNK", kUnkColor, plot::Marker::Square, {});
    legend_entry("PREP", kPrepColor, plot::Marker::Triangle, {});
    legend_entry("control", kGrey, plot::Marker::None, {});
    legend_entry("static (lemma)", kGrey, plot::Marker::None, {6, 4});
    legend_entry("static (form)", kGrey, plot::Marker::None, {2, 3});

    fig.save_svg(out_base.string() + ".svg");
    fig.save_png(out_base.string() + ".png");
}

void render_confusion(const std::vector<ConfusionPanel>& panels,
                      const std::filesystem::path& out_base) {
    if (panels.empty()) throw DataError("render_confusion: no panels");
    for (const auto& p : panels) {
        const std::size_t k = p.labels.size();
        if (k == 0 || p.matrix.size() != k * k) {
            throw DataError("render_confusion: panel '" + p.title +
                            "' matrix is not square against its labels");
        }
    }

    const int k = static_cast<int>(panels.front().labels.size());
    const int cell = 64;
    const int label_w = 120;
    const int top = 56;
    const int panel_w = label_w + k * cell + 24;
    const int panel_h = top + k * cell + 70;
    plot::Figure fig(static_cast<int>(panels.size()) * panel_w, panel_h);

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const int pk = static_cast<int>(panel.labels.size());
        const double x0 = static_cast<double>(pi) * panel_w + label_w;
        const double y0 = top;
        long long max_count = 1;
        for (long long v : panel.matrix) max_count = std::max(max_count, v);

        fig.text(x0 + pk * cell / 2.0, 20, panel.title, 12, plot::Anchor::Middle);
        fig.text(x0 + pk * cell / 2.0, 36, "predicted", 9, plot::Anchor::Middle);

        for (int r = 0; r < pk; ++r) {
            for (int c = 0; c < pk; ++c) {
                const long long v = panel.matrix[static_cast<std::size_t>(r * pk + c)];
                const double intensity =
                    static_cast<double>(v) / static_cast<double>(max_count);
                // white -> blue ramp
                const auto shade = static_cast<std::uint8_t>(255 - intensity * 160);
                plot::Color fill{shade, shade, 255};
                fig.rect(x0 + c * cell, y0 + r * cell, cell, cell, fill);
                fig.frame(x0 + c * cell, y0 + r * cell, cell, cell,
                          {plot::Color{160, 160, 160}, 0.8, {}});
                fig.text(x0 + c * cell + cell / 2.0, y0 + r * cell + cell / 2.0 + 4,
                         std::to_string(v), 11, plot::Anchor::Middle);
            }
            fig.text(x0 - 8, y0 + r * cell + cell / 2.0 + 3,
                     short_label(panel.labels[static_cast<std::size_t>(r)], 18), 9,
                     plot::Anchor::End);
        }
        for (int c = 0; c < pk; ++c) {
            fig.text(x0 + c * cell + cell / 2.0, y0 + pk * cell + 14,
                     short_label(panel.labels[static_cast<std::size_t>(c)], 12), 8,
                     plot::Anchor::Middle);
        }
        fig.text(static_cast<double>(pi) * panel_w + 14, y0 + pk * cell / 2.0, "true",
                 9, plot::Anchor::Start);
    }

    fig.save_svg(out_base.string() + ".svg");
    fig.save_png(out_base.string() + ".png");
}

void export_pca_coords(const PcaResult& pca,
                       const std::map<std::string, std::string>& labels,
                       const std::filesystem::path& out_path) {
    io::Table t;
    t.delimiter = out_path.extension() == ".csv" ? ',' : '\t';
    t.header = {"id", "label", "pc1", "pc2", "pc3", "evr1", "evr2", "evr3"};
    auto fmtd = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < pca.ids.size(); ++i) {
        const auto it = labels.find(pca.ids[i]);
        t.rows.push_back({pca.ids[i], it == labels.end() ? "" : it->second,
                          fmtd(pca.coords(static_cast<Eigen::Index>(i), 0)),
                          fmtd(pca.coords(static_cast<Eigen::Index>(i), 1)),
                          fmtd(pca.coords(static_cast<Eigen::Index>(i), 2)),
                          fmtd(pca.explained_variance_ratio[0]),
                          fmtd(pca.explained_variance_ratio[1]),
                          fmtd(pca.explained_variance_ratio[2])});
    }
    io::write_table(out_path, t);
}

void render_pca(const PcaResult& pca,
                const std::map<std::string, std::string>& labels,
                const std::string& title, const std::filesystem::path& out_base) {
    const int size = 420;
    plot::Figure fig(size, size + 30);
    fig.text(size / 2.0, 18, title, 12, plot::Anchor::Middle);

    // Fixed orthographic view of the 3-D cloud.
    const double cb = std::cos(0.6), sb = std::sin(0.6);
    const double ca = std::cos(0.35), sa = std::sin(0.35);
    std::vector<double> xs, ys;
    xs.reserve(pca.ids.size());
    ys.reserve(pca.ids.size());
    for (Eigen::Index i = 0; i < pca.coords.rows(); ++i) {
        const double x = pca.coords(i, 0), y = pca.coords(i, 1), z = pca.coords(i, 2);
        xs.push_back(cb * x + sb * y);
        ys.push_back(-sa * (sb * x - cb * y) + ca * z);
    }
    double min_x = xs[0], max_x = xs[0], min_y = ys[0], max_y = ys[0];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        min_x = std::min(min_x, xs[i]);
        max_x = std::max(max_x, xs[i]);
        min_y = std::min(min_y, ys[i]);
        max_y = std::max(max_y, ys[i]);
    }
    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);

    std::set<std::string> label_set;
    for (const auto& id : pca.ids) {
        auto it = labels.find(id);
        label_set.insert(it == labels.end() ? "" : it->second);
    }
    const std::vector<plot::Color> palette = {
        {200, 30, 30}, {30, 120, 40}, {30, 60, 200}, {235, 140, 20},
        {120, 30, 160}, {0, 150, 150},
    };
    std::map<std::string, plot::Color> color_of;
    std::size_t ci = 0;
    for (const auto& l : label_set) {
        color_of[l] = palette[ci % palette.size()];
        ++ci;
    }

    const double pad = 28;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = pad + (xs[i] - min_x) / span_x * (size - 2 * pad);
        const double py = 30 + pad + (1.0 - (ys[i] - min_y) / span_y) * (size - 2 * pad);
        auto it = labels.find(pca.ids[i]);
        fig.circle(px, py, 2.2, color_of[it == labels.end() ? "" : it->second]);
    }
    double lx = 14;
    double ly = size + 18;
    for (const auto& [label, color] : color_of) {
        fig.circle(lx, ly - 3, 3, color);
        const std::string txt = label.empty() ? "(none)" : short_label(label, 28);
        fig.text(lx + 8, ly, txt, 9);
        lx += 8 + 6.5 * txt.size() + 16;
    }

    fig.save_svg(out_base.string() + ".svg");
    fig.save_png(out_base.string() + ".png");
}

}  // namespace cxnprobe
