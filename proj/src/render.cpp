#include "dsp/render.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace dsp {

namespace {

constexpr double kMargin = 30;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string color(const std::string& id, int seed, bool extra) {
    if (extra) return "#bbbbbb";
    std::uint32_t h = 2166136261u ^ std::uint32_t(seed);
    for (unsigned char c : id) h = (h ^ c) * 16777619u;
    int hue = int(h % 360);
    return "hsl(" + std::to_string(hue) + ",55%,65%)";
}

}  // namespace

std::string render_svg(const Packing& p, const RenderSpec& spec) {
    if (spec.widthPx <= 0 || spec.heightPx <= 0) throw InputError("render size must be positive");
    const double W = spec.widthPx, Hpx = spec.heightPx;
    const double plotW = W - 2 * kMargin, plotH = Hpx - 2 * kMargin;
    ItemSet items = p.assigned_items();
    HeightProfile prof = partial_profile(p);
    Scalar top = prof.peak();
    Scalar lo = min_of(Scalar(0), prof.breaks.front()), hi = max_of(p.deadline(), prof.breaks.back());
    if (top == 0) top = 1;
    auto X = [&](const Scalar& t) { return kMargin + to_double(Scalar((t - lo) / (hi - lo))) * plotW; };
    auto Y = [&](const Scalar& y) { return Hpx - kMargin - to_double(Scalar(y / top)) * plotH; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.widthPx << "\" height=\"" << spec.heightPx
      << "\" viewBox=\"0 0 " << spec.widthPx << " " << spec.heightPx << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << spec.widthPx << "\" height=\"" << spec.heightPx
      << "\" fill=\"white\"/>\n";

    // stacking offsets per elementary segment; runs with an unchanged offset merge
    std::vector<Scalar> cuts{lo, hi};
    for (size_t k : items) {
        cuts.push_back(p.start(k));
        cuts.push_back(p.end(k));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    ItemSet order = sorted_by_height(p, items);
    struct Run {
        Scalar from, to, base;
    };
    std::map<size_t, std::vector<Run>> runs;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const Scalar &a = cuts[c], &b = cuts[c + 1];
        Scalar base = 0;
        for (size_t k : order) {
            if (!(p.start(k) <= a && b <= p.end(k))) continue;
            std::vector<Run>& r = runs[k];
            if (!r.empty() && r.back().to == a && r.back().base == base)
                r.back().to = b;
            else
                r.push_back({a, b, base});
            base += p.item(k).height;
        }
    }
    for (size_t k : order) {
        const Item& it = p.item(k);
        for (const Run& r : runs[k]) {
            double x0 = X(r.from), x1 = X(r.to), y1 = Y(r.base), y0 = Y(r.base + it.height);
            s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
              << num(y1 - y0) << "\" fill=\"" << color(it.id, spec.colorSeed, p.is_extra(k))
              << "\" stroke=\"black\" stroke-width=\"0.5\"><title>" << it.id << "</title></rect>\n";
            if (spec.annotate)
                s << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num((y0 + y1) / 2)
                  << "\" font-size=\"10\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << it.id
                  << "</text>\n";
        }
    }

    if (spec.showProfile && !items.empty()) {
        s << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
        for (size_t j = 0; j < prof.levels.size(); ++j) {
            if (j) s << " ";
            s << num(X(prof.breaks[j])) << "," << num(Y(prof.levels[j])) << " " << num(X(prof.breaks[j + 1])) << ","
              << num(Y(prof.levels[j]));
        }
        s << "\"/>\n";
    }

    // axes
    double x0 = X(lo), xD = X(p.deadline()), y0 = Y(0);
    s << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(W - kMargin + 10) << "\" y2=\""
      << num(y0) << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(kMargin - 10)
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << num(xD) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(xD) << "\" y2=\"" << num(kMargin - 10)
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    s << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
      << to_string(lo) << "</text>\n";
    s << "<text x=\"" << num(xD) << "\" y=\"" << num(y0 + 16) << "\" font-size=\"11\" text-anchor=\"middle\">D="
      << to_string(p.deadline()) << "</text>\n";
    s << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(Y(top)) << "\" font-size=\"11\" text-anchor=\"end\">"
      << (items.empty() ? std::string("0") : to_string(prof.peak())) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace dsp
