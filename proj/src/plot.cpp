#include "menuforge/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "menuforge/errors.hpp"
#include "menuforge/numeric.hpp"

namespace menuforge {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 40.0;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string num(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Line {
    double y0;  // value at x = 0 (all mass on the first outcome)
    double y1;  // value at x = 1
    double at(double x) const { return y0 + (y1 - y0) * x; }
};

}  // namespace

std::string render_plot_svg(const ProblemInstance& inst, const Menu& menu) {
    if (inst.outcome_count() != 2)
        throw PreconditionError("plotting requires binary outcome (got " +
                                std::to_string(inst.outcome_count()) + " outcomes)");
    if (menu.pieces.empty()) throw PreconditionError("cannot plot an empty menu");
    if (menu.outcome_count() != 2)
        throw DimensionError("menu outcome count", 2, menu.outcome_count());

    std::vector<Line> lines;
    lines.reserve(menu.pieces.size());
    for (const auto& piece : menu.pieces)
        lines.push_back({piece.slope[0] - piece.intercept, piece.slope[1] - piece.intercept});

    // Upper envelope: evaluate at 0, 1, and every pairwise crossing inside.
    std::vector<double> xs = {0.0, 1.0};
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            double d = (lines[i].y1 - lines[i].y0) - (lines[j].y1 - lines[j].y0);
            if (std::fabs(d) < 1e-12) continue;
            double x = (lines[j].y0 - lines[i].y0) / d;
            if (x > 0.0 && x < 1.0) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
             xs.end());
    std::vector<std::pair<double, double>> envelope;
    for (double x : xs) {
        double best = lines.front().at(x);
        for (const auto& line : lines) best = std::max(best, line.at(x));
        envelope.push_back({x, best});
    }

    // Lower hull of the action cost points (marginal belief, cost).
    std::vector<std::pair<double, double>> costs;
    for (std::size_t a = 0; a < inst.action_count(); ++a)
        costs.push_back({inst.marginal(a)[1], inst.cost(a)});
    std::vector<std::pair<double, double>> sorted = costs;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : sorted) {
        while (hull.size() >= 2) {
            const auto& o = hull[hull.size() - 2];
            const auto& a = hull[hull.size() - 1];
            double cross = (a.first - o.first) * (p.second - o.second) -
                           (a.second - o.second) * (p.first - o.first);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    std::vector<double> ticks;
    for (const auto& d : menu.designations) ticks.push_back(d.anchor[1]);
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        ticks.push_back(inst.marginal(a)[1]);
        for (std::size_t s = 0; s < inst.signal_count(); ++s)
            ticks.push_back(inst.conditional(a, s)[1]);
    }
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                ticks.end());

    double lo = 0.0, hi = 0.0;
    for (const auto& line : lines) {
        lo = std::min({lo, line.y0, line.y1});
        hi = std::max({hi, line.y0, line.y1});
    }
    for (const auto& c : costs) {
        lo = std::min(lo, c.second);
        hi = std::max(hi, c.second);
    }
    double span = hi - lo;
    if (span < 1e-9) span = 1.0;
    double pad = 0.08 * span;
    double y_lo = lo - pad;
    double y_hi = hi + pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto sx = [&](double x) { return kMarginLeft + x * plot_w; };
    auto sy = [&](double y) {
        return kMarginTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
          "viewBox=\"0 0 640 480\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";

    // Axes.
    double x_axis = sy(std::max(0.0, y_lo));
    os << "<line x1=\"" << px(kMarginLeft) << "\" y1=\"" << px(x_axis) << "\" x2=\""
       << px(kWidth - kMarginRight) << "\" y2=\"" << px(x_axis)
       << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << px(kMarginLeft) << "\" y1=\"" << px(kMarginTop) << "\" x2=\""
       << px(kMarginLeft) << "\" y2=\"" << px(kHeight - kMarginBottom)
       << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << px(kMarginLeft) << "\" y=\"" << px(kHeight - 12.0)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">0</text>\n";
    os << "<text x=\"" << px(kWidth - kMarginRight - 8.0) << "\" y=\"" << px(kHeight - 12.0)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">1</text>\n";
    os << "<text x=\"" << px(kWidth / 2.0 - 40.0) << "\" y=\"" << px(kHeight - 12.0)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">P("
       << inst.outcomes().label(1) << ")</text>\n";
    os << "<text x=\"8\" y=\"" << px(sy(y_hi) + 12.0)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">" << num(y_hi)
       << "</text>\n";
    os << "<text x=\"8\" y=\"" << px(sy(y_lo))
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">" << num(y_lo)
       << "</text>\n";

    // One thin line per contract.
    for (const auto& line : lines) {
        os << "<line x1=\"" << px(sx(0.0)) << "\" y1=\"" << px(sy(line.y0)) << "\" x2=\""
           << px(sx(1.0)) << "\" y2=\"" << px(sy(line.y1))
           << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    }

    // Their upper envelope.
    os << "<polyline points=\"";
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        if (i) os << " ";
        os << px(sx(envelope[i].first)) << "," << px(sy(envelope[i].second));
    }
    os << "\" fill=\"none\" stroke=\"#0066cc\" stroke-width=\"2\"/>\n";

    // Cost points and their lower hull.
    if (hull.size() >= 2) {
        os << "<polyline points=\"";
        for (std::size_t i = 0; i < hull.size(); ++i) {
            if (i) os << " ";
            os << px(sx(hull[i].first)) << "," << px(sy(hull[i].second));
        }
        os << "\" fill=\"none\" stroke=\"#cc3300\" stroke-width=\"1.5\" "
              "stroke-dasharray=\"6 4\"/>\n";
    }
    for (const auto& c : costs) {
        os << "<circle cx=\"" << px(sx(c.first)) << "\" cy=\"" << px(sy(c.second))
           << "\" r=\"3\" fill=\"#cc3300\"/>\n";
    }

    // Belief ticks along the x axis.
    for (double t : ticks) {
        os << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(kHeight - kMarginBottom)
           << "\" x2=\"" << px(sx(t)) << "\" y2=\"" << px(kHeight - kMarginBottom + 6.0)
           << "\" stroke=\"#0066cc\" stroke-width=\"1\"/>\n";
    }

    // Everything above, restated in data coordinates.
    os << "<!-- data:\n";
    os << "pieces " << lines.size() << "\n";
    for (std::size_t i = 0; i < lines.size(); ++i)
        os << "piece " << i << " " << num(lines[i].y0) << " " << num(lines[i].y1) << "\n";
    os << "envelope";
    for (const auto& [x, y] : envelope) os << " " << num(x) << " " << num(y);
    os << "\ncosts " << costs.size() << "\n";
    for (std::size_t a = 0; a < costs.size(); ++a)
        os << "cost " << a << " " << num(costs[a].first) << " " << num(costs[a].second) << "\n";
    os << "hull";
    for (const auto& [x, y] : hull) os << " " << num(x) << " " << num(y);
    os << "\nticks";
    for (double t : ticks) os << " " << num(t);
    os << "\n-->\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace menuforge
