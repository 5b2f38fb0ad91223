#include "pyratext/sweep.hpp"

#include "pyratext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>

namespace pyratext {

SweepReport lr_sweep(const TrainConfig& base, std::span<const double> rates, const DatasetSplit& train_split,
                     const DatasetSplit& eval_split, std::size_t max_threads) {
    if (rates.size() < 2) throw ConfigError("sweep needs at least 2 learning rates");
    for (double r : rates)
        if (!(r > 0.0)) throw ConfigError("sweep learning rates must be > 0");
    if (eval_split.examples.empty()) throw DataError("sweep needs a non-empty eval split");

    auto run_one = [&](double rate) {
        TrainConfig cfg = base;
        cfg.learning_rate = rate;
        auto result = train(cfg, train_split, eval_split);
        const auto& last = result.history.epochs.back();
        return SweepRow{rate, last.eval->macro_ovr_auc, last.eval->accuracy, last.train_loss};
    };

    // Each run owns its model, so running rates side by side changes nothing
    // but wall time. Rows (and the first exception) keep rate order.
    SweepReport report;
    const std::size_t width = std::max<std::size_t>(1, max_threads);
    for (std::size_t start = 0; start < rates.size(); start += width) {
        std::vector<std::future<SweepRow>> running;
        const std::size_t stop = std::min(rates.size(), start + width);
        for (std::size_t i = start; i < stop; ++i)
            running.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, run_one, rates[i]));
        for (auto& f : running) report.rows.push_back(f.get());
    }
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (report.rows[i].auc > report.rows[report.best].auc) report.best = i;
    return report;
}

std::string sweep_csv(const SweepReport& report) {
    std::string out = "rate,auc,accuracy,final_train_loss,best\n";
    char buf[160];
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", r.rate, r.auc, r.accuracy, r.final_train_loss,
                      i == report.best ? 1 : 0);
        out += buf;
    }
    return out;
}

std::string sweep_svg(const SweepReport& report) {
    constexpr double W = 480, H = 320, left = 60, right = 20, top = 20, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : report.rows) {
        const double x = std::log10(r.rate);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, r.auc);
        ymax = std::max(ymax, r.auc);
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    // Pad the AUC range so a flat curve stays visible.
    const double pad = std::max(0.01, (ymax - ymin) * 0.1);
    ymin = std::max(0.0, ymin - pad);
    ymax = std::min(1.0, ymax + pad);
    if (ymax - ymin < 1e-12) ymin = ymax - 0.02;

    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n", W, H,
                  W, H);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  left, top + ph, left + pw, top + ph, left, top, left, top + ph);
    svg += buf;

    std::string points;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", points.empty() ? "" : " ", sx(std::log10(r.rate)), sy(r.auc));
        points += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (const auto& r : report.rows) {
        const double x = sx(std::log10(r.rate));
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\"/>\n", x, sy(r.auc));
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%g\" font-size=\"11\" text-anchor=\"middle\">%.0e</text>\n", x,
                      top + ph + 18, r.rate);
        svg += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.3f</text>\n"
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.3f</text>\n",
                  left - 6, top + 4, ymax, left - 6, top + ph, ymin);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">learning rate (log scale)</text>\n"
                  "<text x=\"14\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 %g)\">AUC</text>\n",
                  left + pw / 2, H - 8, top + ph / 2, top + ph / 2);
    svg += buf;
    svg += "</svg>\n";
    return svg;
}

} // namespace pyratext
