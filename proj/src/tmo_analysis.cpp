#include "flarekit/tmo_analysis.hpp"

#include "flarekit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flarekit::tmo {

namespace {

void check_ratio(double eps, const char* name) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw ParameterError(std::string(name) + " must be finite and >= 0, got " +
                             std::to_string(eps));
    }
}

void check_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw DomainError(std::string(name) + " must lie in (0,1), got " + std::to_string(v));
    }
}

double coefficient_major(double e) { return 1.0 + 3.0 * e + 3.0 * e * e; }

double minor_weight(double e) { return (e / 3.0) / (coefficient_major(e) + e / 3.0); }

// Shared evaluation of both regimes: the dominant layer has tone-mapped value
// `dominant_rgb`, the minor layer sits at `ratio` times its raw value.
TmoAnalysisReport evaluate(double dominant_rgb, double ratio, const ToneMapOp& op) {
    TmoAnalysisReport r;
    const double raw_dominant = op.inverse(dominant_rgb);
    const double raw_minor = ratio * raw_dominant;
    r.dominant_rgb = dominant_rgb;
    r.minor_rgb = op.forward(std::min(raw_minor, 1.0));
    r.exact = composite_exact(raw_dominant, std::min(raw_minor, 1.0), op);

    const double w = minor_weight(ratio);
    r.approx = (1.0 - w) * dominant_rgb + w * r.minor_rgb;
    r.approx_unnormalized = coefficient_major(ratio) * dominant_rgb + (ratio / 3.0) * r.minor_rgb;
    r.residual = std::abs(r.exact - r.approx);
    r.residual_unnormalized = std::abs(r.exact - r.approx_unnormalized);
    return r;
}

} // namespace

double composite_exact(double raw_a, double raw_b, const ToneMapOp& op) {
    if (!(raw_a >= 0.0 && raw_a <= 1.0) || !(raw_b >= 0.0 && raw_b <= 1.0)) {
        throw DomainError("raw values must lie in [0,1]");
    }
    return op.forward(std::clamp(raw_a + raw_b, 0.0, 1.0));
}

double epsilon2_of(double eps1) {
    check_ratio(eps1, "eps1");
    return minor_weight(eps1);
}

double epsilon4_of(double eps3) {
    check_ratio(eps3, "eps3");
    return minor_weight(eps3);
}

TmoAnalysisReport bright_regime_residual(double b_rgb, double eps1, const ToneMapOp& op) {
    check_open_unit(b_rgb, "b_rgb");
    check_ratio(eps1, "eps1");
    auto r = evaluate(b_rgb, eps1, op);
    r.regime = Regime::Bright;
    r.epsilon1 = eps1;
    r.epsilon2 = minor_weight(eps1);
    return r;
}

TmoAnalysisReport dark_regime_residual(double s_rgb, double eps3, const ToneMapOp& op) {
    check_open_unit(s_rgb, "s_rgb");
    check_ratio(eps3, "eps3");
    auto r = evaluate(s_rgb, eps3, op);
    r.regime = Regime::Dark;
    r.epsilon3 = eps3;
    r.epsilon4 = minor_weight(eps3);
    return r;
}

std::vector<double> halving_sequence(double start, double stop) {
    if (!(start > 0.0) || !(stop > 0.0) || stop > start) {
        throw ParameterError("halving sequence needs 0 < stop <= start");
    }
    std::vector<double> seq;
    for (double e = start; e > stop; e /= 2.0) seq.push_back(e);
    seq.push_back(stop);
    return seq;
}

std::vector<TmoAnalysisReport> residual_series(const ToneMapOp& op,
                                               std::span<const double> b_values,
                                               std::span<const double> eps1_values) {
    std::vector<TmoAnalysisReport> out;
    out.reserve(b_values.size() * eps1_values.size());
    for (double b : b_values) {
        for (double e : eps1_values) out.push_back(bright_regime_residual(b, e, op));
    }
    return out;
}

std::vector<SweepRow> regime_weight_sweep(const ToneMapOp& op, double step, double scene_raw) {
    if (!(step > 0.0 && step < 0.5)) {
        throw ParameterError("sweep step must lie in (0, 0.5), got " + std::to_string(step));
    }
    if (!(scene_raw > 0.0 && scene_raw < 1.0)) {
        throw ParameterError("scene raw value must lie in (0,1)");
    }
    const double scene_rgb = op.forward(scene_raw);

    std::vector<SweepRow> rows;
    for (long k = 0;; ++k) {
        const double flare_raw = std::max(1.0 - static_cast<double>(k) * step, 0.0);
        SweepRow row;
        row.flare_raw = flare_raw;
        row.flare_rgb = op.forward(flare_raw);
        row.scene_rgb = scene_rgb;
        row.exact = composite_exact(flare_raw, scene_raw, op);

        const double gap = row.flare_rgb - scene_rgb;
        if (gap == 0.0) {
            row.flare_weight = 0.5; // both layers equal: every weight reproduces the same blend
        } else {
            row.flare_weight = std::clamp((row.exact - scene_rgb) / gap, 0.0, 1.0);
        }
        row.scene_weight = 1.0 - row.flare_weight;
        row.model_flare_weight = flare_raw >= scene_raw
                                     ? 1.0 - minor_weight(scene_raw / flare_raw)
                                     : minor_weight(flare_raw / scene_raw);
        rows.push_back(row);
        if (flare_raw == 0.0) break;
    }
    return rows;
}

} // namespace flarekit::tmo
