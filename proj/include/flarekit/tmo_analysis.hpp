#pragma once

#include "flarekit/color.hpp"

#include <span>
#include <vector>

namespace flarekit::tmo {

/// T(clip(raw_a + raw_b, 0, 1)): two layers added before tone mapping, with
/// the HDR domain taken as [0,1].
double composite_exact(double raw_a, double raw_b, const ToneMapOp& op);

/// Normalized weight of the minor layer in the smooth-step expansion:
/// (e/3) / (1 + 3e + 3e^2 + e/3). Throws ParameterError for a negative or
/// non-finite ratio.
double epsilon2_of(double eps1);
/// Dark-regime counterpart; the same rational form in the dark ratio.
double epsilon4_of(double eps3);

enum class Regime { Bright, Dark };

/// One evaluation of the convex-combination approximation against the exact
/// tone-mapped sum. In the bright regime the dominant pixel is a bright flare
/// pixel b and the minor one a scene pixel s with T^-1(s) = eps1 T^-1(b); in
/// the dark regime the dominant one is the scene pixel s and the minor one a
/// dark flare pixel d with T^-1(d) = eps3 T^-1(s).
struct TmoAnalysisReport {
    Regime regime = Regime::Bright;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    double epsilon3 = 0.0;
    double epsilon4 = 0.0;
    double dominant_rgb = 0.0; // b (bright) or s (dark)
    double minor_rgb = 0.0;    // s (bright) or d (dark)
    double exact = 0.0;
    double approx = 0.0;              // after dividing by the coefficient sum
    double approx_unnormalized = 0.0; // (1 + 3e + 3e^2) dominant + (e/3) minor
    double residual = 0.0;            // |exact - approx|
    double residual_unnormalized = 0.0;
};

/// Throws DomainError unless b_rgb in (0,1), ParameterError for eps1 < 0.
TmoAnalysisReport bright_regime_residual(double b_rgb, double eps1, const ToneMapOp& op);
/// Throws DomainError unless s_rgb in (0,1), ParameterError for eps3 < 0.
TmoAnalysisReport dark_regime_residual(double s_rgb, double eps3, const ToneMapOp& op);

/// Ratios halving from `start` until they would fall below `stop`; `stop`
/// itself closes the sequence. Strictly decreasing.
std::vector<double> halving_sequence(double start = 0.1, double stop = 1e-4);

/// bright_regime_residual for every (b, eps1) pair, b-major.
std::vector<TmoAnalysisReport> residual_series(const ToneMapOp& op,
                                               std::span<const double> b_values,
                                               std::span<const double> eps1_values);

struct SweepRow {
    double flare_raw = 0.0;
    double flare_rgb = 0.0;
    double scene_rgb = 0.0;
    double exact = 0.0;
    /// Weight w in [0,1] with (1-w) scene_rgb + w flare_rgb closest to the
    /// exact composite; solved in closed form and clamped.
    double flare_weight = 0.0;
    double scene_weight = 0.0;
    /// Weight predicted by the small-ratio expansion: 1 - eps2(scene/flare)
    /// for a flare brighter than the scene, eps4(flare/scene) otherwise.
    double model_flare_weight = 0.0;
};

inline constexpr double kDefaultSweepSceneRaw = 0.1;

/// Flare raw values from 1 down to 0 in steps of `step`, against a fixed dim
/// scene. Throws ParameterError unless step in (0, 0.5) and scene_raw in (0,1).
std::vector<SweepRow> regime_weight_sweep(const ToneMapOp& op, double step,
                                          double scene_raw = kDefaultSweepSceneRaw);

} // namespace flarekit::tmo
