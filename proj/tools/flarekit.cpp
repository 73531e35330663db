// flarekit command-line front end.
//
// Exit codes: 0 success, 2 user or input error, 3 I/O error.

#include "flarekit/batch.hpp"
#include "flarekit/color.hpp"
#include "flarekit/errors.hpp"
#include "flarekit/io.hpp"
#include "flarekit/metrics.hpp"
#include "flarekit/recovery.hpp"
#include "flarekit/synthesis.hpp"
#include "flarekit/tmo_analysis.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace flarekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 2;
constexpr int kExitIo = 3;

struct UsageError : Error {
    using Error::Error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void require_file(const fs::path& p, const char* what) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
        throw UsageError(std::string(what) + " '" + p.string() + "' does not exist");
    }
}

void require_dir(const fs::path& p, const char* what) {
    std::error_code ec;
    if (!fs::is_directory(p, ec)) {
        throw UsageError(std::string(what) + " '" + p.string() + "' is not a directory");
    }
}

// Writes CSV text to `out` (or stdout when empty).
void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + out + "'");
    f << text;
    f.flush();
    if (!f) throw IoError("write failed for '" + out + "'");
}

bool has_extension(const fs::path& p, const char* ext) {
    auto e = p.extension().string();
    for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e == ext;
}

void write_linear(const fs::path& path, const LinearImage& img, double gamma, int depth) {
    if (has_extension(path, ".pfm")) {
        io::write_pfm(path, img);
    } else {
        io::write_png(path, gamma_encode(img, gamma, depth));
    }
}

ToneMapOp make_tmo(const std::string& name, double k, double m) {
    if (name == "smooth-step") return ToneMapOp::smooth_step();
    if (name == "logistic") return ToneMapOp::logistic(k, m);
    throw UsageError("unknown tone curve '" + name + "'");
}

std::unique_ptr<DeflareOperator> make_operator(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        if (name == "identity") return std::make_unique<IdentityDeflare>();
        if (name == "darken") return std::make_unique<UniformDarken>(arg.empty() ? 0.5 : std::stod(arg));
        if (name == "blur") return std::make_unique<GaussianBlur>(arg.empty() ? 5 : std::stoi(arg));
    } catch (const std::logic_error&) {
        throw UsageError("bad operator argument in '" + text + "'");
    }
    throw UsageError("unknown operator '" + text + "' (identity, darken:F, blur:R)");
}

struct SynthOptions {
    std::string scenes, flares, out;
    std::uint64_t count = 0;
    std::optional<std::uint64_t> seed;
    std::string mode = "convex";
    double p_min = 4.0, p_max = 7.0, q = 0.5, noise_scale = 0.01, gamma = kDefaultGamma;
    int chi_df = 1, depth = 16;
    unsigned jobs = 1;
};

int run_synth(const SynthOptions& o) {
    require_dir(o.scenes, "scenes directory");
    require_dir(o.flares, "flares directory");

    batch::SynthJob job;
    job.scenes_dir = o.scenes;
    job.flares_dir = o.flares;
    job.out_dir = o.out;
    job.count = o.count;
    if (o.seed) {
        job.master_seed = *o.seed;
    } else if (const char* env = std::getenv("FLAREKIT_SEED")) {
        try {
            job.master_seed = std::stoull(env);
        } catch (const std::logic_error&) {
            throw UsageError(std::string("FLAREKIT_SEED is not an integer: ") + env);
        }
    }
    job.policy.mode = parse_blend_mode(o.mode);
    job.policy.p_min = o.p_min;
    job.policy.p_max = o.p_max;
    job.policy.q = o.q;
    job.policy.noise_scale = o.noise_scale;
    job.policy.chi_dof = o.chi_df;
    job.policy.gamma = o.gamma;
    job.policy.output_depth = o.depth;
    job.jobs = o.jobs;

    const fs::path manifest = batch::run_synthesis(job);
    std::cout << manifest.generic_string() << '\n';
    return kExitOk;
}

struct RecoverOptions {
    std::string input, deflared, op, out;
    double alpha = kDefaultRecoveryAlpha, gamma = kDefaultGamma;
    int depth = 16;
};

int run_recover(const RecoverOptions& o) {
    require_file(o.input, "input");
    if (o.deflared.empty() == o.op.empty()) {
        throw UsageError("give exactly one of --deflared or --op");
    }
    if (!o.deflared.empty()) require_file(o.deflared, "deflared image");

    const LinearImage input = io::read_linear(o.input, o.gamma);
    std::unique_ptr<DeflareOperator> op;
    if (!o.op.empty()) {
        op = make_operator(o.op);
    } else {
        op = std::make_unique<ExternalDeflare>(o.deflared, o.gamma);
    }
    const LinearImage deflared = op->apply(input);
    const LinearImage out = recover(input, deflared, o.alpha, [](std::string_view msg) {
        std::cerr << "flarekit: warning: " << msg << '\n';
    });
    write_linear(o.out, out, o.gamma, o.depth);
    return kExitOk;
}

struct AnalyzeOptions {
    std::string table = "residual", tmo = "smooth-step", out;
    std::vector<double> b_values{0.95, 0.99, 0.999};
    double eps_start = 0.1, eps_stop = 1e-4, step = 0.05, scene_raw = tmo::kDefaultSweepSceneRaw;
    double k = 10.0, m = 0.5;
};

int run_analyze(const AnalyzeOptions& o) {
    const ToneMapOp op = make_tmo(o.tmo, o.k, o.m);
    std::ostringstream csv;
    if (o.table == "residual") {
        const auto eps = tmo::halving_sequence(o.eps_start, o.eps_stop);
        csv << "b_rgb,eps1,exact,approx,residual\n";
        for (const auto& r : tmo::residual_series(op, o.b_values, eps)) {
            csv << num(r.dominant_rgb) << ',' << num(r.epsilon1) << ',' << num(r.exact) << ','
                << num(r.approx) << ',' << num(r.residual) << '\n';
        }
    } else if (o.table == "sweep") {
        csv << "flare_raw,flare_rgb,scene_rgb,exact,flare_weight,scene_weight,model_flare_weight\n";
        for (const auto& r : tmo::regime_weight_sweep(op, o.step, o.scene_raw)) {
            csv << num(r.flare_raw) << ',' << num(r.flare_rgb) << ',' << num(r.scene_rgb) << ','
                << num(r.exact) << ',' << num(r.flare_weight) << ',' << num(r.scene_weight)
                << ',' << num(r.model_flare_weight) << '\n';
        }
    } else {
        throw UsageError("unknown table '" + o.table + "' (residual, sweep)");
    }
    emit(csv.str(), o.out);
    return kExitOk;
}

struct HistOptions {
    std::string input, out;
    int bins = 32;
    double gamma = kDefaultGamma;
    bool stats = false;
};

int run_hist(const HistOptions& o) {
    require_file(o.input, "input");
    const Histogram h = histogram(io::read_linear(o.input, o.gamma), o.bins);
    std::ostringstream csv;
    if (o.stats) {
        csv << "pixels,mean,p10,p50,p90\n"
            << h.total << ',' << num(h.mean) << ',' << num(h.p10) << ',' << num(h.p50) << ','
            << num(h.p90) << '\n';
    } else {
        csv << "bin,lower,upper,count\n";
        for (int i = 0; i < h.bins; ++i) {
            csv << i << ',' << num(h.edges[i]) << ',' << num(h.edges[i + 1]) << ','
                << h.counts[i] << '\n';
        }
    }
    emit(csv.str(), o.out);
    return kExitOk;
}

struct EvalOptions {
    std::string pred, gt, out;
    double gamma = kDefaultGamma;
};

int run_eval(const EvalOptions& o) {
    require_dir(o.pred, "prediction directory");
    require_dir(o.gt, "ground-truth directory");
    const auto rows = batch::evaluate_dirs(o.pred, o.gt, o.gamma);
    if (rows.empty()) throw UsageError("no prediction files with a ground-truth counterpart");

    std::ostringstream csv;
    csv << "name,psnr,ssim\n";
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (const auto& r : rows) {
        csv << r.name << ',' << num(r.psnr) << ',' << num(r.ssim) << '\n';
        psnr_sum += r.psnr;
        ssim_sum += r.ssim;
    }
    const double n = static_cast<double>(rows.size());
    csv << "mean," << num(psnr_sum / n) << ',' << num(ssim_sum / n) << '\n';
    emit(csv.str(), o.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flare-corrupted pair synthesis, light source recovery and tone-curve analysis"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize flare-corrupted / flare-free pairs");
    synth_cmd->add_option("--scenes", synth.scenes, "Directory of flare-free PNG scenes")->required();
    synth_cmd->add_option("--flares", synth.flares, "Directory of flare-only PNG images")->required();
    synth_cmd->add_option("--out", synth.out, "Output directory (created if absent)")->required();
    synth_cmd->add_option("--count", synth.count, "Number of pairs")->required();
    synth_cmd->add_option("--seed", synth.seed, "Master seed (falls back to $FLAREKIT_SEED, then 0)");
    synth_cmd->add_option("--mode", synth.mode, "convex or direct")
        ->check(CLI::IsMember({"convex", "direct", "direct-add"}));
    synth_cmd->add_option("--p-min", synth.p_min, "Lower bound of sigmoid steepness");
    synth_cmd->add_option("--p-max", synth.p_max, "Upper bound of sigmoid steepness");
    synth_cmd->add_option("--q", synth.q, "Sigmoid midpoint");
    synth_cmd->add_option("--noise-scale", synth.noise_scale, "sigma^2 = scale * chi2(df)");
    synth_cmd->add_option("--chi-df", synth.chi_df, "Chi-square degrees of freedom");
    synth_cmd->add_option("--gamma", synth.gamma, "Gamma of the encoded images");
    synth_cmd->add_option("--depth", synth.depth, "Output PNG bit depth")->check(CLI::IsMember({8, 16}));
    synth_cmd->add_option("--jobs", synth.jobs, "Worker threads");

    RecoverOptions rec;
    auto* rec_cmd = app.add_subcommand("recover", "Recover light sources after deflaring");
    rec_cmd->add_option("--input", rec.input, "Flare-corrupted input (PNG or PFM)")->required();
    rec_cmd->add_option("--deflared", rec.deflared, "Deflared image of the same size");
    rec_cmd->add_option("--op", rec.op, "Built-in operator instead: identity, darken:F, blur:R");
    rec_cmd->add_option("--alpha", rec.alpha, "Exponent of the recovery weight");
    rec_cmd->add_option("--gamma", rec.gamma, "Gamma of PNG inputs and outputs");
    rec_cmd->add_option("--depth", rec.depth, "PNG output bit depth")->check(CLI::IsMember({8, 16}));
    rec_cmd->add_option("--out", rec.out, "Output path (.png or .pfm)")->required();

    AnalyzeOptions an;
    auto* an_cmd = app.add_subcommand(
        "analyze",
        "Tone-curve analysis as CSV.\n"
        "  --table residual: b_rgb,eps1,exact,approx,residual\n"
        "  --table sweep:    flare_raw,flare_rgb,scene_rgb,exact,flare_weight,scene_weight,"
        "model_flare_weight");
    an_cmd->add_option("--table", an.table, "residual or sweep");
    an_cmd->add_option("--tmo", an.tmo, "smooth-step or logistic");
    an_cmd->add_option("--k", an.k, "Logistic steepness");
    an_cmd->add_option("--m", an.m, "Logistic midpoint");
    an_cmd->add_option("--b", an.b_values, "Bright flare values for the residual table");
    an_cmd->add_option("--eps-start", an.eps_start, "First ratio of the halving sequence");
    an_cmd->add_option("--eps-stop", an.eps_stop, "Last ratio of the halving sequence");
    an_cmd->add_option("--step", an.step, "Flare raw grid step of the sweep");
    an_cmd->add_option("--scene-raw", an.scene_raw, "Raw scene value of the sweep");
    an_cmd->add_option("--out", an.out, "CSV path (default stdout)");

    HistOptions hist;
    auto* hist_cmd = app.add_subcommand(
        "hist",
        "Illuminance histogram as CSV.\n"
        "  default:  bin,lower,upper,count\n"
        "  --stats:  pixels,mean,p10,p50,p90");
    hist_cmd->add_option("--input", hist.input, "Image (PNG or PFM)")->required();
    hist_cmd->add_option("--bins", hist.bins, "Number of bins");
    hist_cmd->add_option("--gamma", hist.gamma, "Gamma of PNG input");
    hist_cmd->add_flag("--stats", hist.stats, "Emit summary statistics instead of bins");
    hist_cmd->add_option("--out", hist.out, "CSV path (default stdout)");

    EvalOptions ev;
    auto* ev_cmd = app.add_subcommand(
        "eval", "PSNR/SSIM of predictions against ground truth as CSV: name,psnr,ssim (last row: mean)");
    ev_cmd->add_option("--pred", ev.pred, "Prediction directory")->required();
    ev_cmd->add_option("--gt", ev.gt, "Ground-truth directory")->required();
    ev_cmd->add_option("--gamma", ev.gamma, "Gamma of PNG inputs");
    ev_cmd->add_option("--out", ev.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUser;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*rec_cmd) return run_recover(rec);
        if (*an_cmd) return run_analyze(an);
        if (*hist_cmd) return run_hist(hist);
        if (*ev_cmd) return run_eval(ev);
    } catch (const IoError& e) {
        std::cerr << "flarekit: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "flarekit: " << e.what() << '\n';
        return kExitUser;
    }
    return kExitUser;
}
