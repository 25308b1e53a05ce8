// crowtune: hyperparameter search for TV-regularized tomographic reconstruction.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "crowtune/config.hpp"
#include "crowtune/errors.hpp"
#include "crowtune/eval.hpp"
#include "crowtune/experiment.hpp"
#include "crowtune/io.hpp"

namespace fs = std::filesystem;
using namespace crowtune;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

// Input errors map to kUsage, everything past input parsing to kRuntime.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream create(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    return out;
}

std::string report_line(const FitnessReport& r) {
    std::string s = fmt::format("fitness={} snr={} hfer={}", fixed6(r.fitness), fixed6(r.snr), fixed6(r.hfer));
    if (r.laplacian_var) s += " laplacian_var=" + fixed6(*r.laplacian_var);
    if (r.psnr) s += " psnr=" + fixed6(*r.psnr);
    return s;
}

RunConfig load_config(const fs::path& path) {
    try {
        return RunConfig::load(path);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

void write_correlation(const fs::path& path, const RunRecord& rec) {
    std::vector<double> fit;
    std::vector<double> neg_psnr;
    for (const auto& e : rec.evaluations) {
        if (e.penalized || !e.report.psnr || !std::isfinite(*e.report.psnr)) continue;
        fit.push_back(e.report.fitness);
        neg_psnr.push_back(-*e.report.psnr);
    }
    std::string r = "nan";
    if (fit.size() >= 2) {
        try {
            r = fixed6(pearson(fit, neg_psnr));
        } catch (const UndefinedCorrelationError&) {
        }
    }
    auto out = create(path);
    out << "# pearson(fitness, -psnr) over non-penalized evaluations; positive means lower fitness goes with "
           "higher psnr\n";
    out << "x,y,n,pearson\n";
    out << "fitness,neg_psnr," << fit.size() << ',' << r << '\n';
}

int cmd_optimize(const fs::path& config_path) {
    const auto config = load_config(config_path);
    const auto start = std::chrono::steady_clock::now();

    fs::create_directories(config.output_dir);
    const auto space = config.space();
    auto scenario = std::make_shared<const Scenario>(build_scenario(config));
    auto opt = config.optimizer;
    opt.threads = resolve_threads(opt.threads);
    const auto rec = run(space, make_evaluator(scenario, config), opt, config.algorithm, config.init);

    const auto& dir = config.output_dir;
    {
        auto out = create(dir / "convergence.csv");
        write_convergence_csv(out, rec, space);
    }
    {
        auto out = create(dir / "evaluations.csv");
        write_evaluations_csv(out, rec, space);
    }
    write_params_file(dir / "best_params.txt", space, rec.best_position);
    if (rec.weight_map) {
        auto out = create(dir / "weightmap.csv");
        write_weightmap_csv(out, *rec.weight_map, space);
        out.close();
        write_weightmap_per_dimension(dir, *rec.weight_map, space);
    }
    write_correlation(dir / "correlation.csv", rec);

    const auto params = ReconParams::from_position(space, rec.best_position, base_params(config));
    const auto best = reconstruct_and_score(*scenario, config, params);
    write_pgm(dir / "best_recon.pgm", best.image);
    write_image_csv(dir / "best_recon.csv", best.image);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto summary = fmt::format("best_fitness={} snr={} hfer={} psnr={} evaluations={} wall_time_s={:.3f}",
                                     fixed6(rec.best_report.fitness), fixed6(best.report.snr),
                                     fixed6(best.report.hfer), best.report.psnr ? fixed6(*best.report.psnr) : "nan",
                                     rec.total_evaluations, wall);
    auto out = create(dir / "summary.txt");
    out << "# " << config.name << '\n' << summary << '\n';
    std::cout << summary << '\n';
    return kOk;
}

int cmd_reconstruct(const fs::path& config_path, const fs::path& params_path, const fs::path& out_dir) {
    const auto config = load_config(config_path);
    const auto space = config.space();
    std::vector<std::pair<std::string, double>> given;
    try {
        given = read_params_file(params_path);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }

    auto base = base_params(config);
    std::vector<double> raw(space.dimension(), std::nan(""));
    std::set<std::string> seen;
    for (const auto& [name, value] : given) {
        if (!seen.insert(name).second) throw UsageError(fmt::format("parameter '{}' given twice", name));
        if (const auto d = space.find(name)) {
            raw[*d] = value;
        } else if (name == "rho" && config.recon == ReconAlgorithm::Piccs) {
            if (!(value >= 0.0 && value <= 1.0)) throw UsageError("rho must lie in [0, 1]");
            base.rho = value;
        } else {
            throw UsageError(fmt::format("unknown parameter '{}' for {}", name, to_string(config.recon)));
        }
    }
    Position pos;
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        const auto& spec = space[d];
        if (std::isnan(raw[d])) throw UsageError(fmt::format("missing parameter '{}'", spec.name));
        const auto k = spec.snap_index(raw[d]);
        if (std::abs(spec.value(k) - raw[d]) > 1e-6 * spec.step) {
            std::cerr << fmt::format("warning: {}={} is off-grid; snapped to {}\n", spec.name, raw[d],
                                     fixed6(spec.value(k)));
        }
        pos.index.push_back(k);
    }

    const auto scenario = build_scenario(config);
    const auto result = reconstruct_and_score(scenario, config, ReconParams::from_position(space, pos, base));
    const auto dir = out_dir.empty() ? config.output_dir : out_dir;
    fs::create_directories(dir);
    write_pgm(dir / "reconstruction.pgm", result.image);
    write_image_csv(dir / "reconstruction.csv", result.image);
    std::cout << report_line(result.report) << '\n';
    return kOk;
}

int cmd_evaluate(const fs::path& image_path, const fs::path& ref_path, const FitnessConfig& fc) {
    Image2D image;
    std::optional<Image2D> ref;
    try {
        fc.validate();
        image = read_image(image_path);
        if (!ref_path.empty()) ref = read_image(ref_path);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (ref && !ref->same_shape(image)) throw UsageError("image and reference differ in shape");

    auto report = evaluate(image, fc);
    if (ref) {
        double range = max_value(ref->data()) - min_value(ref->data());
        if (!(range > 0.0)) range = std::abs(max_value(ref->data()));
        if (!(range > 0.0)) range = 1.0;
        report.psnr = psnr(image, *ref, range);
    }
    std::cout << "snr = " << fixed6(report.snr) << '\n';
    std::cout << "hfer = " << fixed6(report.hfer) << '\n';
    if (report.laplacian_var) std::cout << "laplacian_var = " << fixed6(*report.laplacian_var) << '\n';
    std::cout << "fitness = " << fixed6(report.fitness) << '\n';
    if (report.psnr) std::cout << "psnr = " << fixed6(*report.psnr) << '\n';
    return kOk;
}

int cmd_export_weightmap(const fs::path& run_dir) {
    WeightMapTable table;
    try {
        table = read_weightmap_csv(run_dir / "weightmap.csv");
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    for (const auto& p : write_weightmap_per_dimension(run_dir, table)) std::cout << p.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crow-search hyperparameter tuning for TV-regularized CT reconstruction"};
    app.require_subcommand(1);

    std::string config_path;
    std::string params_path;
    std::string out_dir;
    std::string image_path;
    std::string ref_path;
    std::string run_dir;
    FitnessConfig fc;

    auto* opt = app.add_subcommand("optimize", "run the hyperparameter search");
    opt->add_option("config", config_path, "config file")->required();

    auto* rec = app.add_subcommand("reconstruct", "reconstruct once with a given parameter set");
    rec->add_option("config", config_path, "config file")->required();
    rec->add_option("--params", params_path, "name = value parameter file")->required();
    rec->add_option("--out", out_dir, "output directory (default: the config's output_dir)");

    auto* ev = app.add_subcommand("evaluate", "score an image (.pgm or .csv)");
    ev->add_option("image", image_path, "image file")->required();
    ev->add_option("--ref", ref_path, "reference image for PSNR");
    ev->add_option("--eta", fc.eta, "weight on 1/SNR");
    ev->add_option("--xi", fc.xi, "weight on 1 - HFER");
    ev->add_option("--gamma", fc.gamma, "HFER cutoff fraction");

    auto* ex = app.add_subcommand("export-weightmap", "split a run's weightmap.csv per parameter");
    ex->add_option("run_dir", run_dir, "optimize output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*opt) return cmd_optimize(config_path);
        if (*rec) return cmd_reconstruct(config_path, params_path, out_dir);
        if (*ev) return cmd_evaluate(image_path, ref_path, fc);
        if (*ex) return cmd_export_weightmap(run_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateImageError& e) {
        std::cerr << "error: degenerate image: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
