#include "ican/datagen.hpp"
#include "ican/ican.hpp"
#include "ican/io.hpp"
#include "ican/moments.hpp"
#include "ican/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoCanFit = 3;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j;
    in >> j;
    return j;
}

ican::GeneratedSample run_generator(const std::string& dataset, int n, std::uint64_t seed) {
    if (dataset == "section3") return ican::gen_section3(n, seed);
    if (dataset == "1") return ican::gen_dataset1(n, seed);
    if (dataset == "2") return ican::gen_dataset2(n, seed);
    if (dataset == "3") return ican::gen_dataset3(n, seed);
    throw std::runtime_error("unknown dataset '" + dataset + "' (use section3|1|2|3)");
}

ican::PairedSample data_from_config(const json& cfg) {
    if (cfg.contains("csv")) return ican::load_csv(cfg.at("csv").get<std::string>());
    if (cfg.contains("generator")) {
        const json& g = cfg.at("generator");
        return run_generator(g.at("dataset").get<std::string>(), g.at("n").get<int>(),
                             g.value("seed", 0ULL))
            .sample;
    }
    throw std::runtime_error("config needs a \"csv\" or \"generator\" data source");
}

std::function<double(double)> curve_inverse_from_config(const json& cfg,
                                                        std::function<double(double)>& v_out) {
    const std::string type = cfg.at("type").get<std::string>();
    if (type == "linear") {
        const double slope = cfg.at("slope").get<double>();
        const double intercept = cfg.value("intercept", 0.0);
        if (slope == 0.0) throw std::runtime_error("linear curve: slope must be nonzero");
        v_out = [=](double t) { return slope * t + intercept; };
        return [=](double y) { return (y - intercept) / slope; };
    }
    if (type == "exp") {
        const double rate = cfg.at("rate").get<double>();
        if (rate == 0.0) throw std::runtime_error("exp curve: rate must be nonzero");
        v_out = [=](double t) { return std::exp(rate * t); };
        return [=](double y) { return std::log(y) / rate; };
    }
    if (type == "quad") {
        // v(t) = t + a t^2 on the branch 1 + 2 a t > 0.
        const double a = cfg.at("a").get<double>();
        if (a == 0.0) throw std::runtime_error("quad curve: a must be nonzero");
        v_out = [=](double t) { return t + a * t * t; };
        return [=](double y) { return (-1.0 + std::sqrt(1.0 + 4.0 * a * y)) / (2.0 * a); };
    }
    throw std::runtime_error("unknown curve type '" + type + "' (use linear|exp|quad)");
}

ican::Density density_from_config(const json& cfg) {
    const std::string type = cfg.at("type").get<std::string>();
    if (type == "uniform")
        return ican::uniform_density(cfg.at("lo").get<double>(), cfg.at("hi").get<double>());
    if (type == "gaussian")
        return ican::gaussian_density(cfg.at("mean").get<double>(), cfg.at("std").get<double>());
    if (type == "cosine")
        return ican::raised_cosine_density(cfg.at("center").get<double>(),
                                           cfg.at("width").get<double>());
    throw std::runtime_error("unknown density type '" + type + "' (use uniform|gaussian|cosine)");
}

ican::ScalingStudy study_from_config(const json& cfg) {
    ican::ScalingStudy study;
    study.w = curve_inverse_from_config(cfg.at("curve"), study.v);
    study.noise_x = density_from_config(cfg.at("noise_x"));
    study.noise_y = density_from_config(cfg.at("noise_y"));
    study.latent = density_from_config(cfg.at("latent"));
    study.ell_values = cfg.at("ell_values").get<std::vector<double>>();
    study.y_points = cfg.at("y_points").get<std::vector<double>>();
    return study;
}

int cmd_fit(const std::string& csv, const ican::IcanConfig& config, const std::string& out_path) {
    const ican::PairedSample raw = ican::load_csv(csv);
    const ican::PairedSample data = ican::normalize(raw);
    const ican::IcanResult result = ican::run_ican(data, config);
    const std::string report = ican::report_json(result, config, data.normalization);

    if (out_path.empty()) {
        std::cout << report << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << report << "\n";
        std::cout << "decision=" << ican::to_string(result.decision)
                  << " var_ratio=" << format_double(result.var_ratio)
                  << " iterations=" << result.iterations_used << " report=" << out_path << "\n";
    }
    return result.decision == ican::Decision::NoCanFit ? kExitNoCanFit : kExitOk;
}

int cmd_simulate(const std::string& dataset, int n, std::uint64_t seed, const std::string& out,
                 const std::string& truth_out) {
    const ican::GeneratedSample g = run_generator(dataset, n, seed);
    ican::save_csv(g.sample, out);
    if (!truth_out.empty()) ican::save_truth_csv(g.truth, truth_out);
    return kExitOk;
}

int cmd_hsic(const std::string& csv, const std::string& method, int permutations,
             std::uint64_t seed) {
    const ican::PairedSample data = ican::load_csv(csv);
    const auto m = method == "perm" ? ican::PValueMethod::Permutation : ican::PValueMethod::Gamma;
    const ican::DependenceReport rep = ican::hsic_pvalue(data.x, data.y, m, permutations, seed);
    std::cout << "n=" << rep.n << " hsic=" << format_double(rep.hsic)
              << " sigma_x=" << format_double(rep.sigma_x)
              << " sigma_y=" << format_double(rep.sigma_y)
              << " p_gamma=" << format_double(rep.p_gamma);
    if (rep.p_perm) std::cout << " p_perm=" << format_double(*rep.p_perm);
    std::cout << "\n";
    return kExitOk;
}

int cmd_moments(const std::string& config_path, const std::string& out_path) {
    const json cfg = load_config(config_path);
    const ican::PairedSample data = data_from_config(cfg.at("data"));
    const int order = cfg.at("order").get<int>();
    const auto y_points = cfg.at("y_points").get<std::vector<double>>();
    const double bandwidth = cfg.value("bandwidth", 0.0);

    // The inverse curve is estimated from the data itself via the
    // conditional mean E(X | Y = y).
    const double h = bandwidth > 0.0
                         ? bandwidth
                         : 1.06 * ican::sample_stddev(data.y) *
                               std::pow(static_cast<double>(data.size()), -0.2);
    auto w_hat = [&data, h](double y) {
        return ican::conditional_moment(data.x, data.y, y, 1, h);
    };
    const ican::MomentEstimate est =
        ican::estimate_noise_moments(data, w_hat, y_points, order, bandwidth);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        os = &file;
    }
    *os << "order,e_nx,e_ny\n";
    for (int m = 1; m <= order; ++m)
        *os << m << ',' << format_double(est.z[m - 1]) << ',' << format_double(est.w[m - 1])
            << '\n';
    if (est.ill_conditioned) std::cerr << "warning: moment system ill-conditioned\n";
    return kExitOk;
}

int cmd_scaling_study(const std::string& config_path, const std::string& out_path) {
    const json cfg = load_config(config_path);
    const ican::ScalingStudy study = study_from_config(cfg);
    const auto cells = ican::scaling_study(study, cfg.at("samples_per_ell").get<long>(),
                                           cfg.at("order").get<int>(), cfg.value("seed", 0ULL),
                                           cfg.value("bandwidth", 0.0));
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "ell,order,est_nx,est_ny,err_nx,err_ny\n";
    for (const auto& c : cells)
        out << format_double(c.ell) << ',' << c.order << ',' << format_double(c.est_nx) << ','
            << format_double(c.est_ny) << ',' << format_double(c.err_nx) << ','
            << format_double(c.err_ny) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-confounder detection under the CAN model"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a CAN model to a two-column CSV");
    std::string fit_csv, fit_out;
    ican::IcanConfig config;
    fit->add_option("csv", fit_csv, "input CSV with two numeric columns")->required();
    fit->add_option("--alpha", config.alpha, "independence significance level");
    fit->add_option("--max-iters", config.max_iterations, "projection/regression rounds (K)");
    fit->add_option("--budget", config.eval_budget, "objective evaluations per projection");
    fit->add_option("--ratio-low", config.ratio_low, "variance-ratio threshold for X->Y");
    fit->add_option("--ratio-high", config.ratio_high, "variance-ratio threshold for Y->X");
    fit->add_option("--seed", config.seed, "random seed");
    fit->add_option("--out", fit_out, "write the JSON report here instead of stdout");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic data set");
    std::string sim_dataset, sim_out, sim_truth;
    int sim_n = 200;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--dataset", sim_dataset, "section3|1|2|3")->required();
    simulate->add_option("--n", sim_n, "sample count");
    simulate->add_option("--seed", sim_seed, "random seed");
    simulate->add_option("--out", sim_out, "output CSV")->required();
    simulate->add_option("--truth", sim_truth, "also write the latent/noise ground truth");

    // hsic
    auto* hsic = app.add_subcommand("hsic", "Independence test on a two-column CSV");
    std::string hsic_csv, hsic_method = "gamma";
    int hsic_perms = 1000;
    std::uint64_t hsic_seed = 0;
    hsic->add_option("csv", hsic_csv, "input CSV")->required();
    hsic->add_option("--method", hsic_method, "gamma|perm")
        ->check(CLI::IsMember({"gamma", "perm"}));
    hsic->add_option("--perms", hsic_perms, "permutation count");
    hsic->add_option("--seed", hsic_seed, "random seed for the permutation stream");

    // moments
    auto* moments = app.add_subcommand("moments", "Estimate noise moments from data");
    std::string mom_config, mom_out;
    moments->add_option("--config", mom_config, "study configuration JSON")->required();
    moments->add_option("--out", mom_out, "output CSV (default stdout)");

    // scaling-study
    auto* scaling = app.add_subcommand("scaling-study", "Moment-error scaling experiment");
    std::string sc_config, sc_out;
    scaling->add_option("--config", sc_config, "study configuration JSON")->required();
    scaling->add_option("--out", sc_out, "output CSV table")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_csv, config, fit_out);
        if (simulate->parsed()) return cmd_simulate(sim_dataset, sim_n, sim_seed, sim_out, sim_truth);
        if (hsic->parsed()) return cmd_hsic(hsic_csv, hsic_method, hsic_perms, hsic_seed);
        if (moments->parsed()) return cmd_moments(mom_config, mom_out);
        if (scaling->parsed()) return cmd_scaling_study(sc_config, sc_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
