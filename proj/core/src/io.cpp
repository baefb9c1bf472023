#include "ican/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace ican {

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no, const char* what) {
    std::ostringstream os;
    os << path << ": line " << line_no << ": " << what;
    throw std::runtime_error(os.str());
}

}  // namespace

PairedSample load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    PairedSample sample;
    sample.provenance = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto comma = line.find(',');
        if (comma == std::string::npos) line_error(path, line_no, "expected two comma-separated columns");
        const std::string_view first(line.data(), comma);
        const std::string_view second(line.data() + comma + 1, line.size() - comma - 1);
        if (second.find(',') != std::string_view::npos)
            line_error(path, line_no, "expected exactly two columns");

        double a, b;
        if (!parse_double(first, a) || !parse_double(second, b)) {
            if (line_no == 1 && sample.x.empty()) continue;  // header line
            line_error(path, line_no, "malformed numeric value");
        }
        sample.x.push_back(a);
        sample.y.push_back(b);
    }
    if (sample.size() < 2) throw std::runtime_error("load_csv: " + path + ": fewer than 2 data rows");
    return sample;
}

void save_csv(const PairedSample& sample, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot write " + path);
    out << "x,y\n";
    for (std::size_t i = 0; i < sample.size(); ++i)
        out << shortest(sample.x[i]) << ',' << shortest(sample.y[i]) << '\n';
}

void save_truth_csv(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_truth_csv: cannot write " + path);
    out << "t,nx,ny\n";
    for (std::size_t i = 0; i < truth.t.size(); ++i)
        out << shortest(truth.t[i]) << ',' << shortest(truth.nx[i]) << ','
            << shortest(truth.ny[i]) << '\n';
}

std::string report_json(const IcanResult& result, const IcanConfig& config,
                        const Normalization& normalization) {
    nlohmann::json j;
    j["decision"] = to_string(result.decision);
    j["var_ratio"] = result.var_ratio;
    j["p_values"] = {{"nxny", result.nx_ny.p_gamma},
                     {"nxt", result.nx_t.p_gamma},
                     {"nyt", result.ny_t.p_gamma}};
    j["iterations"] = result.iterations_used;
    j["config"] = {{"alpha", config.alpha},
                   {"max_iterations", config.max_iterations},
                   {"eval_budget", config.eval_budget},
                   {"ratio_low", config.ratio_low},
                   {"ratio_high", config.ratio_high},
                   {"seed", config.seed}};
    j["normalization"] = {
        {"x", {{"offset", normalization.x.offset}, {"scale", normalization.x.scale}}},
        {"y", {{"offset", normalization.y.offset}, {"scale", normalization.y.scale}}}};
    j["t_hat"] = result.t_hat.values;
    j["curve_eval"] = {{"grid", result.curve.path.grid},
                       {"u", result.curve.path.grid_u},
                       {"v", result.curve.path.grid_v}};
    return j.dump(2);
}

}  // namespace ican
