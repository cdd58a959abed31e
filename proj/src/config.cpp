#include "dyslex/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dyslex::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw std::invalid_argument("expected 0/1/true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty entry in list '" + v + "'");
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k = {
        "sessions",    "layout",    "features",         "outdir",     "pipeline",
        "c_param",     "fold_seed", "kmeans_seed",      "cv_folds",   "nested_selection",
        "noise_mode",  "sigma_grid", "replicates",      "noise_seed", "complete_cases",
        "threads",
    };
    return k;
}

void RunConfig::apply_kv(const std::string& key, const std::string& value) {
    try {
        if (key == "sessions") sessions = value;
        else if (key == "layout") layout = value;
        else if (key == "features") features = value;
        else if (key == "outdir") outdir = value;
        else if (key == "pipeline") pipeline = value;
        else if (key == "c_param") c_param = std::stod(value);
        else if (key == "fold_seed") fold_seed = std::stoull(value);
        else if (key == "kmeans_seed") kmeans_seed = std::stoull(value);
        else if (key == "cv_folds") cv_folds = std::stoull(value);
        else if (key == "nested_selection") nested_selection = parse_bool(value);
        else if (key == "noise_mode") noise_mode = value;
        else if (key == "sigma_grid") sigma_grid = parse_double_list(value);
        else if (key == "replicates") replicates = std::stoull(value);
        else if (key == "noise_seed") noise_seed = std::stoull(value);
        else if (key == "complete_cases") complete_cases = parse_bool(value);
        else if (key == "threads") threads = std::stoull(value);
        else if (!synth::apply_synth_kv(synth, key, value))
            throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const std::invalid_argument& e) {
        // keep "unknown config key" intact, wrap value conversion noise
        const std::string what = e.what();
        if (what.rfind("unknown config key", 0) == 0) throw;
        throw std::invalid_argument("config key '" + key + "': bad value '" + value + "'");
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("config key '" + key + "': value out of range '" + value + "'");
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key=value");
        try {
            cfg.apply_kv(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

std::string RunConfig::to_kv() const {
    std::ostringstream out;
    out << "sessions=" << sessions << "\n";
    out << "layout=" << layout << "\n";
    out << "features=" << features << "\n";
    out << "outdir=" << outdir << "\n";
    out << "pipeline=" << pipeline << "\n";
    out << "c_param=" << num(c_param) << "\n";
    out << "fold_seed=" << fold_seed << "\n";
    out << "kmeans_seed=" << kmeans_seed << "\n";
    out << "cv_folds=" << cv_folds << "\n";
    out << "nested_selection=" << (nested_selection ? 1 : 0) << "\n";
    out << "noise_mode=" << noise_mode << "\n";
    out << "sigma_grid=";
    for (std::size_t i = 0; i < sigma_grid.size(); ++i)
        out << (i ? "," : "") << num(sigma_grid[i]);
    out << "\n";
    out << "replicates=" << replicates << "\n";
    out << "noise_seed=" << noise_seed << "\n";
    out << "complete_cases=" << (complete_cases ? 1 : 0) << "\n";
    out << "threads=" << threads << "\n";
    out << synth::synth_spec_to_kv(synth);
    return out.str();
}

pipeline::PipelineSpec RunConfig::base_pipeline() const {
    pipeline::PipelineSpec base;
    base.c_param = c_param;
    base.fold_seed = fold_seed;
    base.kmeans_seed = kmeans_seed;
    base.cv_folds = cv_folds;
    base.nested_selection = nested_selection;
    return base;
}

std::vector<pipeline::PipelineSpec> RunConfig::pipelines() const {
    const pipeline::PipelineSpec base = base_pipeline();
    if (pipeline == "battery") return pipeline::default_battery(base);
    std::vector<pipeline::PipelineSpec> specs;
    std::stringstream ss(pipeline);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        specs.push_back(pipeline::parse_pipeline_token(token, base));
    }
    if (specs.empty()) throw std::invalid_argument("config: no pipeline tokens in '" + pipeline + "'");
    return specs;
}

pipeline::NoiseSpec RunConfig::noise_spec() const {
    pipeline::NoiseSpec ns;
    ns.sigma_grid = sigma_grid;
    ns.replicates = replicates;
    ns.noise_seed = noise_seed;
    ns.mode = pipeline::parse_noise_mode(noise_mode);
    ns.complete_cases = complete_cases;
    ns.validate();
    return ns;
}

}  // namespace dyslex::config
