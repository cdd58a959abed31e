#include "dyslex/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "dyslex/config.hpp"
#include "dyslex/evaluate.hpp"
#include "dyslex/features.hpp"
#include "dyslex/ingest.hpp"
#include "dyslex/synth.hpp"
#include "json.hpp"

namespace dyslex::cli {

namespace {

namespace fs = std::filesystem;

struct MissingInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string dashed(std::string key) {
    for (char& c : key)
        if (c == '_') c = '-';
    return key;
}

void emit_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"]["code"] = code;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    err << j.dump() << "\n";
}

void ensure_input(const std::string& path, const std::string& what) {
    if (path.empty()) throw MissingInputError("no " + what + " file configured");
    if (!fs::exists(path)) throw MissingInputError(what + " file not found: " + path);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing: " + path.string());
}

fs::path artifact_dir(const config::RunConfig& cfg, const std::string& sub) {
    const fs::path dir = fs::path(cfg.outdir) / sub;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + dir.string());
    return dir;
}

ingest::Cohort load_cohort(const config::RunConfig& cfg) {
    ensure_input(cfg.sessions, "sessions");
    ensure_input(cfg.layout, "layout");
    return ingest::parse_cohort(cfg.sessions, cfg.layout);
}

features::FeatureTable load_features(const config::RunConfig& cfg) {
    if (!cfg.features.empty()) {
        ensure_input(cfg.features, "features");
        return features::parse_feature_csv(cfg.features);
    }
    return features::extract_cohort_features(load_cohort(cfg));
}

int cmd_synth(const config::RunConfig& cfg, std::ostream& out) {
    cfg.synth.validate();
    const auto cohort = synth::generate_synthetic_cohort(cfg.synth);
    const auto dir = artifact_dir(cfg, "synth");
    ingest::write_sessions_csv(cohort, (dir / "sessions.csv").string());
    ingest::write_layout_json(cohort, (dir / "layout.json").string());
    write_text(dir / "spec.txt", synth::synth_spec_to_kv(cfg.synth));
    write_text(dir / "config.txt", cfg.to_kv());
    out << "synth: " << cohort.sessions.size() << " sessions -> " << dir.string() << "\n";
    return kExitOk;
}

int cmd_validate(const config::RunConfig& cfg, std::ostream& out) {
    const auto cohort = load_cohort(cfg);
    const auto report = ingest::validate_cohort(cohort);
    const auto dir = artifact_dir(cfg, "validate");
    write_text(dir / "validation.json", report.to_json() + "\n");
    write_text(dir / "config.txt", cfg.to_kv());
    out << "validate: " << report.sessions.size() << " sessions, " << report.issues.size()
        << " issues -> " << dir.string() << "\n";
    return kExitOk;
}

int cmd_features(const config::RunConfig& cfg, std::ostream& out) {
    const auto cohort = load_cohort(cfg);
    const auto table = features::extract_cohort_features(cohort);
    const auto dir = artifact_dir(cfg, "features");
    features::write_feature_csv(table, (dir / "features.csv").string());

    const fs::path ecdf_dir = dir / "ecdf";
    std::error_code ec;
    fs::create_directories(ecdf_dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + ecdf_dir.string());
    std::size_t n_files = 0;
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
        for (const auto label : {ingest::Label::control, ingest::Label::dyslexic}) {
            std::vector<double> values;
            for (std::size_t i = 0; i < table.subject_ids.size(); ++i)
                if (table.labels[i] == label && !is_missing(table.values(i, j)))
                    values.push_back(table.values(i, j));
            if (values.empty()) continue;
            const auto steps = features::ecdf(values);
            const auto name = features::feature_names()[j] + "_" + ingest::label_name(label) + ".csv";
            features::write_ecdf_csv(steps, (ecdf_dir / name).string());
            ++n_files;
        }
    }
    write_text(dir / "config.txt", cfg.to_kv());
    out << "features: " << table.subject_ids.size() << " rows, " << n_files << " ecdf files -> "
        << dir.string() << "\n";
    return kExitOk;
}

int cmd_select(const config::RunConfig& cfg, std::ostream& out) {
    const auto table = load_features(cfg);
    const auto reports = pipeline::selection_reports(table, cfg.base_pipeline());
    const auto dir = artifact_dir(cfg, "select");
    std::vector<std::string> names(features::feature_names().begin(), features::feature_names().end());
    for (const auto& r : reports)
        write_text(dir / ("cv_" + r.text_id + ".json"), r.cv.to_json(names) + "\n");
    write_text(dir / "config.txt", cfg.to_kv());
    out << "select: " << reports.size() << " text(s) -> " << dir.string() << "\n";
    return kExitOk;
}

int cmd_evaluate(const config::RunConfig& cfg, std::ostream& out) {
    const auto table = load_features(cfg);
    const auto specs = cfg.pipelines();
    const auto report = pipeline::run_battery(table, specs, specs.size() > 1);
    const auto dir = artifact_dir(cfg, "evaluate");
    pipeline::emit_report(report, pipeline::ReportFormat::table_csv, (dir / "table.csv").string());
    pipeline::emit_report(report, pipeline::ReportFormat::json, (dir / "report.json").string());
    write_text(dir / "config.txt", cfg.to_kv());
    out << "evaluate: " << specs.size() << " pipeline(s), " << report.texts.size() << " text(s) -> "
        << dir.string() << "\n";
    return kExitOk;
}

int cmd_noise(const config::RunConfig& cfg, std::ostream& out) {
    const auto cohort = load_cohort(cfg);
    const auto specs = cfg.pipelines();
    require(specs.size() == 1, "noise: configure exactly one pipeline");
    const auto noise = cfg.noise_spec();
    const auto report = pipeline::noise_sweep(cohort, specs.front(), noise, cfg.threads);
    const auto dir = artifact_dir(cfg, "noise");
    pipeline::emit_report(report, pipeline::ReportFormat::table_csv, (dir / "table.csv").string());
    pipeline::emit_report(report, pipeline::ReportFormat::json, (dir / "report.json").string());
    write_text(dir / "config.txt", cfg.to_kv());
    out << "noise: " << noise.sigma_grid.size() << " sigmas x " << noise.replicates
        << " replicates -> " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dyslexia screening pipeline: synthetic cohorts, gaze features, "
                 "LASSO selection, LOOCV, noise robustness"};
    app.require_subcommand(1);

    std::string config_path;
    // flags are applied on top of the config file, in command-line order
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string active_sub;

    const std::map<std::string, std::pair<std::string, int (*)(const config::RunConfig&, std::ostream&)>>
        subs = {
            {"synth", {"generate a synthetic cohort", cmd_synth}},
            {"validate", {"screen a cohort for data problems", cmd_validate}},
            {"features", {"extract the feature matrix and per-class ECDFs", cmd_features}},
            {"select", {"cross-validated LASSO feature selection report", cmd_select}},
            {"evaluate", {"LOOCV accuracy battery", cmd_evaluate}},
            {"noise", {"fixation-noise robustness sweep", cmd_noise}},
        };

    std::vector<std::string> all_keys = config::RunConfig::keys();
    for (const auto& k : synth::synth_spec_keys()) all_keys.push_back(k);

    for (const auto& [name, info] : subs) {
        auto* sub = app.add_subcommand(name, info.first);
        sub->add_option("--config", config_path, "run config file (flat key=value)");
        for (const auto& key : all_keys) {
            sub->add_option_function<std::string>(
                "--" + dashed(key),
                [key, &overrides](const std::string& v) { overrides.emplace_back(key, v); },
                "config key " + key);
        }
        sub->callback([&active_sub, name = name] { active_sub = name; });
    }

    std::vector<const char*> argv;
    argv.push_back("dyslexml");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        emit_error(err, kExitUsage, "usage", e.what());
        return kExitUsage;
    }

    try {
        config::RunConfig cfg;
        if (!config_path.empty()) {
            ensure_input(config_path, "config");
            cfg = config::RunConfig::from_file(config_path);
        }
        if (const char* env_outdir = std::getenv("DYSLEXML_OUTDIR")) cfg.outdir = env_outdir;
        for (const auto& [key, value] : overrides) cfg.apply_kv(key, value);

        return subs.at(active_sub).second(cfg, out);
    } catch (const MissingInputError& e) {
        emit_error(err, kExitMissingInput, "missing_input", e.what());
        return kExitMissingInput;
    } catch (const ingest::CohortError& e) {
        emit_error(err, kExitData, "data", e.what());
        return kExitData;
    } catch (const std::invalid_argument& e) {
        emit_error(err, kExitConfig, "config", e.what());
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        emit_error(err, kExitIo, "io", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        emit_error(err, kExitInternal, "internal", e.what());
        return kExitInternal;
    }
}

int run_command(const std::vector<std::string>& args) {
    return run_command(args, std::cout, std::cerr);
}

}  // namespace dyslex::cli
