#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyslex/evaluate.hpp"
#include "dyslex/synth.hpp"

namespace dyslex::config {

// One flat key=value namespace covering paths, pipeline, noise and synth
// settings. A serialized RunConfig read back reproduces the run bit-for-bit.
struct RunConfig {
    std::string sessions;  // fixation CSV
    std::string layout;    // layout JSON
    std::string features;  // optional pre-extracted feature CSV (select/evaluate)
    std::string outdir = "out";

    // pipeline battery: comma-separated tokens like svm:one_se, or "battery"
    // for the default 12 rows
    std::string pipeline = "svm:one_se";
    double c_param = 1.0;
    std::uint64_t fold_seed = 1;
    std::uint64_t kmeans_seed = 1;
    std::size_t cv_folds = 5;
    bool nested_selection = false;

    std::string noise_mode = "train_on_clean";
    std::vector<double> sigma_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t replicates = 10;
    std::uint64_t noise_seed = 1;
    bool complete_cases = false;

    std::size_t threads = 1;

    synth::SynthSpec synth;  // includes the generator seed

    // throws std::invalid_argument on unknown key or bad value
    void apply_kv(const std::string& key, const std::string& value);
    static RunConfig from_file(const std::string& path);
    std::string to_kv() const;  // every key, round-trip exact

    pipeline::PipelineSpec base_pipeline() const;
    std::vector<pipeline::PipelineSpec> pipelines() const;  // resolves tokens/battery
    pipeline::NoiseSpec noise_spec() const;

    static const std::vector<std::string>& keys();  // config-only keys, synth keys excluded
};

}  // namespace dyslex::config
