#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyslex/ingest.hpp"

namespace dyslex::synth {

// Per-class reading model. Mean/sd pairs describe the between-subject
// distribution of each subject's own mean; within-subject spread uses fixed
// coefficients (see generate_synthetic_cohort). Probabilities are per-step
// class rates, jittered multiplicatively per subject so a rate of zero stays
// exactly zero.
struct ClassParams {
    double fixation_duration_mean_ms = 230.0;
    double fixation_duration_sd_ms = 25.0;
    double forward_saccade_mean_px = 158.0;
    double forward_saccade_sd_px = 17.0;
    double regression_prob = 0.042;
    double word_skip_prob = 0.05;
    double short_step_prob = 0.10;
};

// Dyslexic defaults contrasted against ClassParams' control defaults:
// shorter forward saccades, more short corrective re-steps, and more
// regressions; durations and skip rates equal.
ClassParams default_dyslexic_params();

struct SynthSpec {
    std::size_t n_control = 37;
    std::size_t n_dyslexic = 32;
    std::uint64_t seed = 1;
    ClassParams control;
    ClassParams dyslexic = default_dyslexic_params();

    // Layout geometry. Defaults give ~900 px lines; the screen height is
    // sized to fit the lines.
    int word_count = 400;
    double line_width_px = 900.0;
    double line_height_px = 60.0;
    double screen_width_px = 1024.0;

    // Recording window: every session stops after this many fixations (or at
    // the end of the text, whichever comes first). The default text is long
    // enough that no subject finishes, so per-session totals are equal by
    // construction and the classes differ in rates, not in recording length.
    std::size_t max_fixations = 220;

    // Within-subject saccade spread as a fraction of the subject's own mean
    // forward length.
    double saccade_within_cv = 0.15;

    // Per-subject chance of losing all roi data, which makes the
    // word-specific features missing for that subject.
    double missing_roi_prob = 0.0;

    void validate() const;  // throws std::invalid_argument
};

// SynthSpec{} already carries the planted contrast; kept as the named entry
// point for the screening scenario.
SynthSpec default_planted_spec();

// Flat key=value file; keys are listed in the README. Unknown keys are
// rejected.
SynthSpec parse_synth_spec_file(const std::string& path);
std::string synth_spec_to_kv(const SynthSpec& spec);

// Applies one key=value pair; false when the key is not a synth key, throws
// std::invalid_argument on a bad value. Does not validate the whole spec.
bool apply_synth_kv(SynthSpec& spec, const std::string& key, const std::string& value);
const std::vector<std::string>& synth_spec_keys();

// Deterministic for a fixed spec: a first-order walk over a generated
// layout, one subject at a time, each on its own seeded substream.
ingest::Cohort generate_synthetic_cohort(const SynthSpec& spec);

}  // namespace dyslex::synth
