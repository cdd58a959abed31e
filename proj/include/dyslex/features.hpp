#pragma once

#include <array>
#include <string>
#include <vector>

#include "dyslex/ingest.hpp"
#include "dyslex/matrix.hpp"

namespace dyslex::features {

enum class MovementClass {
    unclassified,
    short_forward,
    medium_forward,
    long_forward,
    short_backward,
    medium_backward,
    long_backward,
    change_of_line,
};

std::string movement_class_name(MovementClass m);

// Connects consecutive fixations: to_index = from_index + 1.
struct Saccade {
    std::size_t from_index = 0;
    std::size_t to_index = 0;
    double dx = 0.0;  // signed, to - from
    double dy = 0.0;
    double length = 0.0;  // Euclidean
    MovementClass kind = MovementClass::unclassified;
};

// Length boundaries are short < short_max, long > long_min, medium between
// (both boundaries inclusive to medium). A change-of-line move needs a
// leftward dx of at least change_line_dx_min and a downward dy of at least
// change_line_dy_min; it is excluded from the forward/backward classes.
struct MovementThresholds {
    double short_max = 100.0;
    double long_min = 400.0;
    double change_line_dx_min = 400.0;
    double change_line_dy_min = 30.0;

    static MovementThresholds for_line_height(double line_height_px) {
        MovementThresholds t;
        t.change_line_dy_min = 0.5 * line_height_px;
        return t;
    }
    void validate() const;
};

// Per word: a visit is a maximal run of consecutive fixations on that word;
// gaze duration covers the first visit only.
struct WordStats {
    struct PerWord {
        int visit_count = 0;
        int fixation_count = 0;
        double gaze_duration_ms = 0.0;
        double total_duration_ms = 0.0;
    };
    std::vector<PerWord> words;  // indexed by word index
};

inline constexpr std::size_t kFeatureCount = 35;
inline constexpr std::size_t kGeneralFeatureCount = 23;  // indices 0..22; word-specific 23..34

// Canonical schema order; also the column order of the feature matrix CSV.
const std::array<std::string, kFeatureCount>& feature_names();
int feature_index(const std::string& name);  // -1 when unknown

struct FeatureVector {
    std::string subject_id;
    ingest::Label label = ingest::Label::unknown;
    std::string text_id;
    std::array<double, kFeatureCount> values{};  // NaN = missing

    double operator[](std::size_t i) const { return values[i]; }
};

// --- operations -----------------------------------------------------------

// Throws std::invalid_argument if the session has fewer than 2 fixations.
std::vector<Saccade> compute_saccades(const ingest::ReadingSession& session);

MovementClass classify_movement(const Saccade& s, const MovementThresholds& thresholds);

WordStats compute_word_stats(const ingest::ReadingSession& session, const ingest::TextLayout& layout);

// Fills all 35 slots. The word-specific slots (23..34) are missing when the
// session carries no roi at all; forward_backward_ratio and the sd slots are
// missing when their denominators vanish.
FeatureVector extract_features(const ingest::ReadingSession& session, const ingest::TextLayout& layout,
                               const MovementThresholds& thresholds);

struct FeatureTable {
    std::vector<std::string> subject_ids;
    std::vector<ingest::Label> labels;
    std::vector<std::string> text_ids;
    Matrix values;  // n x 35, NaN = missing
};

FeatureTable extract_cohort_features(const ingest::Cohort& cohort);
FeatureTable extract_cohort_features(const ingest::Cohort& cohort, const MovementThresholds& thresholds);

void write_feature_csv(const FeatureTable& table, const std::string& path);
FeatureTable parse_feature_csv(const std::string& path);

// Right-continuous ECDF over sorted unique values; the last fraction is 1.
// Throws std::invalid_argument on empty or non-finite input.
std::vector<std::pair<double, double>> ecdf(const std::vector<double>& values);

void write_ecdf_csv(const std::vector<std::pair<double, double>>& steps, const std::string& path);

}  // namespace dyslex::features
