#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyslex::ingest {

enum class Label { control, dyslexic, unknown };

std::string label_name(Label l);
Label parse_label(const std::string& s);  // throws on unknown name

// One gaze hold. Coordinates are screen pixels, x grows rightward, y grows
// downward. roi is the 0-based index of the word being looked at, or empty
// when the fixation lies on no word.
struct Fixation {
    double x = 0.0;
    double y = 0.0;
    double t_start_ms = 0.0;
    double t_end_ms = 0.0;
    std::optional<int> roi;

    double duration_ms() const { return t_end_ms - t_start_ms; }
    bool operator==(const Fixation&) const = default;
};

struct WordBox {
    int index = 0;
    int line = 0;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    bool operator==(const WordBox&) const = default;
};

// Word bounding boxes in reading order. Indices are contiguous 0..N-1.
struct TextLayout {
    double screen_width = 0.0;
    double screen_height = 0.0;
    double line_height = 0.0;
    std::vector<WordBox> words;

    int word_count() const { return static_cast<int>(words.size()); }
    int line_count() const;
    void validate() const;  // throws std::invalid_argument on broken invariants
    bool operator==(const TextLayout&) const = default;
};

struct ReadingSession {
    std::string subject_id;
    Label label = Label::unknown;
    std::string text_id;
    std::vector<Fixation> fixations;  // recording order, non-overlapping intervals

    bool operator==(const ReadingSession&) const = default;
};

struct Cohort {
    std::vector<ReadingSession> sessions;
    // Keyed by text_id; the empty key is a wildcard layout that serves every
    // text (the plain single-object layout file).
    std::map<std::string, TextLayout> layouts;

    const TextLayout& layout_for(const std::string& text_id) const;  // throws if unresolved
    std::size_t count_label(Label l) const;
};

// --- file formats ---------------------------------------------------------

// Fixation CSV: header subject_id,label,text_id,x,y,t_start,t_end,roi.
// Rows are grouped into sessions by (subject_id, text_id); fixations are
// sorted by t_start. Malformed rows, non-finite or off-screen coordinates,
// overlapping intervals and unresolved text ids all raise CohortError.
struct CohortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Cohort parse_cohort(const std::string& session_file, const std::string& layout_file);

void write_sessions_csv(const Cohort& cohort, const std::string& path);
void write_layout_json(const Cohort& cohort, const std::string& path);

TextLayout parse_layout_json_text(const std::string& json_text, std::string* text_id_out = nullptr);
std::map<std::string, TextLayout> parse_layout_file(const std::string& path);

// --- operations -----------------------------------------------------------

// Overwrites every fixation's roi with the index of the word whose closed
// bounding box contains it; ties on shared edges go to the lower index.
ReadingSession assign_rois(ReadingSession session, const TextLayout& layout);

struct SessionReport {
    std::string subject_id;
    std::string text_id;
    std::size_t n_fixations = 0;
    double none_roi_fraction = 0.0;
    std::vector<std::string> flags;
};

struct ValidationReport {
    std::vector<SessionReport> sessions;
    std::map<std::string, std::size_t> label_counts;  // keyed by label name
    double majority_class_fraction = 0.0;
    std::vector<std::string> issues;  // empty for a well-formed cohort

    std::string to_json() const;
};

ValidationReport validate_cohort(const Cohort& cohort);

}  // namespace dyslex::ingest
