#include "dyslex/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dyslex::features {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// sample sd, divisor n-1; NaN when n < 2
double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return missing_value();
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(n - 1));
}

}  // namespace

std::string movement_class_name(MovementClass m) {
    switch (m) {
        case MovementClass::unclassified: return "unclassified";
        case MovementClass::short_forward: return "short_forward";
        case MovementClass::medium_forward: return "medium_forward";
        case MovementClass::long_forward: return "long_forward";
        case MovementClass::short_backward: return "short_backward";
        case MovementClass::medium_backward: return "medium_backward";
        case MovementClass::long_backward: return "long_backward";
        case MovementClass::change_of_line: return "change_of_line";
    }
    return "unclassified";
}

void MovementThresholds::validate() const {
    require(short_max > 0 && short_max < long_min, "movement thresholds: need 0 < short_max < long_min");
    require(change_line_dx_min > 0 && change_line_dy_min >= 0, "movement thresholds: bad change-of-line bounds");
}

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "n_fixations",
        "fixation_duration_mean_ms",
        "fixation_duration_median_ms",
        "fixation_duration_sd_ms",
        "total_reading_time_ms",
        "n_saccades",
        "saccade_length_mean_px",
        "saccade_length_median_px",
        "saccade_length_sd_px",
        "n_short_forward",
        "n_medium_forward",
        "n_long_forward",
        "n_short_backward",
        "n_medium_backward",
        "n_long_backward",
        "frac_short_forward",
        "frac_medium_forward",
        "frac_long_forward",
        "frac_short_backward",
        "frac_medium_backward",
        "frac_long_backward",
        "n_change_of_line",
        "forward_backward_ratio",
        "n_skipped_words",
        "n_once_visited_words",
        "n_multiply_fixated_words",
        "frac_skipped_words",
        "frac_multiply_fixated_words",
        "visits_per_visited_word_mean",
        "max_visits_on_any_word",
        "gaze_duration_mean_ms",
        "gaze_duration_median_ms",
        "word_total_duration_mean_ms",
        "fixations_per_visited_word_mean",
        "revisit_count_mean",
    };
    return names;
}

int feature_index(const std::string& name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<Saccade> compute_saccades(const ingest::ReadingSession& session) {
    require(session.fixations.size() >= 2, "compute_saccades: need at least 2 fixations");
    std::vector<Saccade> out;
    out.reserve(session.fixations.size() - 1);
    for (std::size_t i = 0; i + 1 < session.fixations.size(); ++i) {
        const auto& a = session.fixations[i];
        const auto& b = session.fixations[i + 1];
        Saccade s;
        s.from_index = i;
        s.to_index = i + 1;
        s.dx = b.x - a.x;
        s.dy = b.y - a.y;
        s.length = std::sqrt(s.dx * s.dx + s.dy * s.dy);
        out.push_back(s);
    }
    return out;
}

MovementClass classify_movement(const Saccade& s, const MovementThresholds& t) {
    if (-s.dx >= t.change_line_dx_min && s.dy >= t.change_line_dy_min) return MovementClass::change_of_line;
    const bool forward = s.dx >= 0.0;  // dx == 0 counts as forward
    if (s.length < t.short_max) return forward ? MovementClass::short_forward : MovementClass::short_backward;
    if (s.length > t.long_min) return forward ? MovementClass::long_forward : MovementClass::long_backward;
    return forward ? MovementClass::medium_forward : MovementClass::medium_backward;
}

WordStats compute_word_stats(const ingest::ReadingSession& session, const ingest::TextLayout& layout) {
    WordStats stats;
    stats.words.resize(static_cast<std::size_t>(layout.word_count()));

    int prev_roi = -1;
    for (const auto& f : session.fixations) {
        const int roi = f.roi ? *f.roi : -1;
        if (roi >= 0 && roi < layout.word_count()) {
            auto& w = stats.words[static_cast<std::size_t>(roi)];
            if (roi != prev_roi) w.visit_count += 1;
            w.fixation_count += 1;
            w.total_duration_ms += f.duration_ms();
            if (w.visit_count == 1) w.gaze_duration_ms += f.duration_ms();
        }
        prev_roi = roi;
    }
    return stats;
}

FeatureVector extract_features(const ingest::ReadingSession& session, const ingest::TextLayout& layout,
                               const MovementThresholds& thresholds) {
    thresholds.validate();
    const auto& fx = session.fixations;
    require(fx.size() >= 2, "extract_features: need at least 2 fixations");

    FeatureVector fv;
    fv.subject_id = session.subject_id;
    fv.label = session.label;
    fv.text_id = session.text_id;
    fv.values.fill(missing_value());
    auto set = [&](const char* name, double v) { fv.values[static_cast<std::size_t>(feature_index(name))] = v; };

    std::vector<double> durations;
    durations.reserve(fx.size());
    for (const auto& f : fx) durations.push_back(f.duration_ms());

    set("n_fixations", static_cast<double>(fx.size()));
    set("fixation_duration_mean_ms", mean_of(durations));
    set("fixation_duration_median_ms", median_of(durations));
    set("fixation_duration_sd_ms", sample_sd(durations));
    set("total_reading_time_ms", fx.back().t_end_ms - fx.front().t_start_ms);

    auto saccades = compute_saccades(session);
    std::vector<double> lengths;
    lengths.reserve(saccades.size());
    for (auto& s : saccades) {
        s.kind = classify_movement(s, thresholds);
        lengths.push_back(s.length);
    }

    const double n_sacc = static_cast<double>(saccades.size());
    set("n_saccades", n_sacc);
    set("saccade_length_mean_px", mean_of(lengths));
    set("saccade_length_median_px", median_of(lengths));
    set("saccade_length_sd_px", sample_sd(lengths));

    double counts[7] = {0, 0, 0, 0, 0, 0, 0};
    for (const auto& s : saccades) counts[static_cast<int>(s.kind) - 1] += 1.0;
    const char* count_names[6] = {"n_short_forward", "n_medium_forward", "n_long_forward",
                                  "n_short_backward", "n_medium_backward", "n_long_backward"};
    const char* frac_names[6] = {"frac_short_forward", "frac_medium_forward", "frac_long_forward",
                                 "frac_short_backward", "frac_medium_backward", "frac_long_backward"};
    for (int i = 0; i < 6; ++i) {
        set(count_names[i], counts[i]);
        set(frac_names[i], counts[i] / n_sacc);
    }
    set("n_change_of_line", counts[6]);
    const double n_forward = counts[0] + counts[1] + counts[2];
    const double n_backward = counts[3] + counts[4] + counts[5];
    if (n_backward > 0) set("forward_backward_ratio", n_forward / n_backward);

    // word-specific block: all missing when the session carries no roi data
    const bool has_roi = std::any_of(fx.begin(), fx.end(), [](const auto& f) { return f.roi.has_value(); });
    if (has_roi) {
        const WordStats stats = compute_word_stats(session, layout);
        double skipped = 0, once = 0, multi = 0, max_visits = 0;
        double visit_sum = 0, fixation_sum = 0;
        std::vector<double> gaze_durations, total_durations;
        for (const auto& w : stats.words) {
            if (w.visit_count == 0) {
                skipped += 1;
                continue;
            }
            if (w.visit_count == 1) once += 1;
            else multi += 1;
            max_visits = std::max(max_visits, static_cast<double>(w.visit_count));
            visit_sum += w.visit_count;
            fixation_sum += w.fixation_count;
            gaze_durations.push_back(w.gaze_duration_ms);
            total_durations.push_back(w.total_duration_ms);
        }
        const double n_words = static_cast<double>(stats.words.size());
        const double n_visited = once + multi;
        set("n_skipped_words", skipped);
        set("n_once_visited_words", once);
        set("n_multiply_fixated_words", multi);
        set("frac_skipped_words", skipped / n_words);
        set("frac_multiply_fixated_words", multi / n_words);
        if (n_visited > 0) {
            set("visits_per_visited_word_mean", visit_sum / n_visited);
            set("max_visits_on_any_word", max_visits);
            set("gaze_duration_mean_ms", mean_of(gaze_durations));
            set("gaze_duration_median_ms", median_of(gaze_durations));
            set("word_total_duration_mean_ms", mean_of(total_durations));
            set("fixations_per_visited_word_mean", fixation_sum / n_visited);
            set("revisit_count_mean", (visit_sum - n_visited) / n_visited);
        }
    }
    return fv;
}

namespace {

FeatureTable extract_cohort_impl(const ingest::Cohort& cohort, const MovementThresholds* fixed) {
    FeatureTable table;
    table.values = Matrix(cohort.sessions.size(), kFeatureCount);
    for (std::size_t i = 0; i < cohort.sessions.size(); ++i) {
        const auto& session = cohort.sessions[i];
        const auto& layout = cohort.layout_for(session.text_id);
        const MovementThresholds thresholds =
            fixed ? *fixed : MovementThresholds::for_line_height(layout.line_height);
        const FeatureVector fv = extract_features(session, layout, thresholds);
        table.subject_ids.push_back(fv.subject_id);
        table.labels.push_back(fv.label);
        table.text_ids.push_back(fv.text_id);
        for (std::size_t j = 0; j < kFeatureCount; ++j) table.values(i, j) = fv.values[j];
    }
    return table;
}

}  // namespace

FeatureTable extract_cohort_features(const ingest::Cohort& cohort) {
    return extract_cohort_impl(cohort, nullptr);
}

FeatureTable extract_cohort_features(const ingest::Cohort& cohort, const MovementThresholds& thresholds) {
    return extract_cohort_impl(cohort, &thresholds);
}

void write_feature_csv(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write feature csv: " + path);
    out << "subject_id,label";
    for (const auto& name : feature_names()) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < table.values.rows; ++i) {
        out << table.subject_ids[i] << ',' << ingest::label_name(table.labels[i]);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            out << ',';
            const double v = table.values(i, j);
            if (!is_missing(v)) {
                char buf[32];
                auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
                (void)ec;
                out.write(buf, ptr - buf);
            }
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

FeatureTable parse_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    FeatureTable table;
    std::vector<std::array<double, kFeatureCount>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::array<double, kFeatureCount> row;
        std::getline(ss, cell, ',');
        table.subject_ids.push_back(cell);
        std::getline(ss, cell, ',');
        table.labels.push_back(ingest::parse_label(cell));
        table.text_ids.emplace_back();
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (!std::getline(ss, cell, ',')) cell.clear();
            if (cell.empty()) {
                row[j] = missing_value();
            } else {
                row[j] = std::stod(cell);
            }
        }
        rows.push_back(row);
    }
    table.values = Matrix(rows.size(), kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < kFeatureCount; ++j) table.values(i, j) = rows[i][j];
    return table;
}

std::vector<std::pair<double, double>> ecdf(const std::vector<double>& values) {
    require(!values.empty(), "ecdf: empty input");
    for (double v : values) require(std::isfinite(v), "ecdf: non-finite input");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> steps;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        steps.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    steps.back().second = 1.0;
    return steps;
}

void write_ecdf_csv(const std::vector<std::pair<double, double>>& steps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ecdf csv: " + path);
    out << "value,fraction\n";
    for (const auto& [v, f] : steps) {
        char vb[32], fb[32];
        auto [vp, e1] = std::to_chars(vb, vb + sizeof(vb), v);
        auto [fp, e2] = std::to_chars(fb, fb + sizeof(fb), f);
        (void)e1;
        (void)e2;
        out.write(vb, vp - vb);
        out << ',';
        out.write(fb, fp - fb);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dyslex::features
