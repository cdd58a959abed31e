#include "dyslex/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dyslex/rng.hpp"

namespace dyslex::synth {

namespace {

using ingest::Fixation;
using ingest::Label;
using ingest::ReadingSession;
using ingest::TextLayout;
using ingest::WordBox;

// Within-subject spread as a fraction of the subject's own mean.
constexpr double kDurationWithinCv = 0.30;
constexpr double kParamJitterSd = 0.25;  // lognormal jitter on probabilities
constexpr double kSaccadeGapMs = 25.0;
constexpr double kYJitterSd = 4.0;

double clamp01(double v, double hi = 0.9) { return std::clamp(v, 0.0, hi); }

TextLayout make_layout(const SynthSpec& spec) {
    rng::Stream rs(rng::derive_seed(spec.seed, {0}));
    TextLayout layout;
    layout.screen_width = spec.screen_width_px;
    layout.line_height = spec.line_height_px;

    const double margin_x = 60.0;
    const double y0 = 80.0;
    const double box_height = spec.line_height_px * 2.0 / 3.0;
    const double box_y_off = (spec.line_height_px - box_height) / 2.0;

    int placed = 0;
    int line = 0;
    while (placed < spec.word_count) {
        double x = margin_x;
        const double line_top = y0 + line * spec.line_height_px;
        while (placed < spec.word_count) {
            const double width = std::clamp(rs.normal(95.0, 28.0), 45.0, 190.0);
            if (x + width > margin_x + spec.line_width_px) break;
            WordBox box;
            box.index = placed;
            box.line = line;
            box.x_min = x;
            box.x_max = x + width;
            box.y_min = line_top + box_y_off;
            box.y_max = line_top + box_y_off + box_height;
            layout.words.push_back(box);
            x += width + rs.uniform(10.0, 18.0);
            ++placed;
        }
        ++line;
    }
    layout.screen_height = std::max(768.0, y0 + line * spec.line_height_px + 80.0);
    layout.validate();
    return layout;
}

struct SubjectParams {
    double dur_mean, dur_sd;
    double fwd_mean, fwd_sd;
    double p_regress, p_skip, p_short;
};

SubjectParams draw_subject_params(const ClassParams& cls, double saccade_within_cv, rng::Stream& rs) {
    SubjectParams p;
    p.dur_mean = std::max(80.0, rs.normal(cls.fixation_duration_mean_ms, cls.fixation_duration_sd_ms));
    p.dur_sd = kDurationWithinCv * p.dur_mean;
    p.fwd_mean = std::max(20.0, rs.normal(cls.forward_saccade_mean_px, cls.forward_saccade_sd_px));
    p.fwd_sd = saccade_within_cv * p.fwd_mean;
    p.p_regress = clamp01(cls.regression_prob * std::exp(rs.normal(0.0, kParamJitterSd)));
    p.p_skip = clamp01(cls.word_skip_prob * std::exp(rs.normal(0.0, kParamJitterSd)));
    p.p_short = clamp01(cls.short_step_prob * std::exp(rs.normal(0.0, kParamJitterSd)));
    return p;
}

struct LineSpan {
    std::size_t first_word, last_word;
};

std::vector<LineSpan> line_spans(const TextLayout& layout) {
    std::vector<LineSpan> spans;
    for (std::size_t i = 0; i < layout.words.size(); ++i) {
        const int line = layout.words[i].line;
        if (line >= static_cast<int>(spans.size())) spans.push_back({i, i});
        spans[static_cast<std::size_t>(line)].last_word = i;
    }
    return spans;
}

double word_target_x(const WordBox& w, rng::Stream& rs) {
    const double width = w.x_max - w.x_min;
    const double c = (w.x_min + w.x_max) / 2.0 + rs.normal(0.0, width / 8.0);
    return std::clamp(c, w.x_min + 1.0, w.x_max - 1.0);
}

ReadingSession walk_subject(const std::string& subject_id, Label label, const TextLayout& layout,
                            const std::vector<LineSpan>& spans, const SubjectParams& p,
                            std::size_t max_fixations, rng::Stream& rs) {
    ReadingSession session;
    session.subject_id = subject_id;
    session.label = label;
    session.text_id = "t1";

    std::size_t line = 0;
    auto line_y = [&](std::size_t l) {
        const WordBox& w = layout.words[spans[l].first_word];
        return (w.y_min + w.y_max) / 2.0 + rs.normal(0.0, kYJitterSd);
    };

    double x = word_target_x(layout.words[spans[0].first_word], rs);
    double y = line_y(0);
    double t = 0.0;

    // index of the word whose box spans x on the current line, or the nearest
    // box to the left; first word of the line when x precedes all boxes
    auto word_at = [&](double xpos) {
        std::size_t best = spans[line].first_word;
        for (std::size_t i = spans[line].first_word; i <= spans[line].last_word; ++i) {
            if (layout.words[i].x_min <= xpos) best = i;
            else break;
        }
        return best;
    };

    while (session.fixations.size() < max_fixations) {
        const double duration = std::max(40.0, rs.normal(p.dur_mean, p.dur_sd));
        session.fixations.push_back(Fixation{x, y, t, t + duration, std::nullopt});
        t += duration + kSaccadeGapMs;

        const double u = rs.uniform01();
        const double line_end = layout.words[spans[line].last_word].x_max;
        if (u < p.p_short) {
            // brief corrective forward hop; the displacement stays below a full
            // forward saccade's length whether it reaches the next word or not
            x += rs.uniform(78.0, 97.0);
            y = line_y(line);
            if (x <= line_end) continue;
            // hop carried past the line: fall through to the line-change logic
        } else if (u < p.p_short + p.p_regress) {
            const std::size_t cur = word_at(x);
            if (cur > spans[line].first_word) {
                const std::size_t back = 1 + rs.below(std::min<std::uint64_t>(2, cur - spans[line].first_word));
                x = word_target_x(layout.words[cur - back], rs);
                y = line_y(line);
                continue;
            }
            // nothing to the left on this line: read forward instead
            x += std::max(8.0, rs.normal(p.fwd_mean, p.fwd_sd));
            y = line_y(line);
            if (x <= line_end) continue;
        } else if (u < p.p_short + p.p_regress + p.p_skip) {
            const std::size_t cur = word_at(x);
            if (cur + 2 <= spans[line].last_word) {
                x = word_target_x(layout.words[cur + 2], rs);
                y = line_y(line);
                continue;
            }
            x = line_end + 1.0;  // skip runs off the line
        } else {
            x += std::max(8.0, rs.normal(p.fwd_mean, p.fwd_sd));
            y = line_y(line);
            if (x <= line_end) continue;
        }

        // change of line
        if (line + 1 >= spans.size()) break;
        ++line;
        x = word_target_x(layout.words[spans[line].first_word], rs);
        y = line_y(line);
    }
    return session;
}

double* class_field(ClassParams& c, const std::string& field) {
    if (field == "fixation_duration_mean_ms") return &c.fixation_duration_mean_ms;
    if (field == "fixation_duration_sd_ms") return &c.fixation_duration_sd_ms;
    if (field == "forward_saccade_mean_px") return &c.forward_saccade_mean_px;
    if (field == "forward_saccade_sd_px") return &c.forward_saccade_sd_px;
    if (field == "regression_prob") return &c.regression_prob;
    if (field == "word_skip_prob") return &c.word_skip_prob;
    if (field == "short_step_prob") return &c.short_step_prob;
    return nullptr;
}

}  // namespace

void SynthSpec::validate() const {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    for (const ClassParams* c : {&control, &dyslexic}) {
        if (c->fixation_duration_sd_ms < 0 || c->forward_saccade_sd_px < 0)
            throw std::invalid_argument("synth spec: sds must be >= 0");
        if (!prob_ok(c->regression_prob) || !prob_ok(c->word_skip_prob) || !prob_ok(c->short_step_prob))
            throw std::invalid_argument("synth spec: probabilities must lie in [0,1]");
        if (c->fixation_duration_mean_ms <= 0 || c->forward_saccade_mean_px <= 0)
            throw std::invalid_argument("synth spec: means must be positive");
    }
    if (!prob_ok(missing_roi_prob)) throw std::invalid_argument("synth spec: missing_roi_prob must lie in [0,1]");
    if (n_control == 0 && n_dyslexic == 0)
        throw std::invalid_argument("synth spec: at least one subject required");
    if (word_count < 2 || line_width_px < 200 || line_height_px < 20 || screen_width_px < line_width_px + 100)
        throw std::invalid_argument("synth spec: degenerate layout geometry");
    if (max_fixations < 10)
        throw std::invalid_argument("synth spec: max_fixations must be >= 10");
    if (saccade_within_cv < 0.0 || saccade_within_cv > 1.0)
        throw std::invalid_argument("synth spec: saccade_within_cv must lie in [0,1]");
}

ClassParams default_dyslexic_params() {
    ClassParams p;
    p.forward_saccade_mean_px = 115.0;
    p.forward_saccade_sd_px = 17.0;
    p.regression_prob = 0.078;
    p.word_skip_prob = 0.05;
    p.short_step_prob = 0.18;
    return p;
}

SynthSpec default_planted_spec() {
    SynthSpec spec;
    spec.dyslexic = default_dyslexic_params();
    // Single-line ribbon presentation: the whole text sits on one long line, so
    // no line-return sweeps enter the saccade stream and the movement counts
    // reflect reading behaviour alone.
    spec.line_width_px = 46000.0;
    spec.screen_width_px = 46200.0;
    spec.saccade_within_cv = 0.12;
    return spec;
}

SynthSpec parse_synth_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open synth spec file: " + path);
    SynthSpec spec = default_planted_spec();
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
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(synth_spec_keys().begin(), synth_spec_keys().end(), key) ==
            synth_spec_keys().end())
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        try {
            apply_synth_kv(spec, key, value);
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad value '" + value + "'");
        }
    }
    spec.validate();
    return spec;
}

const std::vector<std::string>& synth_spec_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k{"n_control", "n_dyslexic", "seed",
                                   "word_count", "line_width_px", "line_height_px",
                                   "screen_width_px", "missing_roi_prob", "max_fixations", "saccade_within_cv"};
        for (const char* cls : {"control", "dyslexic"}) {
            for (const char* f :
                 {"fixation_duration_mean_ms", "fixation_duration_sd_ms", "forward_saccade_mean_px",
                  "forward_saccade_sd_px", "regression_prob", "word_skip_prob", "short_step_prob"}) {
                k.push_back(std::string(cls) + "_" + f);
            }
        }
        return k;
    }();
    return keys;
}

bool apply_synth_kv(SynthSpec& spec, const std::string& key, const std::string& value) {
    if (key == "n_control") spec.n_control = std::stoull(value);
    else if (key == "n_dyslexic") spec.n_dyslexic = std::stoull(value);
    else if (key == "seed") spec.seed = std::stoull(value);
    else if (key == "word_count") spec.word_count = std::stoi(value);
    else if (key == "line_width_px") spec.line_width_px = std::stod(value);
    else if (key == "line_height_px") spec.line_height_px = std::stod(value);
    else if (key == "screen_width_px") spec.screen_width_px = std::stod(value);
    else if (key == "missing_roi_prob") spec.missing_roi_prob = std::stod(value);
    else if (key == "max_fixations") spec.max_fixations = std::stoull(value);
    else if (key == "saccade_within_cv") spec.saccade_within_cv = std::stod(value);
    else {
        const auto us = key.find('_');
        if (us == std::string::npos) return false;
        const std::string cls_name = key.substr(0, us);
        if (cls_name != "control" && cls_name != "dyslexic") return false;
        ClassParams& cls = cls_name == "control" ? spec.control : spec.dyslexic;
        double* field = class_field(cls, key.substr(us + 1));
        if (!field) return false;
        *field = std::stod(value);
    }
    return true;
}

std::string synth_spec_to_kv(const SynthSpec& spec) {
    // shortest round-trip formatting so a saved spec reparses bit-for-bit
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream out;
    out << "n_control=" << spec.n_control << "\n";
    out << "n_dyslexic=" << spec.n_dyslexic << "\n";
    out << "seed=" << spec.seed << "\n";
    auto emit_class = [&](const char* name, const ClassParams& c) {
        out << name << "_fixation_duration_mean_ms=" << num(c.fixation_duration_mean_ms) << "\n";
        out << name << "_fixation_duration_sd_ms=" << num(c.fixation_duration_sd_ms) << "\n";
        out << name << "_forward_saccade_mean_px=" << num(c.forward_saccade_mean_px) << "\n";
        out << name << "_forward_saccade_sd_px=" << num(c.forward_saccade_sd_px) << "\n";
        out << name << "_regression_prob=" << num(c.regression_prob) << "\n";
        out << name << "_word_skip_prob=" << num(c.word_skip_prob) << "\n";
        out << name << "_short_step_prob=" << num(c.short_step_prob) << "\n";
    };
    emit_class("control", spec.control);
    emit_class("dyslexic", spec.dyslexic);
    out << "word_count=" << spec.word_count << "\n";
    out << "line_width_px=" << num(spec.line_width_px) << "\n";
    out << "line_height_px=" << num(spec.line_height_px) << "\n";
    out << "screen_width_px=" << num(spec.screen_width_px) << "\n";
    out << "missing_roi_prob=" << num(spec.missing_roi_prob) << "\n";
    out << "max_fixations=" << spec.max_fixations << "\n";
    out << "saccade_within_cv=" << num(spec.saccade_within_cv) << "\n";
    return out.str();
}

ingest::Cohort generate_synthetic_cohort(const SynthSpec& spec) {
    spec.validate();
    ingest::Cohort cohort;
    TextLayout layout = make_layout(spec);
    const auto spans = line_spans(layout);

    const std::size_t total = spec.n_control + spec.n_dyslexic;
    for (std::size_t i = 0; i < total; ++i) {
        const bool dyslexic = i >= spec.n_control;
        const ClassParams& cls = dyslexic ? spec.dyslexic : spec.control;
        rng::Stream rs(rng::derive_seed(spec.seed, {1, i}));

        char id[32];
        std::snprintf(id, sizeof(id), "s%03zu", i + 1);
        const SubjectParams p = draw_subject_params(cls, spec.saccade_within_cv, rs);
        ReadingSession session = walk_subject(id, dyslexic ? Label::dyslexic : Label::control,
                                              layout, spans, p, spec.max_fixations, rs);
        session = ingest::assign_rois(std::move(session), layout);
        if (spec.missing_roi_prob > 0.0 && rs.bernoulli(spec.missing_roi_prob)) {
            for (auto& f : session.fixations) f.roi.reset();
        }
        cohort.sessions.push_back(std::move(session));
    }
    cohort.layouts.emplace("", std::move(layout));
    return cohort;
}

}  // namespace dyslex::synth
