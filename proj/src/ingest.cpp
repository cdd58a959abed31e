#include "dyslex/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dyslex::ingest {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

[[noreturn]] void fail(const std::string& msg) { throw CohortError(msg); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e) fail(where + ": not a number: '" + s + "'");
    return v;
}

}  // namespace

std::string label_name(Label l) {
    switch (l) {
        case Label::control: return "control";
        case Label::dyslexic: return "dyslexic";
        case Label::unknown: return "unknown";
    }
    return "unknown";
}

Label parse_label(const std::string& s) {
    if (s == "control") return Label::control;
    if (s == "dyslexic") return Label::dyslexic;
    if (s == "unknown") return Label::unknown;
    throw std::invalid_argument("unknown label '" + s + "'");
}

int TextLayout::line_count() const {
    int max_line = -1;
    for (const auto& w : words) max_line = std::max(max_line, w.line);
    return max_line + 1;
}

void TextLayout::validate() const {
    if (!(screen_width > 0) || !(screen_height > 0) || !(line_height > 0))
        throw std::invalid_argument("layout: screen and line dimensions must be positive");
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto& w = words[i];
        if (w.index != static_cast<int>(i))
            throw std::invalid_argument("layout: word indices must be contiguous 0..N-1 in order");
        if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max))
            throw std::invalid_argument("layout: degenerate word box at index " + std::to_string(i));
    }
    // boxes on one line must not overlap horizontally
    std::map<int, std::vector<const WordBox*>> by_line;
    for (const auto& w : words) by_line[w.line].push_back(&w);
    for (auto& [line, boxes] : by_line) {
        std::sort(boxes.begin(), boxes.end(),
                  [](const WordBox* a, const WordBox* b) { return a->x_min < b->x_min; });
        for (std::size_t i = 1; i < boxes.size(); ++i) {
            if (boxes[i]->x_min < boxes[i - 1]->x_max)
                throw std::invalid_argument("layout: overlapping boxes on line " + std::to_string(line));
        }
    }
}

const TextLayout& Cohort::layout_for(const std::string& text_id) const {
    auto it = layouts.find(text_id);
    if (it != layouts.end()) return it->second;
    it = layouts.find("");
    if (it != layouts.end()) return it->second;
    throw CohortError("unknown text_id '" + text_id + "': no layout resolves it");
}

std::size_t Cohort::count_label(Label l) const {
    std::size_t n = 0;
    for (const auto& s : sessions)
        if (s.label == l) ++n;
    return n;
}

TextLayout parse_layout_json_text(const std::string& json_text, std::string* text_id_out) {
    json j = json::parse(json_text);
    TextLayout layout;
    layout.screen_width = j.at("screen_width").get<double>();
    layout.screen_height = j.at("screen_height").get<double>();
    layout.line_height = j.at("line_height").get<double>();
    for (const auto& w : j.at("words")) {
        WordBox box;
        box.index = w.at("index").get<int>();
        box.line = w.at("line").get<int>();
        box.x_min = w.at("x_min").get<double>();
        box.x_max = w.at("x_max").get<double>();
        box.y_min = w.at("y_min").get<double>();
        box.y_max = w.at("y_max").get<double>();
        layout.words.push_back(box);
    }
    if (text_id_out) *text_id_out = j.value("text_id", std::string{});
    layout.validate();
    return layout;
}

std::map<std::string, TextLayout> parse_layout_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open layout file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::map<std::string, TextLayout> out;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail("layout file " + path + ": " + e.what());
    }
    try {
        if (j.contains("layouts")) {
            for (const auto& entry : j.at("layouts")) {
                std::string tid;
                TextLayout layout = parse_layout_json_text(entry.dump(), &tid);
                if (out.count(tid)) fail("layout file " + path + ": duplicate text_id '" + tid + "'");
                out.emplace(tid, std::move(layout));
            }
        } else {
            std::string tid;
            TextLayout layout = parse_layout_json_text(text, &tid);
            out.emplace(tid, std::move(layout));
        }
    } catch (const json::exception& e) {
        fail("layout file " + path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        fail("layout file " + path + ": " + e.what());
    }
    return out;
}

Cohort parse_cohort(const std::string& session_file, const std::string& layout_file) {
    Cohort cohort;
    cohort.layouts = parse_layout_file(layout_file);

    std::ifstream in(session_file);
    if (!in) fail("cannot open session file: " + session_file);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(session_file + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "subject_id,label,text_id,x,y,t_start,t_end,roi")
        fail(session_file + ":1: unexpected header '" + line + "'");

    // session key = (subject_id, text_id), order of first appearance
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, ReadingSession> by_key;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = session_file + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) fail(where + ": expected 8 fields, got " + std::to_string(fields.size()));

        Fixation f;
        f.x = parse_number(fields[3], where);
        f.y = parse_number(fields[4], where);
        f.t_start_ms = parse_number(fields[5], where);
        f.t_end_ms = parse_number(fields[6], where);
        if (!std::isfinite(f.x) || !std::isfinite(f.y))
            fail(where + ": non-finite coordinate");
        if (!(f.t_end_ms > f.t_start_ms))
            fail(where + ": fixation interval must satisfy t_end > t_start");
        if (!fields[7].empty()) {
            const double roi = parse_number(fields[7], where);
            if (roi < 0 || roi != std::floor(roi)) fail(where + ": roi must be a non-negative integer");
            f.roi = static_cast<int>(roi);
        }

        Label label;
        try {
            label = parse_label(fields[1]);
        } catch (const std::invalid_argument& e) {
            fail(where + ": " + e.what());
        }

        const auto key = std::make_pair(fields[0], fields[2]);
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            ReadingSession s;
            s.subject_id = fields[0];
            s.label = label;
            s.text_id = fields[2];
            it = by_key.emplace(key, std::move(s)).first;
            order.push_back(key);
        } else if (it->second.label != label) {
            fail(where + ": conflicting label for subject '" + fields[0] + "'");
        }
        it->second.fixations.push_back(f);
    }

    for (const auto& key : order) {
        ReadingSession& s = by_key.at(key);
        std::stable_sort(s.fixations.begin(), s.fixations.end(),
                         [](const Fixation& a, const Fixation& b) { return a.t_start_ms < b.t_start_ms; });
        for (std::size_t i = 1; i < s.fixations.size(); ++i) {
            if (s.fixations[i].t_start_ms < s.fixations[i - 1].t_end_ms)
                fail(session_file + ": overlapping fixation intervals for subject '" + s.subject_id + "'");
        }
        const TextLayout& layout = cohort.layout_for(s.text_id);
        for (const Fixation& f : s.fixations) {
            if (f.x < 0 || f.x > layout.screen_width || f.y < 0 || f.y > layout.screen_height)
                fail(session_file + ": off-screen fixation for subject '" + s.subject_id + "'");
        }
        cohort.sessions.push_back(std::move(s));
    }
    return cohort;
}

void write_sessions_csv(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write session file: " + path);
    out << "subject_id,label,text_id,x,y,t_start,t_end,roi\n";
    for (const auto& s : cohort.sessions) {
        for (const auto& f : s.fixations) {
            out << s.subject_id << ',' << label_name(s.label) << ',' << s.text_id << ','
                << format_double(f.x) << ',' << format_double(f.y) << ','
                << format_double(f.t_start_ms) << ',' << format_double(f.t_end_ms) << ',';
            if (f.roi) out << *f.roi;
            out << '\n';
        }
    }
    if (!out) fail("write failed: " + path);
}

void write_layout_json(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write layout file: " + path);

    auto layout_to_json = [](const TextLayout& layout, const std::string& text_id) {
        ordered_json j;
        if (!text_id.empty()) j["text_id"] = text_id;
        j["screen_width"] = layout.screen_width;
        j["screen_height"] = layout.screen_height;
        j["line_height"] = layout.line_height;
        j["words"] = ordered_json::array();
        for (const auto& w : layout.words) {
            j["words"].push_back({{"index", w.index},
                                  {"line", w.line},
                                  {"x_min", w.x_min},
                                  {"x_max", w.x_max},
                                  {"y_min", w.y_min},
                                  {"y_max", w.y_max}});
        }
        return j;
    };

    if (cohort.layouts.size() == 1 && cohort.layouts.begin()->first.empty()) {
        out << layout_to_json(cohort.layouts.begin()->second, "").dump(2) << '\n';
    } else {
        ordered_json j;
        j["layouts"] = ordered_json::array();
        for (const auto& [tid, layout] : cohort.layouts) j["layouts"].push_back(layout_to_json(layout, tid));
        out << j.dump(2) << '\n';
    }
    if (!out) fail("write failed: " + path);
}

ReadingSession assign_rois(ReadingSession session, const TextLayout& layout) {
    for (Fixation& f : session.fixations) {
        f.roi.reset();
        for (const WordBox& w : layout.words) {
            if (w.contains(f.x, f.y)) {
                f.roi = w.index;
                break;  // word order gives the lower-index tie rule
            }
        }
    }
    return session;
}

ValidationReport validate_cohort(const Cohort& cohort) {
    ValidationReport report;
    for (const auto& s : cohort.sessions) {
        SessionReport sr;
        sr.subject_id = s.subject_id;
        sr.text_id = s.text_id;
        sr.n_fixations = s.fixations.size();

        std::size_t none_count = 0;
        for (const auto& f : s.fixations)
            if (!f.roi) ++none_count;
        sr.none_roi_fraction =
            s.fixations.empty() ? 0.0 : static_cast<double>(none_count) / static_cast<double>(s.fixations.size());

        if (s.fixations.size() < 2) sr.flags.push_back("too short for saccade features");
        if (none_count == s.fixations.size()) sr.flags.push_back("no roi data; word-specific features will be missing");
        else if (sr.none_roi_fraction > 0.5) sr.flags.push_back("more than half of fixations on no word");

        const TextLayout& layout = cohort.layout_for(s.text_id);
        const int last_line = layout.line_count() - 1;
        if (last_line >= 0) {
            bool any_on_last = false;
            for (const auto& f : s.fixations) {
                if (f.roi && layout.words[static_cast<std::size_t>(*f.roi)].line == last_line) {
                    any_on_last = true;
                    break;
                }
            }
            if (!any_on_last) sr.flags.push_back("zero fixations on last line");
        }

        for (const auto& flag : sr.flags)
            report.issues.push_back(s.subject_id + "/" + s.text_id + ": " + flag);
        report.sessions.push_back(std::move(sr));
        report.label_counts[label_name(s.label)]++;
    }

    std::size_t majority = 0;
    for (const auto& [name, count] : report.label_counts) majority = std::max(majority, count);
    report.majority_class_fraction =
        cohort.sessions.empty() ? 0.0 : static_cast<double>(majority) / static_cast<double>(cohort.sessions.size());
    return report;
}

std::string ValidationReport::to_json() const {
    ordered_json j;
    j["n_sessions"] = sessions.size();
    j["label_counts"] = label_counts;
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", majority_class_fraction);
        j["majority_class_fraction"] = buf;
    }
    j["issues"] = issues;
    j["sessions"] = ordered_json::array();
    for (const auto& s : sessions) {
        j["sessions"].push_back({{"subject_id", s.subject_id},
                                 {"text_id", s.text_id},
                                 {"n_fixations", s.n_fixations},
                                 {"none_roi_fraction", s.none_roi_fraction},
                                 {"flags", s.flags}});
    }
    return j.dump(2);
}

}  // namespace dyslex::ingest
