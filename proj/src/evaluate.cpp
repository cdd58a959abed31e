#include "dyslex/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "dyslex/impute.hpp"
#include "dyslex/kmeans.hpp"
#include "dyslex/naive_bayes.hpp"
#include "dyslex/rng.hpp"
#include "dyslex/standardize.hpp"
#include "dyslex/svm.hpp"
#include "json.hpp"

namespace dyslex::pipeline {

namespace {

int label_pm(ingest::Label l) {
    require(l != ingest::Label::unknown, "evaluate: subject with unknown label");
    return l == ingest::Label::dyslexic ? +1 : -1;
}

std::string pm_name(int pm) { return pm == +1 ? "dyslexic" : "control"; }

Matrix take_columns(const Matrix& x, const std::vector<std::size_t>& cols) {
    Matrix out(x.rows, cols.size());
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = x(i, cols[j]);
    return out;
}

Matrix drop_row(const Matrix& x, std::size_t row) {
    Matrix out(x.rows - 1, x.cols);
    std::size_t r = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        if (i == row) continue;
        std::copy(x.row(i), x.row(i) + x.cols, out.row(r));
        ++r;
    }
    return out;
}

int majority_label(const std::vector<int>& labels) {
    long vote = 0;
    for (int l : labels) vote += l;
    return vote > 0 ? +1 : -1;  // ties go to control
}

// rows of one text, in table order
struct BlockData {
    std::string text_id;
    std::vector<std::string> subject_ids;
    std::vector<int> labels;
    Matrix x;  // n x 35, NaN = missing
};

std::vector<BlockData> split_by_text(const features::FeatureTable& table) {
    std::vector<BlockData> blocks;
    for (std::size_t i = 0; i < table.subject_ids.size(); ++i) {
        auto it = std::find_if(blocks.begin(), blocks.end(),
                               [&](const BlockData& b) { return b.text_id == table.text_ids[i]; });
        if (it == blocks.end()) {
            blocks.push_back({table.text_ids[i], {}, {}, Matrix()});
            it = std::prev(blocks.end());
        }
        it->subject_ids.push_back(table.subject_ids[i]);
        it->labels.push_back(label_pm(table.labels[i]));
    }
    for (auto& b : blocks) b.x = Matrix(b.subject_ids.size(), features::kFeatureCount);
    std::vector<std::size_t> cursor(blocks.size(), 0);
    for (std::size_t i = 0; i < table.subject_ids.size(); ++i) {
        const std::size_t bi =
            std::find_if(blocks.begin(), blocks.end(),
                         [&](const BlockData& b) { return b.text_id == table.text_ids[i]; }) -
            blocks.begin();
        std::copy(table.values.row(i), table.values.row(i) + features::kFeatureCount,
                  blocks[bi].x.row(cursor[bi]++));
    }
    return blocks;
}

// impute + standardize fitted on all rows, then cross-validated LASSO on the
// +1/-1 labels
selection::LassoCvResult run_selection_cv(const Matrix& x, const std::vector<int>& labels,
                                          const PipelineSpec& spec) {
    MedianImputer imputer;
    imputer.fit(x);
    Matrix filled = imputer.transform(x);
    const auto standardizer = selection::Standardizer::fit(filled);
    const Matrix z = standardizer.transform(filled);
    std::vector<double> y(labels.begin(), labels.end());
    const auto grid = selection::make_lambda_grid(z, y);
    return selection::cv_lasso(z, y, spec.cv_folds, grid, spec.fold_seed);
}

std::set<std::size_t> run_selection(const Matrix& x, const std::vector<int>& labels,
                                    const PipelineSpec& spec) {
    return selection::select_dominant(
        run_selection_cv(x, labels, spec),
        spec.selection == SelectionMode::lasso_min_mse ? selection::SelectionRule::min_mse
                                                       : selection::SelectionRule::one_se);
}

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::svm;
    bool majority_only = false;  // empty feature set fallback
    int majority = -1;
    classify::LinearSvmModel svm;
    classify::GaussianNbModel gnb;
    classify::CentroidModel centroid;

    int predict(const double* row, std::size_t p) const {
        if (majority_only) return majority;
        switch (kind) {
            case ClassifierKind::svm: return svm.predict(row, p);
            case ClassifierKind::gnb: return gnb.predict(row, p);
            case ClassifierKind::centroid: return centroid.predict(row, p);
        }
        throw std::logic_error("evaluate: bad classifier kind");
    }

    std::string dump() const {
        if (majority_only) {
            nlohmann::ordered_json j;
            j["kind"] = "majority";
            j["label"] = majority;
            return j.dump(2);
        }
        switch (kind) {
            case ClassifierKind::svm: return svm.to_json();
            case ClassifierKind::gnb: return gnb.to_json();
            case ClassifierKind::centroid: return centroid.to_json();
        }
        throw std::logic_error("evaluate: bad classifier kind");
    }
};

TrainedModel train_model(const PipelineSpec& spec, const Matrix& xtr, const std::vector<int>& ytr) {
    TrainedModel m;
    m.kind = spec.classifier;
    if (xtr.cols == 0) {
        m.majority_only = true;
        m.majority = majority_label(ytr);
        return m;
    }
    switch (spec.classifier) {
        case ClassifierKind::svm: {
            classify::SvmOptions o;
            o.c_param = spec.c_param;
            m.svm = classify::svm_train(xtr, ytr, o);
            break;
        }
        case ClassifierKind::gnb:
            m.gnb = classify::gnb_train(xtr, ytr);
            break;
        case ClassifierKind::centroid: {
            classify::KmeansOptions o;
            o.k = spec.kmeans_k;
            o.seed = spec.kmeans_seed;
            m.centroid = classify::kmeans_train(xtr, ytr, o);
            break;
        }
    }
    return m;
}

std::vector<std::size_t> as_sorted(const std::set<std::size_t>& s) {
    return std::vector<std::size_t>(s.begin(), s.end());
}

std::vector<std::string> column_names(const std::vector<std::size_t>& cols) {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t c : cols) names.push_back(features::feature_names()[c]);
    return names;
}

PipelineOutcome eval_block(const BlockData& b, const PipelineSpec& spec) {
    const std::size_t n = b.subject_ids.size();
    require(n >= 3, "loocv: need at least 3 subjects per text");
    const bool has_pos = std::count(b.labels.begin(), b.labels.end(), +1) > 0;
    const bool has_neg = std::count(b.labels.begin(), b.labels.end(), -1) > 0;
    require(has_pos && has_neg, "loocv: both classes required");

    PipelineOutcome out;
    std::vector<std::size_t> cols;
    if (spec.selection == SelectionMode::none) {
        cols.resize(features::kFeatureCount);
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
    } else if (!spec.nested_selection) {
        cols = as_sorted(run_selection(b.x, b.labels, spec));
        out.selected_features = column_names(cols);
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> ytr;
        ytr.reserve(n - 1);
        for (std::size_t r = 0; r < n; ++r)
            if (r != i) ytr.push_back(b.labels[r]);

        std::vector<std::size_t> fold_cols = cols;
        if (spec.nested_selection && spec.selection != SelectionMode::none)
            fold_cols = as_sorted(run_selection(drop_row(b.x, i), ytr, spec));

        const Matrix sub = take_columns(b.x, fold_cols);
        const Matrix train = drop_row(sub, i);
        TrainedModel model;
        std::vector<double> test_row(sub.row(i), sub.row(i) + sub.cols);
        if (fold_cols.empty()) {
            model.kind = spec.classifier;
            model.majority_only = true;
            model.majority = majority_label(ytr);
        } else {
            MedianImputer imputer;
            imputer.fit(train);
            Matrix xtr = imputer.transform(train);
            const auto standardizer = selection::Standardizer::fit(xtr);
            xtr = standardizer.transform(xtr);
            model = train_model(spec, xtr, ytr);
            imputer.transform_row(test_row.data(), test_row.size());
            standardizer.transform_row(test_row.data(), test_row.size());
        }
        const int pred = model.predict(test_row.data(), test_row.size());
        out.predictions.push_back(pred);
        if (pred == b.labels[i]) ++correct;
        if (spec.capture_fold_models) out.fold_model_dumps.push_back(model.dump());
    }
    out.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
    return out;
}

double rounded_pct(double pct) { return std::stod(format_pct(pct)); }

}  // namespace

std::string classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::gnb: return "gnb";
        case ClassifierKind::centroid: return "kmeans";
    }
    throw std::logic_error("bad classifier kind");
}

ClassifierKind parse_classifier(const std::string& s) {
    if (s == "svm") return ClassifierKind::svm;
    if (s == "gnb") return ClassifierKind::gnb;
    if (s == "kmeans" || s == "centroid") return ClassifierKind::centroid;
    throw std::invalid_argument("unknown classifier: " + s);
}

std::string selection_name(SelectionMode s) {
    switch (s) {
        case SelectionMode::none: return "none";
        case SelectionMode::lasso_min_mse: return "min_mse";
        case SelectionMode::lasso_one_se: return "one_se";
    }
    throw std::logic_error("bad selection mode");
}

SelectionMode parse_selection(const std::string& s) {
    if (s == "none") return SelectionMode::none;
    if (s == "min_mse") return SelectionMode::lasso_min_mse;
    if (s == "one_se") return SelectionMode::lasso_one_se;
    throw std::invalid_argument("unknown selection mode: " + s);
}

std::string noise_mode_name(NoiseMode m) {
    return m == NoiseMode::train_on_noisy ? "train_on_noisy" : "train_on_clean";
}

NoiseMode parse_noise_mode(const std::string& s) {
    if (s == "train_on_noisy" || s == "train-on-noisy") return NoiseMode::train_on_noisy;
    if (s == "train_on_clean" || s == "train-on-clean") return NoiseMode::train_on_clean;
    throw std::invalid_argument("unknown noise mode: " + s);
}

std::string PipelineSpec::name() const {
    std::string base = classifier_name(classifier);
    if (classifier == ClassifierKind::centroid) base += std::to_string(kmeans_k);
    return base + ":" + selection_name(selection);
}

void PipelineSpec::validate() const {
    require(c_param > 0.0, "pipeline: c_param must be positive");
    require(cv_folds >= 2, "pipeline: cv_folds must be at least 2");
    if (classifier == ClassifierKind::centroid)
        require(kmeans_k >= 1, "pipeline: kmeans k must be at least 1");
}

PipelineSpec parse_pipeline_token(const std::string& token, const PipelineSpec& base) {
    const auto colon = token.find(':');
    require(colon != std::string::npos && colon > 0 && colon + 1 < token.size(),
            "pipeline token must look like <classifier>:<selection>");
    std::string head = token.substr(0, colon);
    PipelineSpec spec = base;
    spec.selection = parse_selection(token.substr(colon + 1));
    if (head.rfind("kmeans", 0) == 0 && head.size() > 6) {
        spec.classifier = ClassifierKind::centroid;
        const std::string digits = head.substr(6);
        for (char c : digits) require(c >= '0' && c <= '9', "bad kmeans k in pipeline token");
        spec.kmeans_k = static_cast<std::size_t>(std::stoul(digits));
        require(spec.kmeans_k >= 1, "bad kmeans k in pipeline token");
    } else {
        spec.classifier = parse_classifier(head);
        if (spec.classifier == ClassifierKind::centroid) spec.kmeans_k = base.kmeans_k;
    }
    return spec;
}

void NoiseSpec::validate() const {
    require(!sigma_grid.empty(), "noise: empty sigma grid");
    for (double s : sigma_grid) require(s > 0.0 && std::isfinite(s), "noise: sigmas must be positive");
    require(replicates >= 1, "noise: replicates must be at least 1");
}

double trivial_accuracy(const std::vector<int>& labels) {
    require(!labels.empty(), "trivial_accuracy: empty labels");
    std::size_t pos = 0;
    for (int l : labels) {
        require(l == +1 || l == -1, "trivial_accuracy: labels must be +1 or -1");
        if (l == +1) ++pos;
    }
    const std::size_t m = std::max(pos, labels.size() - pos);
    return 100.0 * static_cast<double>(m) / static_cast<double>(labels.size());
}

double trivial_accuracy(const std::vector<ingest::Label>& labels) {
    std::vector<int> pm;
    pm.reserve(labels.size());
    for (auto l : labels) pm.push_back(label_pm(l));
    return trivial_accuracy(pm);
}

std::string format_pct(double pct) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", pct);
    return buf;
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

EvalReport run_battery(const features::FeatureTable& table, const std::vector<PipelineSpec>& specs,
                       bool with_trivial_row) {
    require(!specs.empty(), "run_battery: no pipelines");
    for (const auto& s : specs) s.validate();
    EvalReport report;
    report.with_trivial_row = with_trivial_row;
    for (const auto& s : specs) report.pipeline_names.push_back(s.name());

    for (auto& b : split_by_text(table)) {
        TextBlock block;
        block.text_id = b.text_id;
        block.subject_ids = b.subject_ids;
        block.labels = b.labels;
        block.trivial_pct = trivial_accuracy(b.labels);
        for (const auto& s : specs) block.outcomes.push_back(eval_block(b, s));
        report.texts.push_back(std::move(block));
    }
    return report;
}

EvalReport loocv(const features::FeatureTable& table, const PipelineSpec& spec) {
    return run_battery(table, {spec}, false);
}

std::vector<TextSelection> selection_reports(const features::FeatureTable& table,
                                             const PipelineSpec& spec) {
    spec.validate();
    std::vector<TextSelection> out;
    for (const auto& b : split_by_text(table))
        out.push_back({b.text_id, run_selection_cv(b.x, b.labels, spec)});
    return out;
}

std::vector<PipelineSpec> default_battery(const PipelineSpec& base) {
    std::vector<PipelineSpec> specs;
    auto add = [&](ClassifierKind c, std::size_t k, SelectionMode sel) {
        PipelineSpec s = base;
        s.classifier = c;
        s.kmeans_k = k;
        s.selection = sel;
        specs.push_back(s);
    };
    for (auto sel : {SelectionMode::lasso_one_se, SelectionMode::lasso_min_mse, SelectionMode::none}) {
        add(ClassifierKind::svm, 2, sel);
        add(ClassifierKind::gnb, 2, sel);
    }
    for (std::size_t k : {2, 3, 4}) {
        add(ClassifierKind::centroid, k, SelectionMode::lasso_one_se);
        add(ClassifierKind::centroid, k, SelectionMode::lasso_min_mse);
    }
    return specs;
}

ingest::ReadingSession inject_noise(const ingest::ReadingSession& session,
                                    const ingest::TextLayout& layout, double sigma,
                                    std::uint64_t seed) {
    require(sigma > 0.0 && std::isfinite(sigma), "inject_noise: sigma must be positive");
    ingest::ReadingSession out = session;
    rng::Stream rs(seed);
    for (auto& f : out.fixations) {
        f.x = std::clamp(f.x + rs.normal(0.0, sigma), 0.0, layout.screen_width);
        f.y = std::clamp(f.y + rs.normal(0.0, sigma), 0.0, layout.screen_height);
    }
    return ingest::assign_rois(std::move(out), layout);
}

EvalReport noise_sweep(const ingest::Cohort& cohort, const PipelineSpec& spec, const NoiseSpec& noise,
                       std::size_t n_threads) {
    spec.validate();
    noise.validate();
    require(!cohort.sessions.empty(), "noise_sweep: empty cohort");
    for (const auto& s : cohort.sessions)
        require(s.text_id == cohort.sessions.front().text_id,
                "noise_sweep: cohort must contain a single text; filter sessions first");

    const auto clean_table = features::extract_cohort_features(cohort);
    auto blocks = split_by_text(clean_table);
    const BlockData& clean = blocks.front();

    PipelineSpec sweep_spec = spec;
    sweep_spec.capture_fold_models = false;

    EvalReport report;
    report.pipeline_names.push_back(spec.name());
    TextBlock block;
    block.text_id = clean.text_id;
    block.subject_ids = clean.subject_ids;
    block.labels = clean.labels;
    block.trivial_pct = trivial_accuracy(clean.labels);
    block.outcomes.push_back(eval_block(clean, spec));
    const double clean_loocv_pct = block.outcomes.front().accuracy_pct;
    report.texts.push_back(std::move(block));

    // train_on_clean: dominant features, imputation medians, standardization
    // and the final model all come from the clean cohort
    std::vector<std::size_t> clean_cols;
    MedianImputer clean_imputer;
    selection::Standardizer clean_std;
    TrainedModel clean_model;
    double clean_accuracy_pct = 0.0;
    if (noise.mode == NoiseMode::train_on_clean) {
        if (spec.selection == SelectionMode::none) {
            clean_cols.resize(features::kFeatureCount);
            for (std::size_t j = 0; j < clean_cols.size(); ++j) clean_cols[j] = j;
        } else {
            clean_cols = as_sorted(run_selection(clean.x, clean.labels, spec));
        }
        const Matrix sub = take_columns(clean.x, clean_cols);
        if (clean_cols.empty()) {
            clean_model.kind = spec.classifier;
            clean_model.majority_only = true;
            clean_model.majority = majority_label(clean.labels);
        } else {
            clean_imputer.fit(sub);
            Matrix xtr = clean_imputer.transform(sub);
            clean_std = selection::Standardizer::fit(xtr);
            xtr = clean_std.transform(xtr);
            clean_model = train_model(spec, xtr, clean.labels);
            std::size_t correct = 0;
            for (std::size_t i = 0; i < xtr.rows; ++i)
                if (clean_model.predict(xtr.row(i), xtr.cols) == clean.labels[i]) ++correct;
            clean_accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(xtr.rows);
        }
    }

    const std::size_t n_sigma = noise.sigma_grid.size();
    const std::size_t n_tasks = n_sigma * noise.replicates;
    std::vector<double> task_acc(n_tasks, 0.0);

    auto run_task = [&](std::size_t t) {
        const std::size_t si = t / noise.replicates;
        const std::size_t ri = t % noise.replicates;
        const double sigma = noise.sigma_grid[si];

        ingest::Cohort noisy;
        noisy.layouts = cohort.layouts;
        noisy.sessions.reserve(cohort.sessions.size());
        for (std::size_t s = 0; s < cohort.sessions.size(); ++s) {
            const auto& session = cohort.sessions[s];
            const auto seed = rng::derive_seed(noise.noise_seed, {si, ri, s});
            noisy.sessions.push_back(
                inject_noise(session, cohort.layout_for(session.text_id), sigma, seed));
        }
        const auto noisy_table = features::extract_cohort_features(noisy);
        auto noisy_blocks = split_by_text(noisy_table);
        BlockData& nb = noisy_blocks.front();

        if (noise.mode == NoiseMode::train_on_noisy) {
            task_acc[t] = eval_block(nb, sweep_spec).accuracy_pct;
            return;
        }

        std::size_t correct = 0, scored = 0;
        for (std::size_t i = 0; i < nb.subject_ids.size(); ++i) {
            if (noise.complete_cases) {
                bool complete = true;
                for (std::size_t j = 0; j < features::kFeatureCount && complete; ++j)
                    complete = !is_missing(nb.x(i, j));
                if (!complete) continue;
            }
            std::vector<double> row;
            row.reserve(clean_cols.size());
            for (std::size_t c : clean_cols) row.push_back(nb.x(i, c));
            if (!clean_cols.empty()) {
                clean_imputer.transform_row(row.data(), row.size());
                clean_std.transform_row(row.data(), row.size());
            }
            if (clean_model.predict(row.data(), row.size()) == nb.labels[i]) ++correct;
            ++scored;
        }
        require(scored > 0, "noise_sweep: complete-case filter removed every subject");
        task_acc[t] = 100.0 * static_cast<double>(correct) / static_cast<double>(scored);
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(n_threads, n_tasks));
    if (workers == 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= n_tasks) return;
                try {
                    run_task(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    NoiseSection section;
    section.mode = noise_mode_name(noise.mode);
    section.pipeline = spec.name();
    section.clean_loocv_pct = clean_loocv_pct;
    if (noise.mode == NoiseMode::train_on_clean) section.clean_accuracy_pct = clean_accuracy_pct;
    for (std::size_t si = 0; si < n_sigma; ++si) {
        NoiseRow row;
        row.sigma = noise.sigma_grid[si];
        row.replicate_pct.assign(task_acc.begin() + static_cast<std::ptrdiff_t>(si * noise.replicates),
                                 task_acc.begin() + static_cast<std::ptrdiff_t>((si + 1) * noise.replicates));
        row.min_pct = *std::min_element(row.replicate_pct.begin(), row.replicate_pct.end());
        row.max_pct = *std::max_element(row.replicate_pct.begin(), row.replicate_pct.end());
        double sum = 0.0;
        for (double a : row.replicate_pct) sum += a;
        row.mean_pct = sum / static_cast<double>(row.replicate_pct.size());
        section.rows.push_back(std::move(row));
    }
    report.noise = std::move(section);
    return report;
}

std::string EvalReport::table_csv() const {
    std::string out = "pipeline";
    for (const auto& t : texts) out += "," + t.text_id;
    out += "\n";
    for (std::size_t p = 0; p < pipeline_names.size(); ++p) {
        out += pipeline_names[p];
        for (const auto& t : texts) out += "," + format_pct(t.outcomes[p].accuracy_pct);
        out += "\n";
    }
    if (with_trivial_row) {
        out += "trivial";
        for (const auto& t : texts) out += "," + format_pct(t.trivial_pct);
        out += "\n";
    }
    if (noise) {
        out += "\nsigma,mean_accuracy_pct,min_accuracy_pct,max_accuracy_pct\n";
        for (const auto& r : noise->rows) {
            char head[32];
            std::snprintf(head, sizeof head, "%g", r.sigma);
            out += std::string(head) + "," + format_pct(r.mean_pct) + "," + format_pct(r.min_pct) +
                   "," + format_pct(r.max_pct) + "\n";
        }
    }
    return out;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["pipelines"] = pipeline_names;
    j["with_trivial_row"] = with_trivial_row;
    auto& jt = j["texts"] = nlohmann::ordered_json::array();
    for (const auto& t : texts) {
        nlohmann::ordered_json b;
        b["text_id"] = t.text_id;
        b["subject_ids"] = t.subject_ids;
        std::vector<std::string> label_names;
        for (int l : t.labels) label_names.push_back(pm_name(l));
        b["labels"] = label_names;
        b["trivial_accuracy_pct"] = rounded_pct(t.trivial_pct);
        auto& outs = b["pipelines"] = nlohmann::ordered_json::array();
        for (std::size_t p = 0; p < pipeline_names.size(); ++p) {
            const auto& o = t.outcomes[p];
            nlohmann::ordered_json po;
            po["name"] = pipeline_names[p];
            po["accuracy_pct"] = rounded_pct(o.accuracy_pct);
            std::vector<std::string> preds;
            for (int l : o.predictions) preds.push_back(pm_name(l));
            po["predictions"] = preds;
            po["selected_features"] = o.selected_features;
            if (!o.fold_model_dumps.empty()) {
                std::vector<std::string> hashes;
                for (const auto& d : o.fold_model_dumps)
                    hashes.push_back(std::to_string(fnv1a_hash(d)));
                po["fold_model_hashes"] = hashes;
            }
            outs.push_back(std::move(po));
        }
        jt.push_back(std::move(b));
    }
    if (noise) {
        nlohmann::ordered_json n;
        n["mode"] = noise->mode;
        n["pipeline"] = noise->pipeline;
        if (noise->clean_accuracy_pct) n["clean_accuracy_pct"] = rounded_pct(*noise->clean_accuracy_pct);
        if (noise->clean_loocv_pct) n["clean_loocv_accuracy_pct"] = rounded_pct(*noise->clean_loocv_pct);
        auto& rows = n["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : noise->rows) {
            nlohmann::ordered_json jr;
            jr["sigma"] = r.sigma;
            jr["mean_pct"] = rounded_pct(r.mean_pct);
            jr["min_pct"] = rounded_pct(r.min_pct);
            jr["max_pct"] = rounded_pct(r.max_pct);
            std::vector<double> reps;
            for (double a : r.replicate_pct) reps.push_back(rounded_pct(a));
            jr["replicate_pct"] = reps;
            rows.push_back(std::move(jr));
        }
        j["noise"] = std::move(n);
    }
    return j.dump(2);
}

void emit_report(const EvalReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
    out << (format == ReportFormat::table_csv ? report.table_csv() : report.to_json());
    if (format == ReportFormat::json) out << "\n";
    if (!out) throw std::runtime_error("failed writing report file: " + path);
}

}  // namespace dyslex::pipeline
