#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyslex/features.hpp"
#include "dyslex/ingest.hpp"
#include "dyslex/lasso.hpp"
#include "dyslex/matrix.hpp"

namespace dyslex::pipeline {

enum class ClassifierKind { svm, gnb, centroid };
enum class SelectionMode { none, lasso_min_mse, lasso_one_se };

std::string classifier_name(ClassifierKind k);
ClassifierKind parse_classifier(const std::string& s);
std::string selection_name(SelectionMode s);
SelectionMode parse_selection(const std::string& s);

struct PipelineSpec {
    ClassifierKind classifier = ClassifierKind::svm;
    std::size_t kmeans_k = 2;            // centroid classifier only
    SelectionMode selection = SelectionMode::lasso_one_se;
    double c_param = 1.0;                // svm only
    std::uint64_t fold_seed = 1;         // LASSO CV fold shuffling
    std::uint64_t kmeans_seed = 1;
    std::size_t cv_folds = 5;            // LASSO CV folds
    bool nested_selection = false;       // rerun selection inside every LOOCV fold (extension)
    bool capture_fold_models = false;    // keep per-fold model dumps in the report

    std::string name() const;  // e.g. "svm:one_se", "kmeans2:min_mse", "gnb:none"
    void validate() const;
};

// battery token like "svm:one_se", "gnb:none", "kmeans3:min_mse"; base carries
// the shared seeds / c_param / flags
PipelineSpec parse_pipeline_token(const std::string& token, const PipelineSpec& base);

enum class NoiseMode { train_on_noisy, train_on_clean };

std::string noise_mode_name(NoiseMode m);
NoiseMode parse_noise_mode(const std::string& s);

struct NoiseSpec {
    std::vector<double> sigma_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t replicates = 10;
    std::uint64_t noise_seed = 1;
    NoiseMode mode = NoiseMode::train_on_clean;
    bool complete_cases = false;  // evaluate only noisy rows with no missing features

    void validate() const;
};

struct PipelineOutcome {
    double accuracy_pct = 0.0;                    // 100 * correct / n, exact rational
    std::vector<int> predictions;                 // +1 / -1, aligned with the block's subjects
    std::vector<std::string> selected_features;   // schema names; empty for selection=none
    std::vector<std::string> fold_model_dumps;    // filled when capture_fold_models
};

// One evaluated text: every pipeline of the battery scored on its subjects.
struct TextBlock {
    std::string text_id;
    std::vector<std::string> subject_ids;
    std::vector<int> labels;  // +1 dyslexic, -1 control
    double trivial_pct = 0.0;
    std::vector<PipelineOutcome> outcomes;  // aligned with EvalReport::pipeline_names
};

struct NoiseRow {
    double sigma = 0.0;
    double mean_pct = 0.0;
    double min_pct = 0.0;
    double max_pct = 0.0;
    std::vector<double> replicate_pct;  // per replicate, input order
};

struct NoiseSection {
    std::string mode;
    std::string pipeline;
    std::vector<NoiseRow> rows;
    // train_on_clean references: the final clean model re-scoring its own
    // training data, and the clean LOOCV accuracy of the same pipeline
    std::optional<double> clean_accuracy_pct;
    std::optional<double> clean_loocv_pct;
};

struct EvalReport {
    std::vector<std::string> pipeline_names;  // row order of the table
    std::vector<TextBlock> texts;             // column order of the table
    bool with_trivial_row = false;            // battery runs append the baseline row
    std::optional<NoiseSection> noise;

    std::string table_csv() const;
    std::string to_json() const;
};

enum class ReportFormat { table_csv, json };

void emit_report(const EvalReport& report, ReportFormat format, const std::string& path);

// 100 * majority count / n; order-invariant
double trivial_accuracy(const std::vector<int>& labels);
double trivial_accuracy(const std::vector<ingest::Label>& labels);

// Leave-one-out over the rows of each text block. Unless nested_selection is
// set, LASSO feature selection runs once on the full imputed+standardized
// data of the block; imputation, standardization and the classifier are
// always refit on the n-1 training rows of every fold.
EvalReport loocv(const features::FeatureTable& table, const PipelineSpec& spec);

EvalReport run_battery(const features::FeatureTable& table, const std::vector<PipelineSpec>& specs,
                       bool with_trivial_row);

// the 12-row battery mirroring the published table: svm / gnb / kmeans{2,3,4}
// under one_se and min_mse selection, plus svm:none and gnb:none
std::vector<PipelineSpec> default_battery(const PipelineSpec& base);

// Full cross-validated LASSO per text: imputation and standardization fitted
// on all of that text's rows, then cv over spec.cv_folds with spec.fold_seed.
struct TextSelection {
    std::string text_id;
    selection::LassoCvResult cv;
};
std::vector<TextSelection> selection_reports(const features::FeatureTable& table,
                                             const PipelineSpec& spec);

// Displaces each fixation by N(0, sigma^2) per axis, clamps to the screen,
// reassigns ROIs from the displaced positions; timestamps untouched.
ingest::ReadingSession inject_noise(const ingest::ReadingSession& session,
                                    const ingest::TextLayout& layout, double sigma,
                                    std::uint64_t seed);

EvalReport noise_sweep(const ingest::Cohort& cohort, const PipelineSpec& spec, const NoiseSpec& noise,
                       std::size_t n_threads = 1);

// FNV-1a over bytes; used to compare model dumps without storing them
std::uint64_t fnv1a_hash(const std::string& bytes);

std::string format_pct(double pct);  // fixed two decimals

}  // namespace dyslex::pipeline
