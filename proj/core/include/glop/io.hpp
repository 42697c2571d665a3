#pragma once

#include <glop/analysis.hpp>
#include <glop/lars.hpp>
#include <glop/model.hpp>
#include <glop/selection.hpp>
#include <glop/uniqueness.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace glop {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Model file: names, g, L (one array per patient column), penalty, fit status and
/// an optional embedded uniqueness certificate.
struct ModelFile {
  GlopModel model;
  std::optional<UniquenessCertificate> certificate;
};

std::string model_to_json(const GlopModel& model,
                          const std::optional<UniquenessCertificate>& certificate = std::nullopt);
/// Throws SchemaError on missing or mistyped fields.
ModelFile model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const GlopModel& model,
                const std::optional<UniquenessCertificate>& certificate = std::nullopt);
ModelFile load_model(const std::filesystem::path& path);

std::string certificate_to_json(const UniquenessCertificate& certificate);
UniquenessCertificate certificate_from_json(const std::string& text);

std::string selection_to_json(const SelectionResult& result);
SelectionResult selection_from_json(const std::string& text);

std::string outlier_report_to_json(const OutlierReport& report);
OutlierReport outlier_report_from_json(const std::string& text);

std::string benchmark_to_json(const BenchmarkReport& report);
BenchmarkReport benchmark_from_json(const std::string& text);

std::string outlier_experiment_to_json(const OutlierExperimentReport& report);
OutlierExperimentReport outlier_experiment_from_json(const std::string& text);

/// knot_index, lambda, column_index, role, patient_id, feature, coefficient
/// (coefficients on the original g / L scale).
std::string path_to_csv(const GlopPath& path);
/// lambda_g, lambda_l, score, n_failed_folds
std::string score_table_to_csv(const SelectionResult& result);
/// p, kappa, n, method, mean_mse, sd_mse
std::string benchmark_to_csv(const BenchmarkReport& report);

/// Plain-text tables for terminals.
std::string format_outlier_table(const OutlierReport& report);
std::string format_benchmark_table(const BenchmarkReport& report);
std::string format_selection_summary(const SelectionResult& result);

}  // namespace glop
