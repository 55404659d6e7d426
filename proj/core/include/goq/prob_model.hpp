#pragma once

#include "goq/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace goq {

class Rng;

/// Input-parameter model: an analytic density with a sampler, or a finite
/// dataset (data-based mode).
class SourceModel {
 public:
  enum class Kind { analytic, empirical };

  using PdfFn = std::function<double(const Vec&)>;
  using DrawFn = std::function<void(Rng&, Eigen::Ref<Vec>)>;

  static SourceModel analytic(std::string id, nlohmann::json params, Box support, PdfFn pdf, DrawFn draw);
  /// Dataset given column-wise (p x n). Support defaults to the bounding box.
  static SourceModel empirical(std::string id, Mat data, nlohmann::json params = nlohmann::json::object());
  static SourceModel empirical(std::string id, Mat data, Box support, nlohmann::json params);

  Kind kind() const { return kind_; }
  bool is_empirical() const { return kind_ == Kind::empirical; }
  const std::string& id() const { return id_; }
  const nlohmann::json& params() const { return params_; }
  int param_dim() const { return support_.dim(); }
  const Box& support() const { return support_; }

  /// Density on the support (zero outside). Analytic sources only.
  double pdf(const Vec& g) const;
  /// n i.i.d. draws as columns of a p x n matrix. Deterministic in seed.
  /// Empirical sources resample the dataset uniformly with replacement.
  Mat sample(std::size_t n, std::uint64_t seed) const;
  /// The dataset (empirical sources only).
  const Mat& data() const;
  std::size_t size() const { return static_cast<std::size_t>(data_.cols()); }

  nlohmann::json to_json() const;

 private:
  Kind kind_ = Kind::analytic;
  std::string id_;
  nlohmann::json params_;
  Box support_;
  PdfFn pdf_;
  DrawFn draw_;
  Mat data_;
};

SourceModel builtin_source(const std::string& name, const nlohmann::json& params = nlohmann::json::object());
std::vector<std::string> builtin_source_ids();

/// Integral of the pdf over the support (quadrature for p <= 2, Monte Carlo
/// otherwise).
double pdf_mass(const SourceModel& source);

struct CsvReadOptions {
  bool lenient = false;
  /// Expected column count; 0 accepts the width of the first data row.
  int columns = 0;
};

struct CsvIssue {
  std::size_t line = 0;
  std::string message;
};

struct CsvDataset {
  Mat data;  // p x n
  std::vector<std::string> header;
  std::vector<CsvIssue> skipped;
};

/// One row per point, numeric columns, optional header row. Bad rows raise
/// ConfigError naming the line unless `lenient` is set, in which case they
/// are skipped and listed.
CsvDataset read_csv_dataset(const std::string& path, const CsvReadOptions& opt = {});
CsvDataset parse_csv_dataset(const std::string& text, const CsvReadOptions& opt = {});

}  // namespace goq
