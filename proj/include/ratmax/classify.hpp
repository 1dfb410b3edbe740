#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "ratmax/core.hpp"

namespace ratmax {

/// Target encoding of the two classes: class_a -> 0, class_b -> 1.
struct LabelMap {
  std::string class_a;
  std::string class_b;

  double encode(const std::string& label) const;
  const std::string& decode(std::size_t index) const { return index == 0 ? class_a : class_b; }
  bool operator==(const LabelMap&) const = default;
};

inline constexpr double kClassATarget = 0.0;
inline constexpr double kClassBTarget = 1.0;
inline constexpr double kDecisionThreshold = 0.5;

/// Orders labels numerically when both parse as numbers, lexically otherwise.
bool label_less(const std::string& a, const std::string& b);

/// Map from the distinct labels of a training set: the smaller label is
/// class A. Throws DataError unless exactly two labels are present.
LabelMap infer_label_map(const std::vector<std::string>& labels);

struct LabeledDataset {
  SampleSet samples; // targets hold the encoded labels
  LabelMap label_map;
  std::string provenance;

  /// Encodes labels with `map`; throws DataError on a label outside it.
  static LabeledDataset encode(Eigen::MatrixXd features, std::vector<std::string> labels,
                               LabelMap map, std::string provenance = {});

  /// Encodes with the map inferred from the labels themselves.
  static LabeledDataset from_labels(Eigen::MatrixXd features, std::vector<std::string> labels,
                                    std::string provenance = {});

  /// Same features, re-encoded under another map (e.g. a trained model's).
  LabeledDataset relabelled(const LabelMap& map) const;

  std::size_t size() const { return samples.size(); }
  std::size_t count(const std::string& label) const;
};

/// rows = actual class, columns = predicted class (index 0 = class A).
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 2>, 2> counts{};

  std::int64_t total() const;
  std::int64_t correct() const { return counts[0][0] + counts[1][1]; }
  double accuracy() const;
};

struct EvalReport {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  double test_loss = 0.0;
  std::size_t evaluated = 0;
  std::size_t removed_outliers = 0;
  std::size_t pole_samples = 0;
  bool empty_after_filtering = false;
  double train_wall_seconds = 0.0;
  double test_wall_seconds = 0.0;
};

struct Prediction {
  std::size_t class_index = 0; // 0 = class A
  double score = 0.0;
  bool pole = false;
};

/// Scores s = R(W x + b) on the raw ratio (no positivity requirement) and
/// picks class A when s <= 0.5. A pole is assigned class A and flagged.
Prediction predict(const RationalActivation& act, const AffineModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x);

/// Throws DataError on a single-class training set.
std::pair<AffineModel, FitReport> train_classifier(const LabeledDataset& data,
                                                   const RationalActivation& act, Method method,
                                                   const SolverConfig& cfg);

/// With a threshold, samples whose |y_i - s_i| exceeds it are dropped
/// before computing accuracy, confusion and loss.
EvalReport evaluate(const RationalActivation& act, const AffineModel& model,
                    const LabeledDataset& test, std::optional<double> outlier_threshold = {});

struct RandomK {
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

/// Keep every sample of `keep_class`, plus `k_minority` random samples of the other.
struct Imbalance {
  std::string keep_class;
  std::size_t k_minority = 0;
  std::uint64_t seed = 0;
};

using SubsampleSpec = std::variant<RandomK, Imbalance>;

/// Parses "random:K" or "imbalance:CLASS:K".
SubsampleSpec parse_subsample(const std::string& text, std::uint64_t seed);
std::string describe(const SubsampleSpec& spec);

/// Seeded, platform-independent subset; original row order is preserved.
LabeledDataset subsample_experiments(const LabeledDataset& data, const SubsampleSpec& spec);

} // namespace ratmax
