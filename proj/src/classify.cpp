#include "ratmax/classify.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "ratmax/bisect.hpp"
#include "ratmax/diffcorr.hpp"

namespace ratmax {

namespace {

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    return std::nullopt;
  return v;
}

// Uniform integer in [0, bound) from a 64-bit Mersenne Twister, by
// rejection; std::uniform_int_distribution is implementation-defined.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = 0;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

// First k entries of a seeded Fisher-Yates shuffle, returned sorted.
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(draw_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

} // namespace

double LabelMap::encode(const std::string& label) const {
  if (label == class_a)
    return kClassATarget;
  if (label == class_b)
    return kClassBTarget;
  throw DataError("label '" + label + "' is not in the label map {" + class_a + ", " + class_b +
                  "}");
}

bool label_less(const std::string& a, const std::string& b) {
  const auto na = as_number(a);
  const auto nb = as_number(b);
  if (na && nb && *na != *nb)
    return *na < *nb;
  return a < b;
}

LabelMap infer_label_map(const std::vector<std::string>& labels) {
  std::vector<std::string> distinct;
  for (const auto& l : labels)
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end())
      distinct.push_back(l);
  if (distinct.size() != 2)
    throw DataError("binary classification needs exactly two labels, found " +
                    std::to_string(distinct.size()));
  std::sort(distinct.begin(), distinct.end(), label_less);
  return {distinct[0], distinct[1]};
}

LabeledDataset LabeledDataset::encode(Eigen::MatrixXd features, std::vector<std::string> labels,
                                      LabelMap map, std::string provenance) {
  Eigen::VectorXd targets(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i)
    targets(static_cast<Eigen::Index>(i)) = map.encode(labels[i]);
  return {SampleSet::create(std::move(features), std::move(targets), std::move(labels)),
          std::move(map), std::move(provenance)};
}

LabeledDataset LabeledDataset::from_labels(Eigen::MatrixXd features,
                                           std::vector<std::string> labels,
                                           std::string provenance) {
  LabelMap map = infer_label_map(labels);
  return encode(std::move(features), std::move(labels), std::move(map), std::move(provenance));
}

LabeledDataset LabeledDataset::relabelled(const LabelMap& map) const {
  return encode(samples.inputs, samples.labels, map, provenance);
}

std::size_t LabeledDataset::count(const std::string& label) const {
  return static_cast<std::size_t>(
      std::count(samples.labels.begin(), samples.labels.end(), label));
}

std::int64_t ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

Prediction predict(const RationalActivation& act, const AffineModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double t = model.affine(x);
  const double q = act.b0 + act.b1 * t;
  Prediction p;
  if (std::abs(q) < kPoleTolerance) {
    p.pole = true;
    p.score = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  p.score = (act.a0 + act.a1 * t) / q;
  p.class_index = p.score <= kDecisionThreshold ? 0 : 1;
  return p;
}

std::pair<AffineModel, FitReport> train_classifier(const LabeledDataset& data,
                                                   const RationalActivation& act, Method method,
                                                   const SolverConfig& cfg) {
  data.samples.validate();
  std::set<double> classes(data.samples.targets.begin(), data.samples.targets.end());
  if (classes.size() != 2)
    throw DataError("training set must contain both classes");
  FitReport report = method == Method::Bisection ? train_bisection(act, data.samples, cfg)
                                                 : train_diffcorr(act, data.samples, cfg);
  return {report.as_affine(), std::move(report)};
}

EvalReport evaluate(const RationalActivation& act, const AffineModel& model,
                    const LabeledDataset& test, std::optional<double> outlier_threshold) {
  const auto t0 = std::chrono::steady_clock::now();
  EvalReport rep;
  const auto& s = test.samples;
  for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
    const Prediction p = predict(act, model, s.inputs.row(i).transpose());
    const double y = s.targets(i);
    const std::size_t actual = y == kClassATarget ? 0 : 1;
    if (p.pole) {
      ++rep.pole_samples;
    } else {
      const double residual = std::abs(y - p.score);
      if (outlier_threshold && residual > *outlier_threshold) {
        ++rep.removed_outliers;
        continue;
      }
      rep.test_loss = std::max(rep.test_loss, residual);
    }
    ++rep.confusion.counts[actual][p.class_index];
  }
  rep.evaluated = static_cast<std::size_t>(rep.confusion.total());
  rep.accuracy = rep.confusion.accuracy();
  rep.empty_after_filtering = rep.evaluated == 0;
  rep.test_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SubsampleSpec parse_subsample(const std::string& text, std::uint64_t seed) {
  auto parse_count = [&](const std::string& s) {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
    if (ec != std::errc() || ptr != s.data() + s.size() || k == 0)
      throw ConfigError("invalid subsample count '" + s + "' in '" + text + "'");
    return k;
  };
  if (text.rfind("random:", 0) == 0)
    return RandomK{parse_count(text.substr(7)), seed};
  if (text.rfind("imbalance:", 0) == 0) {
    const std::string rest = text.substr(10);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0)
      throw ConfigError("expected imbalance:CLASS:K, got '" + text + "'");
    return Imbalance{rest.substr(0, colon), parse_count(rest.substr(colon + 1)), seed};
  }
  throw ConfigError("unknown subsample spec '" + text + "' (expected random:K or imbalance:CLASS:K)");
}

std::string describe(const SubsampleSpec& spec) {
  if (const auto* r = std::get_if<RandomK>(&spec))
    return "random:" + std::to_string(r->k) + " seed=" + std::to_string(r->seed);
  const auto& im = std::get<Imbalance>(spec);
  return "imbalance:" + im.keep_class + ":" + std::to_string(im.k_minority) +
         " seed=" + std::to_string(im.seed);
}

LabeledDataset subsample_experiments(const LabeledDataset& data, const SubsampleSpec& spec) {
  const auto& labels = data.samples.labels;
  std::vector<std::size_t> rows;
  if (const auto* r = std::get_if<RandomK>(&spec)) {
    if (r->k > data.size())
      throw DataError("cannot draw " + std::to_string(r->k) + " samples from " +
                      std::to_string(data.size()));
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = i;
    rows = choose(std::move(all), r->k, r->seed);
  } else {
    const auto& im = std::get<Imbalance>(spec);
    if (im.keep_class != data.label_map.class_a && im.keep_class != data.label_map.class_b)
      throw DataError("class '" + im.keep_class + "' is not in the dataset");
    std::vector<std::size_t> other;
    for (std::size_t i = 0; i < labels.size(); ++i)
      (labels[i] == im.keep_class ? rows : other).push_back(i);
    if (im.k_minority > other.size())
      throw DataError("cannot draw " + std::to_string(im.k_minority) +
                      " minority samples from a class of " + std::to_string(other.size()));
    const auto picked = choose(std::move(other), im.k_minority, im.seed);
    rows.insert(rows.end(), picked.begin(), picked.end());
    std::sort(rows.begin(), rows.end());
  }

  LabeledDataset out;
  out.samples = data.samples.subset(rows);
  out.label_map = data.label_map;
  out.provenance = data.provenance.empty() ? describe(spec) : data.provenance + "; " + describe(spec);
  return out;
}

} // namespace ratmax
