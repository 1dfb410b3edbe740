#include "ratmax/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ratmax {

using nlohmann::json;

Delimiter parse_delimiter(std::string_view name) {
  if (name == "auto")
    return Delimiter::Auto;
  if (name == "tab")
    return Delimiter::Tab;
  if (name == "comma")
    return Delimiter::Comma;
  if (name == "whitespace" || name == "space")
    return Delimiter::Whitespace;
  throw ConfigError("unknown delimiter '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, Delimiter d) {
  std::vector<std::string_view> out;
  if (d == Delimiter::Whitespace) {
    std::size_t k = 0;
    while (k < line.size()) {
      k = line.find_first_not_of(" \t", k);
      if (k == std::string_view::npos)
        break;
      auto end = line.find_first_of(" \t", k);
      if (end == std::string_view::npos)
        end = line.size();
      out.push_back(line.substr(k, end - k));
      k = end;
    }
    return out;
  }
  const char sep = d == Delimiter::Tab ? '\t' : ',';
  std::size_t start = 0;
  for (;;) {
    const auto end = line.find(sep, start);
    out.push_back(trim(line.substr(start, end == std::string_view::npos ? end : end - start)));
    if (end == std::string_view::npos)
      break;
    start = end + 1;
  }
  return out;
}

Delimiter detect(std::string_view line) {
  if (line.find('\t') != std::string_view::npos)
    return Delimiter::Tab;
  if (line.find(',') != std::string_view::npos)
    return Delimiter::Comma;
  return Delimiter::Whitespace;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

std::string canonical_label(std::string_view raw) {
  const auto v = parse_double(raw);
  if (v && std::isfinite(*v) && std::trunc(*v) == *v && std::abs(*v) < 1e15) {
    const auto i = static_cast<long long>(*v);
    return std::to_string(i);
  }
  return std::string(raw);
}

} // namespace

LabeledDataset load_ucr(const std::filesystem::path& path, const UcrLoadOptions& opts) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open dataset file " + path.string());

  Delimiter delim = opts.delimiter;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view content = trim(line);
    if (content.empty())
      continue;
    if (delim == Delimiter::Auto)
      delim = detect(content);
    const auto fields = split(content, delim);
    if (fields.size() < 2)
      throw ParseError("row needs a label and at least one feature", lineno, 1);
    if (fields[0].empty())
      throw ParseError("empty class label", lineno, 1);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto v = parse_double(fields[k]);
      if (!v)
        throw ParseError("cannot parse '" + std::string(fields[k]) + "' as a number", lineno, k + 1);
      values.push_back(*v);
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw DataError("row " + std::to_string(lineno) + " has " + std::to_string(values.size()) +
                      " features, expected " + std::to_string(rows.front().size()));
    labels.push_back(canonical_label(fields[0]));
    rows.push_back(std::move(values));
  }
  if (rows.empty())
    throw DataError("dataset file " + path.string() + " holds no rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto dim = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  std::string provenance = path.filename().string();
  if (opts.z_normalise) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mean = x.row(i).mean();
      const double var = (x.row(i).array() - mean).square().sum() / static_cast<double>(dim);
      const double sd = std::sqrt(var);
      x.row(i).array() -= mean;
      if (sd > 0.0)
        x.row(i) /= sd;
    }
    provenance += " (z-normalised)";
  }

  std::vector<std::string> distinct;
  for (const auto& l : labels)
    if (std::find(distinct.begin(), distinct.end(), l) == distinct.end())
      distinct.push_back(l);
  if (distinct.size() > 2)
    throw DataError("dataset has " + std::to_string(distinct.size()) +
                    " classes; only binary problems are supported");
  if (distinct.size() == 1)
    return LabeledDataset::encode(std::move(x), std::move(labels), {distinct[0], {}},
                                  std::move(provenance));
  return LabeledDataset::from_labels(std::move(x), std::move(labels), std::move(provenance));
}

json model_to_json(const ModelFile& m) {
  json j;
  j["version"] = kModelSchemaVersion;
  j["activation"] = {{"a0", m.activation.a0},
                     {"a1", m.activation.a1},
                     {"b0", m.activation.b0},
                     {"b1", m.activation.b1}};
  j["weights"] = std::vector<double>(m.model.weights.data(),
                                     m.model.weights.data() + m.model.weights.size());
  j["bias"] = m.model.bias;
  if (m.meta.label_map)
    j["label_map"] = {{"class_a", m.meta.label_map->class_a},
                      {"class_b", m.meta.label_map->class_b}};
  else
    j["label_map"] = nullptr;
  j["trainer"] = {{"method", m.meta.trainer.method},
                  {"eps", m.meta.trainer.eps},
                  {"delta", m.meta.trainer.delta},
                  {"seed", m.meta.trainer.seed ? json(*m.meta.trainer.seed) : json(nullptr)}};
  j["deviation"] = m.meta.deviation;
  j["info"] = m.meta.info;
  return j;
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string("model file is missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number())
    throw SchemaError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string())
    throw SchemaError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

} // namespace

ModelFile model_from_json(const json& j) {
  if (!j.is_object())
    throw SchemaError("model file must hold a JSON object");
  const json& version = field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion)
    throw SchemaError("unsupported model schema version " + version.dump());

  ModelFile m;
  const json& act = field(j, "activation");
  m.activation = {number(act, "a0"), number(act, "a1"), number(act, "b0"), number(act, "b1")};

  const json& w = field(j, "weights");
  if (!w.is_array())
    throw SchemaError("field 'weights' must be an array");
  m.model.weights.resize(static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!w[k].is_number())
      throw SchemaError("weights must be numbers");
    m.model.weights(static_cast<Eigen::Index>(k)) = w[k].get<double>();
  }
  m.model.bias = number(j, "bias");

  const json& lm = field(j, "label_map");
  if (!lm.is_null())
    m.meta.label_map = LabelMap{text(lm, "class_a"), text(lm, "class_b")};

  const json& tr = field(j, "trainer");
  m.meta.trainer.method = text(tr, "method");
  m.meta.trainer.eps = number(tr, "eps");
  m.meta.trainer.delta = number(tr, "delta");
  const json& seed = field(tr, "seed");
  if (seed.is_number_unsigned())
    m.meta.trainer.seed = seed.get<std::uint64_t>();
  else if (!seed.is_null())
    throw SchemaError("field 'seed' must be an unsigned integer or null");

  m.meta.deviation = number(j, "deviation");
  if (j.contains("info"))
    m.meta.info = j.at("info");
  return m;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out)
    throw Error("failed writing " + path.string());
}

void save_model(const std::filesystem::path& path, const ModelFile& m) {
  write_json(path, model_to_json(m));
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SchemaError("cannot open model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

json eval_report_to_json(const EvalReport& r, const LabelMap& map, bool with_timing) {
  json j;
  j["accuracy"] = r.accuracy;
  j["confusion"] = {{"rows", "actual"},
                    {"columns", "predicted"},
                    {"labels", {map.class_a, map.class_b}},
                    {"counts",
                     {{r.confusion.counts[0][0], r.confusion.counts[0][1]},
                      {r.confusion.counts[1][0], r.confusion.counts[1][1]}}}};
  j["test_loss"] = r.test_loss;
  j["evaluated"] = r.evaluated;
  j["removed_outliers"] = r.removed_outliers;
  j["pole_samples"] = r.pole_samples;
  j["empty_after_filtering"] = r.empty_after_filtering;
  if (with_timing)
    j["timing"] = {{"train_seconds", r.train_wall_seconds}, {"test_seconds", r.test_wall_seconds}};
  return j;
}

} // namespace ratmax
