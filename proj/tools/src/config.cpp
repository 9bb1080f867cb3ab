#include <fstream>
#include <sstream>

#include "config.hpp"
#include "posh/common.hpp"
#include "posh/parallel.hpp"

namespace posh::cli {
namespace {

using nlohmann::json;

bool type_matches(const json& value, const std::string& type) {
  if (type == "string") return value.is_string();
  if (type == "uint") return value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
  if (type == "number") return value.is_number();
  if (type == "bool") return value.is_boolean();
  return false;
}

void check(const json& doc, const json& schema, const std::string& prefix) {
  if (!doc.is_object()) throw ConfigError("'" + prefix + "' must be an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!schema.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    const json& rule = schema.at(key);
    if (rule.is_object()) {
      check(value, rule, path);
    } else if (!type_matches(value, rule.get<std::string>())) {
      throw ConfigError("config key '" + path + "' must be of type " + rule.get<std::string>());
    }
  }
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::vector<std::int64_t> labels_from_ivecs(const std::string& path, std::size_t expected) {
  const auto rows = load_ivecs(path);
  if (rows.size() != expected) {
    throw ParseError("labels " + path + ": " + std::to_string(rows.size()) + " records for " +
                         std::to_string(expected) + " vectors",
                     0);
  }
  std::vector<std::int64_t> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 1) throw ParseError("labels " + path + ": records must have dim 1", 0);
    out.push_back(r[0]);
  }
  return out;
}

Dataset load_with_labels(const DatasetSpec& ds, const std::string& path,
                         const std::string& labels) {
  Dataset data;
  if (ds.source == "fvecs") {
    data = load_fvecs(path);
  } else if (ds.source == "csv") {
    data = load_csv(path, ds.label_column.empty() ? std::nullopt
                                                    : std::optional<std::string>(ds.label_column));
  } else {
    data = load_raw_f32(path, ds.dim);
  }
  if (!labels.empty()) data.labels = labels_from_ivecs(labels, data.size());
  if (!ds.name.empty()) data.name = ds.name;
  return data;
}

}  // namespace

const json& config_schema() {
  static const json schema = json::parse(R"({
    "dataset": {
      "source": "string", "name": "string", "path": "string", "labels": "string",
      "query_path": "string", "query_labels": "string", "label_column": "string",
      "dim": "uint", "queries": "uint",
      "classes": "uint", "per_class": "uint", "d": "uint",
      "separation": "number", "noise": "number", "seed": "uint"
    },
    "method": "string",
    "D": "uint",
    "alpha": "uint",
    "train": {
      "epochs": "uint", "mini_batch": "uint", "full_batch": "bool", "train_size": "uint",
      "p": "number", "lr0": "number", "bosl_rounds": "uint", "itq_iterations": "uint",
      "knnh_k": "uint"
    },
    "refinement": {"mode": "string", "oversample": "number", "sbiht_iterations": "uint"},
    "coarse": {"nprobe": "uint"},
    "eval": {
      "metric": "string", "n": "uint", "relevance": "string", "relevance_k": "uint",
      "distance": "string", "trials": "uint"
    },
    "seed": "uint",
    "split_seed": "uint",
    "threads": "uint"
  })");
  return schema;
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' is not of the form key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
      if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
}

RunConfig parse_config(const json& doc) {
  check(doc, config_schema(), "");
  RunConfig rc;
  DatasetSpec& ds = rc.dataset;
  ExperimentConfig& ex = rc.experiment;
  ex.threads = default_thread_count();

  if (doc.contains("dataset")) {
    const json& d = doc.at("dataset");
    take(d, "source", ds.source);
    take(d, "name", ds.name);
    take(d, "path", ds.path);
    take(d, "labels", ds.labels);
    take(d, "query_path", ds.query_path);
    take(d, "query_labels", ds.query_labels);
    take(d, "label_column", ds.label_column);
    take(d, "dim", ds.dim);
    take(d, "queries", ds.queries);
    take(d, "classes", ds.classes);
    take(d, "per_class", ds.per_class);
    take(d, "d", ds.d);
    take(d, "separation", ds.separation);
    take(d, "noise", ds.noise);
    take(d, "seed", ds.seed);
  }
  if (ds.source != "synthetic" && ds.source != "fvecs" && ds.source != "csv" &&
      ds.source != "raw") {
    throw ConfigError("dataset.source must be synthetic, fvecs, csv or raw, not '" + ds.source +
                      "'");
  }
  if (ds.source != "synthetic" && ds.path.empty()) {
    throw ConfigError("dataset.path is required for source '" + ds.source + "'");
  }
  if (ds.source == "raw" && ds.dim == 0) throw ConfigError("dataset.dim is required for raw input");
  if (ds.source == "synthetic" && ds.classes < 1) {
    throw ConfigError("dataset.classes must be at least 1");
  }

  take(doc, "method", ex.method);
  take(doc, "D", ex.code_length);
  take(doc, "alpha", ex.alpha);
  if (doc.contains("train")) {
    const json& t = doc.at("train");
    take(t, "epochs", ex.train.epochs);
    take(t, "mini_batch", ex.train.mini_batch);
    take(t, "full_batch", ex.train.full_batch);
    take(t, "train_size", ex.train_size);
    take(t, "p", ex.fruitfly_p);
    take(t, "lr0", ex.biohash_lr0);
    take(t, "bosl_rounds", ex.bosl_rounds);
    take(t, "itq_iterations", ex.itq_iterations);
    take(t, "knnh_k", ex.knnh_k);
  }
  if (doc.contains("refinement")) {
    const json& r = doc.at("refinement");
    std::string mode = "off";
    take(r, "mode", mode);
    if (mode == "off") {
      ex.refinement = Refinement::kOff;
    } else if (mode == "linear") {
      ex.refinement = Refinement::kLinear;
    } else if (mode == "sbiht") {
      ex.refinement = Refinement::kSbiht;
    } else {
      throw ConfigError("refinement.mode must be off, linear or sbiht, not '" + mode + "'");
    }
    take(r, "oversample", ex.oversample);
    take(r, "sbiht_iterations", ex.sbiht_iterations);
  }
  if (doc.contains("coarse")) take(doc.at("coarse"), "nprobe", ex.nprobe);
  if (doc.contains("eval")) {
    const json& e = doc.at("eval");
    take(e, "metric", ex.metric);
    take(e, "n", ex.cutoff);
    take(e, "relevance_k", ex.relevance_k);
    take(e, "trials", ex.trials);
    std::string relevance = "label";
    take(e, "relevance", relevance);
    if (relevance == "label") {
      ex.relevance = RelevanceMode::kLabel;
    } else if (relevance == "metric") {
      ex.relevance = RelevanceMode::kMetric;
    } else {
      throw ConfigError("eval.relevance must be label or metric, not '" + relevance + "'");
    }
    std::string distance = "euclidean";
    take(e, "distance", distance);
    const auto parsed = parse_distance(distance);
    if (!parsed) throw ConfigError("eval.distance must be euclidean or cosine");
    ex.relevance_distance = *parsed;
  }
  take(doc, "seed", ex.seed);
  take(doc, "split_seed", ex.split_seed);
  take(doc, "threads", ex.threads);
  if (ex.threads == 0) ex.threads = default_thread_count();

  try {
    validate(ex);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

ExperimentData load_experiment_data(const DatasetSpec& ds, std::uint64_t split_seed) {
  Dataset pool;
  if (ds.source == "synthetic") {
    pool = synth_gaussian_mixture(ds.classes, ds.per_class, ds.d, ds.separation,
                                  ds.noise, ds.seed);
    if (!ds.name.empty()) pool.name = ds.name;
  } else {
    pool = load_with_labels(ds, ds.path, ds.labels);
  }
  ExperimentData data;
  if (!ds.query_path.empty()) {
    data.targets = std::move(pool);
    data.queries = load_with_labels(ds, ds.query_path, ds.query_labels);
    return data;
  }
  const Split split = make_split(pool.size(), 0, split_seed, ds.queries);
  data.targets = subset(pool, split.target);
  data.queries = subset(pool, split.query);
  return data;
}

Dataset load_any(const std::string& path, std::size_t dim, const std::string& label_column) {
  DatasetSpec ds;
  const std::string ext = std::filesystem::path(path).extension().string();
  ds.source = ext == ".fvecs" ? "fvecs" : ext == ".csv" ? "csv" : "raw";
  ds.dim = dim;
  ds.label_column = label_column;
  if (ds.source == "raw" && dim == 0) {
    throw ConfigError("--dim is required for raw f32 input " + path);
  }
  return load_with_labels(ds, path, "");
}

}  // namespace posh::cli
