/*
 * Copyright 2026 The FOLTR Poisoning Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "foltr/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "foltr/letor.h"

namespace foltr {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Walks one JSON object, converting known keys and reporting type errors and
// unknown keys into a shared problem list.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where,
               std::vector<std::string>& problems)
      : obj_(obj), where_(std::move(where)), problems_(problems) {
    if (!obj_.is_object()) problem("", "expected an object");
  }

  const json* find(const std::string& key) {
    if (!obj_.is_object()) return nullptr;
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.push_back(key);
    return &*it;
  }

  void get(const std::string& key, std::size_t& out) {
    static_assert(std::is_same_v<std::size_t, std::uint64_t>);
    if (const json* v = find(key)) {
      if (v->is_number_unsigned() ||
          (v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
        out = v->get<std::size_t>();
      } else {
        problem(key, "expected a non-negative integer");
      }
    }
  }

  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        problem(key, "expected an integer");
      }
    }
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        problem(key, "expected a number");
      }
    }
  }

  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        problem(key, "expected true or false");
      }
    }
  }

  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        problem(key, "expected a string");
      }
    }
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    if (obj_.is_object() && obj_.contains(key)) {
      T value{};
      const std::size_t before = problems_.size();
      get(key, value);
      if (problems_.size() == before) out = value;
    }
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) {
        problem(key, "expected an array of numbers");
        return;
      }
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) {
          problem(key, "expected an array of numbers");
          return;
        }
        out.push_back(x.get<double>());
      }
    }
  }

  // Parses an enum-like string with `parse`, recording its error message.
  template <typename T, typename Parse>
  void get_enum(const std::string& key, T& out, Parse parse) {
    std::string name;
    const std::size_t before = problems_.size();
    get(key, name);
    if (problems_.size() != before || name.empty()) return;
    try {
      out = parse(name);
    } catch (const Error& e) {
      problem(key, e.what());
    }
  }

  void problem(const std::string& key, const std::string& what) {
    problems_.push_back(path(key) + ": " + what);
  }

  std::string path(const std::string& key) const {
    if (key.empty()) return where_;
    return where_.empty() ? key : where_ + "." + key;
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        problems_.push_back(path(key) + ": unknown key");
      }
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& problems_;
  std::vector<std::string> seen_;
};

std::string resolve_path(const std::string& p,
                         const std::filesystem::path& base_dir) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return path.lexically_normal().string();
}

void parse_dataset(const json& node, const std::filesystem::path& base_dir,
                   DatasetSource& src, std::vector<std::string>& problems) {
  ObjectReader r(node, "dataset", problems);
  r.get("name", src.name);
  std::string s;
  if (r.find("train")) {
    r.get("train", s);
    src.train = resolve_path(s, base_dir);
  }
  if (r.find("test")) {
    r.get("test", s);
    src.test = resolve_path(s, base_dir);
  }
  if (r.find("path")) {
    r.get("path", s);
    src.path = resolve_path(s, base_dir);
  }
  if (const json* folds = r.find("folds")) {
    if (!folds->is_array()) {
      r.problem("folds", "expected an array of {train, test} objects");
    } else {
      for (std::size_t i = 0; i < folds->size(); ++i) {
        ObjectReader fr((*folds)[i], "dataset.folds[" + std::to_string(i) + "]",
                        problems);
        FoldPaths fold;
        fr.get("train", fold.train);
        fr.get("test", fold.test);
        fr.finish();
        if (fold.train.empty() || fold.test.empty()) {
          fr.problem("", "each fold needs train and test");
        }
        src.folds.push_back({resolve_path(fold.train, base_dir),
                             resolve_path(fold.test, base_dir)});
      }
    }
  }
  if (const json* syn = r.find("synthetic")) {
    ObjectReader sr(*syn, "dataset.synthetic", problems);
    SyntheticSpec spec;
    sr.get("queries", spec.queries);
    sr.get("docs_per_query", spec.docs_per_query);
    sr.get("features", spec.features);
    sr.get("grade_levels", spec.grade_levels);
    sr.get("seed", spec.seed);
    sr.finish();
    src.synthetic = spec;
  }
  r.get("test_fraction", src.test_fraction);
  r.get("split_seed", src.split_seed);
  r.get("normalize", src.normalize);
  r.get("grade_levels", src.grade_levels);
  r.finish();
}

ExperimentConfig parse_one(const json& node, const std::filesystem::path& base_dir,
                           std::vector<std::string>& problems) {
  ExperimentConfig cfg;
  ObjectReader r(node, "", problems);

  if (const json* ds = r.find("dataset")) {
    parse_dataset(*ds, base_dir, cfg.data, problems);
  } else {
    problems.push_back("dataset: required key missing");
  }

  if (const json* model = r.find("model")) {
    if (model->is_string()) {
      r.get_enum("model", cfg.model_kind, parse_model_kind);
    } else {
      ObjectReader mr(*model, "model", problems);
      mr.get_enum("kind", cfg.model_kind, parse_model_kind);
      mr.get("hidden_dim", cfg.hidden_dim);
      std::string activation = "relu";
      mr.get("activation", activation);
      if (activation != "relu") {
        problems.push_back("model.activation: only relu is supported");
      }
      mr.finish();
    }
  }

  if (const json* cm = r.find("click_model")) {
    if (cm->is_string()) {
      cfg.click_model = cm->get<std::string>();
    } else {
      ObjectReader cr(*cm, "click_model", problems);
      ClickModel custom;
      cr.get("name", custom.name);
      cr.get("p_click", custom.p_click);
      cr.get("p_stop", custom.p_stop);
      cr.finish();
      if (custom.name.empty()) custom.name = "custom";
      cfg.click_model = custom.name;
      cfg.custom_click_model = std::move(custom);
    }
  }

  r.get("n", cfg.n);
  r.get("m", cfg.m);
  r.get_enum("attack", cfg.attack, parse_attack_kind);
  r.get_enum("knowledge", cfg.knowledge, parse_knowledge);

  if (const json* agg = r.find("aggregator")) {
    if (agg->is_string()) {
      r.get_enum("aggregator", cfg.defense, parse_aggregation_rule);
    } else {
      ObjectReader ar(*agg, "aggregator", problems);
      ar.get_enum("rule", cfg.defense, parse_aggregation_rule);
      ar.get("m", cfg.defense_m);
      ar.get("f", cfg.f);
      ar.get("beta", cfg.beta);
      ar.finish();
    }
  }

  r.get("eta", cfg.eta);
  r.get("n_queries", cfg.n_queries);
  r.get("k", cfg.k);
  r.get("serp_length", cfg.serp_length);
  r.get("rounds", cfg.rounds);
  r.get("eval_interval", cfg.eval_interval);
  r.get("repeats", cfg.repeats);
  r.get("summary_window", cfg.summary_window);
  r.get("seed", cfg.seed);
  r.get("output", cfg.output_dir);
  r.get_enum("partition", cfg.partition, parse_query_partition);
  r.get("trace", cfg.trace);

  if (const json* fang = r.find("fang")) {
    ObjectReader fr(*fang, "fang", problems);
    fr.get("b", cfg.fang_trim.b);
    fr.get("jitter_scale", cfg.fang_krum.jitter_scale);
    fr.get("initial_lambda", cfg.fang_krum.initial_lambda);
    fr.get("min_lambda", cfg.fang_krum.min_lambda);
    fr.get("max_iterations", cfg.fang_krum.max_iterations);
    fr.finish();
  }
  r.finish();
  return cfg;
}

// Grid axes in expansion order (outermost first).
constexpr const char* kGridAxes[] = {"click_model", "attack", "knowledge",
                                     "aggregator", "m", "model"};

std::vector<json> expand_grid(const json& doc, std::vector<std::string>& problems) {
  if (!doc.is_object() || !doc.contains("grid")) return {doc};
  const json& grid = doc.at("grid");
  json base = doc;
  base.erase("grid");
  if (!grid.is_object()) {
    problems.push_back("grid: expected an object of axis -> list");
    return {base};
  }
  for (const auto& [key, values] : grid.items()) {
    if (std::find_if(std::begin(kGridAxes), std::end(kGridAxes),
                     [&](const char* a) { return key == a; }) == std::end(kGridAxes)) {
      problems.push_back("grid." + key + ": unknown grid axis");
    } else if (!values.is_array() || values.empty()) {
      problems.push_back("grid." + key + ": expected a non-empty list");
    }
  }
  std::vector<json> cells{base};
  for (const char* axis : kGridAxes) {
    if (!grid.contains(axis) || !grid.at(axis).is_array()) continue;
    std::vector<json> next;
    for (const auto& cell : cells) {
      for (const auto& value : grid.at(axis)) {
        json c = cell;
        c[axis] = value;
        next.push_back(std::move(c));
      }
    }
    if (!next.empty()) cells = std::move(next);
  }
  return cells;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid experiment config:\n  " + join(problems, "\n  ")),
      problems_(std::move(problems)) {}

AggregatorSpec ExperimentConfig::aggregator() const {
  return AggregatorSpec{defense, defense_m.value_or(m), f, beta};
}

ThreatModel ExperimentConfig::threat() const {
  return ThreatModel{n, m, knowledge, attack};
}

std::string ExperimentConfig::click_model_name() const {
  return custom_click_model ? custom_click_model->name : click_model;
}

std::string ExperimentConfig::label() const {
  std::string out = data.name + "/" + click_model_name() + "/" +
                    std::string(to_string(attack));
  if (is_model_poisoning(attack)) out += "(" + std::string(to_string(knowledge)) + ")";
  out += "/" + std::string(to_string(defense)) + "/m=" + std::to_string(m);
  return out;
}

json ExperimentConfig::to_json() const {
  json ds = {{"name", data.name},
             {"test_fraction", data.test_fraction},
             {"split_seed", data.split_seed},
             {"normalize", data.normalize}};
  if (data.train) ds["train"] = *data.train;
  if (data.test) ds["test"] = *data.test;
  if (data.path) ds["path"] = *data.path;
  if (!data.folds.empty()) {
    ds["folds"] = json::array();
    for (const auto& f : data.folds) {
      ds["folds"].push_back({{"train", f.train}, {"test", f.test}});
    }
  }
  if (data.synthetic) {
    const auto& s = *data.synthetic;
    ds["synthetic"] = {{"queries", s.queries},
                       {"docs_per_query", s.docs_per_query},
                       {"features", s.features},
                       {"grade_levels", s.grade_levels},
                       {"seed", s.seed}};
  }
  if (data.grade_levels) ds["grade_levels"] = *data.grade_levels;

  json agg = {{"rule", std::string(to_string(defense))},
              {"m", aggregator().m}};
  if (f) agg["f"] = *f;
  if (beta) agg["beta"] = *beta;

  json click = click_model;
  if (custom_click_model) {
    click = {{"name", custom_click_model->name},
             {"p_click", custom_click_model->p_click},
             {"p_stop", custom_click_model->p_stop}};
  }

  json fang = {{"b", fang_trim.b},
               {"jitter_scale", fang_krum.jitter_scale},
               {"min_lambda", fang_krum.min_lambda},
               {"max_iterations", fang_krum.max_iterations}};
  if (fang_krum.initial_lambda) fang["initial_lambda"] = *fang_krum.initial_lambda;

  return {{"dataset", ds},
          {"model",
           {{"kind", std::string(to_string(model_kind))},
            {"hidden_dim", hidden_dim},
            {"activation", "relu"}}},
          {"click_model", click},
          {"n", n},
          {"m", m},
          {"attack", std::string(to_string(attack))},
          {"knowledge", std::string(to_string(knowledge))},
          {"aggregator", agg},
          {"eta", eta},
          {"n_queries", n_queries},
          {"k", k},
          {"serp_length", serp_length},
          {"rounds", rounds},
          {"eval_interval", eval_interval},
          {"repeats", repeats},
          {"summary_window", summary_window},
          {"seed", seed},
          {"output", output_dir},
          {"partition", std::string(to_string(partition))},
          {"trace", trace},
          {"fang", fang}};
}

std::string ExperimentConfig::fingerprint() const {
  json j = to_json();
  j.erase("output");
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::vector<std::string> validate_config(const ExperimentConfig& c,
                                         std::vector<std::string>* warnings) {
  std::vector<std::string> problems;
  const auto& d = c.data;
  const int sources = (d.train || d.test ? 1 : 0) + (d.path ? 1 : 0) +
                      (d.folds.empty() ? 0 : 1) + (d.synthetic ? 1 : 0);
  if (sources != 1) {
    problems.push_back(
        "dataset: give exactly one of train+test, path, folds or synthetic");
  }
  if ((d.train.has_value()) != (d.test.has_value())) {
    problems.push_back("dataset: train and test must be given together");
  }
  auto check_file = [&](const std::string& p) {
    if (!std::filesystem::exists(p)) {
      problems.push_back("dataset: file not found: " + p);
    }
  };
  if (d.train) check_file(*d.train);
  if (d.test) check_file(*d.test);
  if (d.path) check_file(*d.path);
  for (const auto& f : d.folds) {
    check_file(f.train);
    check_file(f.test);
  }
  if (d.path && !(d.test_fraction > 0.0 && d.test_fraction < 1.0)) {
    problems.push_back("dataset.test_fraction must lie in (0, 1)");
  }
  if (d.grade_levels && *d.grade_levels != 3 && *d.grade_levels != 5) {
    problems.push_back("dataset.grade_levels must be 3 or 5");
  }
  if (d.synthetic) {
    const auto& s = *d.synthetic;
    if (s.queries < 2 || s.docs_per_query == 0 || s.features == 0) {
      problems.push_back(
          "dataset.synthetic: need >= 2 queries and positive sizes");
    }
    if (s.grade_levels != 3 && s.grade_levels != 5) {
      problems.push_back("dataset.synthetic.grade_levels must be 3 or 5");
    }
  }

  if (c.model_kind == ModelKind::kNeural && c.hidden_dim == 0) {
    problems.push_back("model.hidden_dim must be positive");
  }
  if (c.custom_click_model) {
    try {
      c.custom_click_model->validate();
    } catch (const Error& e) {
      problems.push_back(std::string("click_model: ") + e.what());
    }
  } else if (c.click_model != "perfect" && c.click_model != "navigational" &&
             c.click_model != "informational" && c.click_model != "poison") {
    problems.push_back("click_model: unknown model '" + c.click_model + "'");
  }

  if (c.n == 0) problems.push_back("n must be positive");
  if (2 * c.m >= c.n) {
    problems.push_back("m must be less than n / 2 (n = " + std::to_string(c.n) +
                       ", m = " + std::to_string(c.m) + ")");
  }
  try {
    c.aggregator().validate(c.n);
  } catch (const Error& e) {
    problems.push_back(std::string("aggregator: ") + e.what());
  }
  if (!(c.eta > 0.0)) problems.push_back("eta must be positive");
  if (c.n_queries == 0) problems.push_back("n_queries must be at least 1");
  if (c.k == 0) problems.push_back("k must be at least 1");
  if (c.serp_length == 0) problems.push_back("serp_length must be at least 1");
  if (c.eval_interval == 0) problems.push_back("eval_interval must be positive");
  if (c.repeats == 0) problems.push_back("repeats must be at least 1");
  if (c.summary_window == 0) problems.push_back("summary_window must be at least 1");
  if (!(c.fang_trim.b > 1.0)) problems.push_back("fang.b must exceed 1");
  if (c.fang_krum.max_iterations <= 0) {
    problems.push_back("fang.max_iterations must be positive");
  }
  if (c.attack == AttackKind::kLie && c.m > 0) {
    try {
      lie_z(c.n, c.m);
    } catch (const Error& e) {
      problems.push_back(std::string("attack: ") + e.what());
    }
  }

  if (warnings) {
    const bool krum_family = c.defense == AggregationRule::kKrum ||
                             c.defense == AggregationRule::kMultiKrum;
    const bool trim_family = c.defense == AggregationRule::kTrimmedMean ||
                             c.defense == AggregationRule::kMedian;
    if (c.attack == AttackKind::kFangKrum && !krum_family) {
      warnings->push_back(c.label() +
                          ": fang_krum is tailored to Krum/Multi-Krum but the "
                          "server uses " + std::string(to_string(c.defense)));
    }
    if (c.attack == AttackKind::kFangTrimmedMean && !trim_family) {
      warnings->push_back(c.label() +
                          ": fang_trmean is tailored to Trimmed Mean/Median but "
                          "the server uses " + std::string(to_string(c.defense)));
    }
    if (c.attack != AttackKind::kNone && c.m == 0) {
      warnings->push_back(c.label() + ": attack has no effect with m = 0");
    }
  }
  return problems;
}

LoadedConfigs parse_config(const json& doc, const std::filesystem::path& base_dir) {
  std::vector<std::string> problems;
  std::vector<json> docs;
  if (doc.is_array()) {
    for (const auto& d : doc) docs.push_back(d);
  } else {
    docs.push_back(doc);
  }

  LoadedConfigs loaded;
  for (const auto& d : docs) {
    for (const auto& cell : expand_grid(d, problems)) {
      const std::size_t before = problems.size();
      ExperimentConfig cfg = parse_one(cell, base_dir, problems);
      if (problems.size() == before) {
        auto errs = validate_config(cfg, &loaded.warnings);
        for (auto& e : errs) problems.push_back(cfg.label() + ": " + e);
      }
      loaded.configs.push_back(std::move(cfg));
    }
  }
  if (!problems.empty()) {
    // Grid cells often repeat the same problem.
    std::vector<std::string> unique;
    for (auto& p : problems) {
      if (std::find(unique.begin(), unique.end(), p) == unique.end()) {
        unique.push_back(std::move(p));
      }
    }
    throw ConfigError(std::move(unique));
  }
  return loaded;
}

LoadedConfigs load_config(const std::filesystem::path& file, const json& overrides) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({file.string() + ": " + e.what()});
  }
  if (!overrides.is_null() && !overrides.empty()) {
    if (doc.is_array()) {
      for (auto& d : doc) d.merge_patch(overrides);
    } else {
      doc.merge_patch(overrides);
    }
  }
  return parse_config(doc, file.parent_path());
}

PreparedData prepare_data(const DatasetSource& source) {
  PreparedData out;
  if (source.synthetic) {
    const Dataset all = make_separable_dataset(*source.synthetic).dataset;
    out.folds.push_back(split_train_test(all, source.test_fraction, source.split_seed));
  } else if (source.path) {
    const Dataset all = load_letor_file(*source.path);
    out.folds.push_back(split_train_test(all, source.test_fraction, source.split_seed));
  } else if (source.train && source.test) {
    out.folds.emplace_back(load_letor_file(*source.train),
                           load_letor_file(*source.test));
  } else {
    for (const auto& f : source.folds) {
      out.folds.emplace_back(load_letor_file(f.train), load_letor_file(f.test));
    }
  }
  if (out.folds.empty()) throw Error("dataset source yields no data");

  // Separately parsed files can disagree on width or grade scale; pad to the
  // widest and use the coarsest scale that covers every label.
  std::size_t dim = 0;
  int grades = 3;
  for (const auto& [train, test] : out.folds) {
    dim = std::max({dim, train.feature_dim, test.feature_dim});
    grades = std::max({grades, train.grade_levels, test.grade_levels});
  }
  if (source.grade_levels) grades = *source.grade_levels;
  for (auto& [train, test] : out.folds) {
    for (Dataset* ds : {&train, &test}) {
      ds->feature_dim = dim;
      ds->grade_levels = grades;
      for (auto& q : ds->queries) {
        for (auto& doc : q.documents) doc.features.resize(dim, 0.0);
      }
    }
    if (!source.normalize) continue;
    // One min-max scale per fold, taken over train and test together.
    Dataset joint = train;
    joint.queries.insert(joint.queries.end(), test.queries.begin(), test.queries.end());
    joint = normalize_features(joint);
    const auto cut = joint.queries.begin() + static_cast<std::ptrdiff_t>(train.queries.size());
    train.queries.assign(joint.queries.begin(), cut);
    test.queries.assign(cut, joint.queries.end());
  }
  out.feature_dim = dim;
  out.grade_levels = grades;
  return out;
}

FederationConfig make_federation_config(const ExperimentConfig& config,
                                        const PreparedData& data) {
  FederationConfig fc;
  fc.model = ModelSpec{config.model_kind, data.feature_dim, config.hidden_dim};
  if (config.custom_click_model) {
    fc.benign_clicks = *config.custom_click_model;
    if (fc.benign_clicks.grade_levels() != data.grade_levels) {
      throw Error("custom click model covers " +
                  std::to_string(fc.benign_clicks.grade_levels()) +
                  " grades but the dataset uses " +
                  std::to_string(data.grade_levels));
    }
  } else {
    fc.benign_clicks = builtin_model(config.click_model, data.grade_levels);
  }
  fc.threat = config.threat();
  fc.aggregator = config.aggregator();
  fc.eta = config.eta;
  fc.n_queries = config.n_queries;
  fc.serp_length = config.serp_length;
  fc.partition = config.partition;
  fc.fang_krum = config.fang_krum;
  fc.fang_trim = config.fang_trim;
  fc.validate();
  return fc;
}

std::size_t run_count(const ExperimentConfig& config, const PreparedData& data) {
  return config.repeats * data.folds.size();
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run) {
  return mix_seed({config.seed, run % config.repeats});
}

std::vector<MetricRecord> run_config(
    const ExperimentConfig& config, const PreparedData& data, std::size_t run,
    const std::function<void(const RoundTrace&)>& on_round,
    ParamVector* final_params) {
  const FederationConfig fc = make_federation_config(config, data);
  const auto& [train, test] = data.folds.at(run / config.repeats);
  RunOptions options;
  options.rounds = config.rounds;
  options.eval_interval = config.eval_interval;
  options.cutoff = config.k;
  options.fingerprint = config.fingerprint();
  options.on_round = on_round;
  ExperimentRun result =
      run_experiment(fc, train, test, run_seed(config, run), options);
  if (final_params) *final_params = std::move(result.final_params);
  return std::move(result.records);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const ExperimentConfig& config,
                    std::size_t run, const std::vector<MetricRecord>& records) {
  for (const auto& r : records) {
    out << r.round << ',' << format_double(r.ndcg_at_10) << ','
        << config.data.name << ',' << config.click_model_name() << ','
        << to_string(config.attack) << ',' << to_string(config.knowledge) << ','
        << to_string(config.defense) << ',' << config.n << ',' << config.m
        << ',' << r.seed << ',' << run << '\n';
  }
}

json trace_to_json(const RoundTrace& trace, std::size_t cell, std::size_t run) {
  json j = {{"cell", cell},
            {"run", run},
            {"round", trace.round},
            {"flagged", trace.attack_flagged}};
  if (!trace.krum_scores.empty()) {
    j["krum_scores"] = trace.krum_scores;
    j["krum_selected"] = trace.krum_selected;
  }
  if (trace.lie_z) j["lie_z"] = *trace.lie_z;
  if (trace.fang_lambda) {
    j["lambda"] = *trace.fang_lambda;
    j["lambda_trace"] = trace.lambda_trace;
  }
  if (!trace.crafted_norms.empty()) j["crafted_norms"] = trace.crafted_norms;
  return j;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  json j = {{"model",
             {{"kind", std::string(to_string(ckpt.model.kind))},
              {"input_dim", ckpt.model.input_dim},
              {"hidden_dim", ckpt.model.hidden_dim}}},
            {"round", ckpt.round},
            {"seed", ckpt.seed},
            {"params", ckpt.params}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  try {
    const json j = json::parse(in);
    Checkpoint ckpt;
    ckpt.model.kind = parse_model_kind(j.at("model").at("kind").get<std::string>());
    ckpt.model.input_dim = j.at("model").at("input_dim").get<std::size_t>();
    ckpt.model.hidden_dim = j.at("model").at("hidden_dim").get<std::size_t>();
    ckpt.round = j.at("round").get<std::size_t>();
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.params = j.at("params").get<ParamVector>();
    if (ckpt.params.size() != ckpt.model.param_count()) {
      throw Error("checkpoint parameter count does not match its model");
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw Error("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

GridResult run_grid(const std::vector<ExperimentConfig>& configs,
                    const std::filesystem::path& output_dir,
                    const GridOptions& options) {
  namespace fs = std::filesystem;
  const fs::path cells_dir = output_dir / "cells";
  fs::create_directories(cells_dir);

  std::mutex log_mutex;
  auto log = [&](const std::string& msg) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    options.log(msg);
  };

  // Load every distinct data source once.
  std::vector<DatasetSource> sources;
  std::vector<std::shared_ptr<const PreparedData>> prepared;
  std::vector<std::string> source_errors;
  std::vector<std::size_t> source_of(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto it = std::find(sources.begin(), sources.end(), configs[i].data);
    if (it == sources.end()) {
      sources.push_back(configs[i].data);
      try {
        prepared.push_back(std::make_shared<PreparedData>(prepare_data(sources.back())));
        source_errors.emplace_back();
      } catch (const Error& e) {
        prepared.push_back(nullptr);
        source_errors.emplace_back(e.what());
      }
      it = sources.end() - 1;
    }
    source_of[i] = static_cast<std::size_t>(it - sources.begin());
  }

  struct CellResult {
    std::vector<double> finals;
    std::vector<std::string> failures;
    fs::path csv;
    std::size_t rows = 0;
  };
  std::vector<CellResult> cells(configs.size());

  auto run_cell = [&](std::size_t idx) {
    const ExperimentConfig& cfg = configs[idx];
    CellResult& cell = cells[idx];
    char stem[32];
    std::snprintf(stem, sizeof stem, "cell_%03zu", idx);
    cell.csv = cells_dir / (std::string(stem) + ".csv");

    const auto& data = prepared[source_of[idx]];
    if (!data) {
      cell.failures.push_back(cfg.label() + ": " + source_errors[source_of[idx]]);
      return;
    }
    std::ostringstream rows;
    std::ofstream trace_out;
    if (cfg.trace) trace_out.open(cells_dir / (std::string(stem) + ".trace.jsonl"));

    const std::size_t total_runs = run_count(cfg, *data);
    for (std::size_t run = 0; run < total_runs; ++run) {
      try {
        std::function<void(const RoundTrace&)> on_round;
        if (cfg.trace) {
          on_round = [&](const RoundTrace& t) {
            trace_out << trace_to_json(t, idx, run).dump() << '\n';
          };
        }
        ParamVector final_params;
        const auto records = run_config(cfg, *data, run, on_round, &final_params);
        write_csv_rows(rows, cfg, run, records);
        cell.rows += records.size();

        const std::size_t window = std::min(cfg.summary_window, records.size());
        double sum = 0.0;
        for (std::size_t i = records.size() - window; i < records.size(); ++i) {
          sum += records[i].ndcg_at_10;
        }
        cell.finals.push_back(sum / static_cast<double>(window));

        save_checkpoint(cells_dir / (std::string(stem) + "_run" +
                                     std::to_string(run) + ".params.json"),
                        {ModelSpec{cfg.model_kind, data->feature_dim, cfg.hidden_dim},
                         cfg.rounds, run_seed(cfg, run), std::move(final_params)});
        log(cfg.label() + " run " + std::to_string(run) +
            ": final nDCG@" + std::to_string(cfg.k) + " = " +
            format_double(records.back().ndcg_at_10));
      } catch (const std::exception& e) {
        cell.failures.push_back(cfg.label() + " run " + std::to_string(run) +
                                ": " + e.what());
        log("FAILED " + cell.failures.back());
      }
    }
    std::ofstream out(cell.csv);
    write_csv_header(out);
    out << rows.str();
  };

  const std::size_t workers =
      std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, configs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) run_cell(i);
      });
    }
  }

  GridResult result;
  result.metrics_csv = output_dir / "metrics.csv";
  {
    std::ofstream merged(result.metrics_csv);
    write_csv_header(merged);
    for (const auto& cell : cells) {
      std::ifstream in(cell.csv);
      std::string line;
      bool header = true;
      while (std::getline(in, line)) {
        if (header) {
          header = false;
          continue;
        }
        merged << line << '\n';
      }
      result.rows += cell.rows;
    }
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    const auto& cell = cells[i];
    for (const auto& f : cell.failures) result.failures.push_back(f);
    if (cell.finals.empty()) continue;
    RunSummary s;
    s.label = cfg.label();
    s.dataset = cfg.data.name;
    s.click_model = cfg.click_model_name();
    s.attack = to_string(cfg.attack);
    s.knowledge = to_string(cfg.knowledge);
    s.defense = to_string(cfg.defense);
    s.n = cfg.n;
    s.m = cfg.m;
    s.runs = cell.finals.size();
    s.mean = std::accumulate(cell.finals.begin(), cell.finals.end(), 0.0) /
             static_cast<double>(s.runs);
    if (s.runs > 1) {
      double ss = 0.0;
      for (double v : cell.finals) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(s.runs - 1));
    }
    result.summaries.push_back(std::move(s));
  }

  for (auto& s : result.summaries) {
    const RunSummary* baseline = nullptr;
    for (const auto& b : result.summaries) {
      if (b.dataset != s.dataset || b.click_model != s.click_model ||
          (b.attack != "none" && b.m != 0) || b.defense != "fedavg") {
        continue;
      }
      if (!baseline || (b.attack == "none" && baseline->attack != "none")) {
        baseline = &b;
      }
    }
    if (baseline) s.baseline_delta = s.mean - baseline->mean;
  }

  result.summary_csv = output_dir / "summary.csv";
  std::ofstream summary(result.summary_csv);
  summary << "label,dataset,click_model,attack,knowledge,defense,n,m,runs,"
             "mean_ndcg_at_10,std_ndcg_at_10,delta_vs_honest\n";
  for (const auto& s : result.summaries) {
    summary << s.label << ',' << s.dataset << ',' << s.click_model << ','
            << s.attack << ',' << s.knowledge << ',' << s.defense << ',' << s.n
            << ',' << s.m << ',' << s.runs << ',' << format_double(s.mean) << ','
            << format_double(s.stddev) << ','
            << (s.baseline_delta ? format_double(*s.baseline_delta) : "") << '\n';
  }
  return result;
}

std::string format_summary(const std::vector<RunSummary>& summaries) {
  std::size_t width = 5;
  for (const auto& s : summaries) width = std::max(width, s.label.size());
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %5s %9s %9s %10s\n", static_cast<int>(width),
                "label", "runs", "mean", "std", "delta");
  out << buf;
  for (const auto& s : summaries) {
    const std::string delta =
        s.baseline_delta ? format_double(*s.baseline_delta).substr(0, 9) : "-";
    std::snprintf(buf, sizeof buf, "%-*s %5zu %9.4f %9.4f %10s\n",
                  static_cast<int>(width), s.label.c_str(), s.runs, s.mean,
                  s.stddev, delta.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace foltr
