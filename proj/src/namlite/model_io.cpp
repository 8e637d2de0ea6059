#include "namlite/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "namlite/error.hpp"

namespace namlite {
namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Json slice(const std::vector<double>& params, std::size_t begin, std::size_t end) {
  return Json(std::vector<double>(params.begin() + static_cast<long>(begin),
                                  params.begin() + static_cast<long>(end)));
}

void fill(std::vector<double>& params, std::size_t begin, std::size_t end, const Json& values,
          const char* what) {
  const auto v = values.get<std::vector<double>>();
  if (v.size() != end - begin) {
    throw DataError(std::string("model file: wrong number of ") + what + " values");
  }
  std::copy(v.begin(), v.end(), params.begin() + static_cast<long>(begin));
}

Json bins_to_json(const BinMap& b) {
  Json j;
  j["feature"] = b.feature;
  j["kind"] = std::string(to_string(b.kind));
  j["n_bins"] = b.n_bins;
  j["edges"] = b.edges;
  j["categories"] = b.categories;
  j["lower"] = number(b.lower);
  j["upper"] = number(b.upper);
  return j;
}

BinMap bins_from_json(const Json& j) {
  BinMap b;
  b.feature = j.at("feature").get<std::string>();
  b.kind = feature_kind_from_string(j.at("kind").get<std::string>());
  b.n_bins = j.at("n_bins").get<int>();
  b.edges = j.at("edges").get<std::vector<double>>();
  b.categories = j.at("categories").get<std::vector<std::string>>();
  b.lower = number_from(j.at("lower"));
  b.upper = number_from(j.at("upper"));
  if (b.n_bins < 1) throw DataError("model file: bin map without bins");
  return b;
}

std::pair<int, int> parse_version(const std::string& text) {
  int major = 0;
  int minor = 0;
  if (std::sscanf(text.c_str(), "%d.%d", &major, &minor) != 2) {
    throw DataError("model file: malformed format_version '" + text + "'");
  }
  return {major, minor};
}

}  // namespace

Json model_to_json(const EnsembleModel& e) {
  Json j;
  j["format_version"] = std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);
  j["task"] = std::string(to_string(e.task));
  j["config"] = train_config_to_json(e.config);
  Json schema = Json::array();
  for (const auto& f : e.schema) schema.push_back({{"name", f.name}, {"kind", std::string(to_string(f.kind))}});
  j["schema"] = schema;
  Json bins = Json::array();
  for (const auto& b : e.bins) bins.push_back(bins_to_json(b));
  j["bins"] = bins;
  j["monotone"] = e.monotone;
  j["selected_feats"] = e.feature_names();
  Json pairs = Json::array();
  for (const auto& [a, b] : e.pairs) pairs.push_back(Json::array({e.bins[a].feature, e.bins[b].feature}));
  j["selected_pairs"] = pairs;
  j["eval_times"] = e.eval_times;
  j["gamma"] = e.gamma;
  j["pair_gamma"] = e.pair_gamma;
  Json splits = Json::array();
  for (const auto& split : e.splits) {
    const AdditiveModel& m = split.model;
    Json s;
    s["best_epoch"] = split.best_epoch;
    s["val_loss"] = number(split.val_loss);
    s["pair_best_epoch"] = split.pair_best_epoch;
    s["pair_val_loss"] = number(split.pair_val_loss);
    s["intercept"] = m.intercept();
    Json terms = Json::array();
    for (int t = 0; t < m.term_count(); ++t) {
      const Term& term = m.term(t);
      Json tj;
      tj["embedding"] = slice(m.params(), term.embedding_offset, term.mlp_offset);
      tj["mlp"] = slice(m.params(), term.mlp_offset, term.gate_offset);
      tj["mu"] = m.params()[term.gate_offset];
      tj["offset"] = m.params()[term.monotone_offset];
      tj["centering"] = m.centering(t);
      tj["train_counts"] = split.train_counts[t];
      terms.push_back(tj);
    }
    s["terms"] = terms;
    splits.push_back(s);
  }
  j["splits"] = splits;
  return j;
}

EnsembleModel model_from_json(const Json& j) {
  try {
    const auto [major, minor] = parse_version(j.at("format_version").get<std::string>());
    if (major > kFormatMajor) {
      throw DataError("model format version " + j.at("format_version").get<std::string>() +
                      " is newer than the supported " + std::to_string(kFormatMajor) + "." +
                      std::to_string(kFormatMinor));
    }
    EnsembleModel e;
    e.task = task_from_string(j.at("task").get<std::string>());
    e.config = train_config_from_json(j.at("config"));
    for (const auto& f : j.at("schema")) {
      e.schema.push_back({f.at("name").get<std::string>(),
                          feature_kind_from_string(f.at("kind").get<std::string>())});
    }
    for (const auto& b : j.at("bins")) e.bins.push_back(bins_from_json(b));
    e.monotone = j.at("monotone").get<std::vector<int>>();
    if (e.monotone.size() != e.bins.size()) throw DataError("model file: monotone list size mismatch");
    for (const auto& p : j.at("selected_pairs")) {
      const int a = e.feature_index(p.at(0).get<std::string>());
      const int b = e.feature_index(p.at(1).get<std::string>());
      if (a < 0 || b < 0) throw DataError("model file: pair refers to an unknown feature");
      e.pairs.emplace_back(a, b);
    }
    e.eval_times = j.at("eval_times").get<std::vector<double>>();
    e.gamma = j.at("gamma").get<double>();
    e.pair_gamma = j.at("pair_gamma").get<double>();
    if (e.task == Task::kSurvival && e.eval_times.empty()) {
      throw DataError("model file: survival model without evaluation times");
    }
    for (const auto& s : j.at("splits")) {
      SplitModel split;
      split.best_epoch = s.at("best_epoch").get<int>();
      split.val_loss = number_from(s.at("val_loss"));
      split.pair_best_epoch = s.at("pair_best_epoch").get<int>();
      split.pair_val_loss = number_from(s.at("pair_val_loss"));
      split.model = make_model(e.bins, e.monotone, e.pairs, e.output_dim(), e.config.architecture,
                               e.gamma, e.pair_gamma);
      AdditiveModel& m = split.model;
      const auto& terms = s.at("terms");
      if (terms.size() != static_cast<std::size_t>(m.term_count())) {
        throw DataError("model file: wrong number of terms");
      }
      for (int t = 0; t < m.term_count(); ++t) {
        const Term& term = m.term(t);
        const Json& tj = terms.at(static_cast<std::size_t>(t));
        fill(m.params(), term.embedding_offset, term.mlp_offset, tj.at("embedding"), "embedding");
        fill(m.params(), term.mlp_offset, term.gate_offset, tj.at("mlp"), "network");
        m.params()[term.gate_offset] = tj.at("mu").get<double>();
        m.params()[term.monotone_offset] = tj.at("offset").get<double>();
        m.centering(t) = tj.at("centering").get<std::vector<double>>();
        if (m.centering(t).size() != static_cast<std::size_t>(m.output_dim())) {
          throw DataError("model file: wrong centering size");
        }
        split.train_counts.push_back(tj.at("train_counts").get<std::vector<std::int64_t>>());
        if (split.train_counts.back().size() != static_cast<std::size_t>(term.cells())) {
          throw DataError("model file: wrong train_counts size");
        }
      }
      m.intercept() = s.at("intercept").get<std::vector<double>>();
      if (m.intercept().size() != static_cast<std::size_t>(m.output_dim())) {
        throw DataError("model file: wrong intercept size");
      }
      e.splits.push_back(std::move(split));
    }
    if (e.splits.empty()) throw DataError("model file: no splits");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("model file: ") + ex.what());
  } catch (const ConfigError& ex) {
    throw DataError(std::string("model file: ") + ex.what());
  }
}

std::string model_to_text(const EnsembleModel& ensemble) {
  return model_to_json(ensemble).dump() + "\n";
}

EnsembleModel model_from_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

void save_model(const EnsembleModel& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model to '" + path.string() + "'");
  out << model_to_text(ensemble);
  if (!out) throw DataError("failed writing model to '" + path.string() + "'");
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_text(buffer.str());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string model_hash(const EnsembleModel& ensemble) { return fnv1a_hex(model_to_text(ensemble)); }

}  // namespace namlite
