#include "skillroute/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "skillroute/error.hpp"

namespace skillroute {

namespace {

double require_number(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw Error(ErrorKind::validation, fmt::format("{}: missing numeric field '{}'", context, key));
  return it->get<double>();
}

std::string require_string(const Json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorKind::validation, fmt::format("{}: missing string field '{}'", context, key));
  return it->get<std::string>();
}

}  // namespace

std::vector<ModelRecord> parse_models(const Json& doc) {
  const Json& arr = unwrap_array(doc, "models", "models file");
  std::vector<ModelRecord> out;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& item : arr) {
    if (!item.is_object()) throw Error(ErrorKind::validation, "models file: entries must be objects");
    ModelRecord m;
    m.name = require_string(item, "name", "models file");
    m.price_in = require_number(item, "price_in_per_mtok", m.name);
    m.price_out = require_number(item, "price_out_per_mtok", m.name);
    if (!(m.price_in > 0.0) || !(m.price_out > 0.0))
      problems.push_back(fmt::format("model '{}': prices must be positive", m.name));
    if (!seen.insert(m.name).second) problems.push_back(fmt::format("duplicate model '{}'", m.name));
    out.push_back(std::move(m));
  }
  if (out.empty()) problems.push_back("models file lists no models");
  if (!problems.empty()) throw Error(ErrorKind::validation, "invalid models file", problems);
  return out;
}

std::vector<ModelRecord> load_models(const std::filesystem::path& path) { return parse_models(read_json_file(path)); }

Json to_json(std::span<const ModelRecord> models) {
  Json arr = Json::array();
  for (const auto& m : models)
    arr.push_back({{"name", m.name}, {"price_in_per_mtok", m.price_in}, {"price_out_per_mtok", m.price_out}});
  return Json{{"schema_version", kSchemaVersion}, {"models", arr}};
}

std::vector<BenchmarkRecord> parse_benchmarks(const Json& doc, const Taxonomy& taxonomy) {
  const Json& arr = unwrap_array(doc, "benchmarks", "benchmarks file");
  std::vector<BenchmarkRecord> out;
  std::set<std::string> seen;
  for (const auto& item : arr) {
    if (!item.is_object()) throw Error(ErrorKind::validation, "benchmarks file: entries must be objects");
    BenchmarkRecord b;
    b.name = require_string(item, "name", "benchmarks file");
    b.description = item.value("description", std::string{});
    if (!seen.insert(b.name).second)
      throw Error(ErrorKind::validation, fmt::format("duplicate benchmark '{}'", b.name));
    if (auto it = item.find("skill_weights"); it != item.end() && !it->is_null()) {
      std::string ctx = fmt::format("benchmark '{}'", b.name);
      b.skill_weights = ingest_skill_vector(skill_vector_from_json(*it, ctx), taxonomy, ctx);
    }
    if (auto it = item.find("max_score"); it != item.end() && !it->is_null()) {
      if (!it->is_number())
        throw Error(ErrorKind::validation, fmt::format("benchmark '{}': max_score must be numeric", b.name));
      b.max_score = it->get<double>();
    }
    if (auto it = item.find("scores"); it != item.end() && !it->is_null()) {
      if (!it->is_object())
        throw Error(ErrorKind::validation, fmt::format("benchmark '{}': scores must be an object", b.name));
      for (const auto& [model, val] : it->items()) {
        if (!val.is_number() || val.get<double>() < 0.0)
          throw Error(ErrorKind::validation,
                      fmt::format("benchmark '{}': score for '{}' must be a nonnegative number", b.name, model));
        b.scores.emplace(model, val.get<double>());
      }
    }
    if (auto it = item.find("example_items"); it != item.end() && it->is_array()) {
      for (const auto& ex : *it) b.example_items.push_back(ex.is_string() ? ex.get<std::string>() : ex.dump());
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BenchmarkRecord> load_benchmarks(const std::filesystem::path& path, const Taxonomy& taxonomy) {
  return parse_benchmarks(read_json_file(path), taxonomy);
}

Json to_json(std::span<const BenchmarkRecord> benchmarks) {
  Json arr = Json::array();
  for (const auto& b : benchmarks) {
    Json j{{"name", b.name}, {"description", b.description}, {"scores", b.scores}};
    if (b.skill_weights) j["skill_weights"] = to_json(*b.skill_weights);
    if (b.max_score) j["max_score"] = *b.max_score;
    if (!b.example_items.empty()) j["example_items"] = b.example_items;
    arr.push_back(std::move(j));
  }
  return Json{{"schema_version", kSchemaVersion}, {"benchmarks", arr}};
}

double effective_max_score(const BenchmarkRecord& bench, std::vector<std::string>* warnings) {
  std::optional<double> local;
  for (const auto& [_, s] : bench.scores) local = local ? std::max(*local, s) : s;
  if (bench.max_score) {
    if (local && warnings && std::abs(*local - *bench.max_score) > 1e-6) {
      warnings->push_back(fmt::format("benchmark '{}': published max_score {} differs from best local score {}",
                                      bench.name, *bench.max_score, *local));
    }
    return *bench.max_score;
  }
  return local.value_or(0.0);
}

std::map<std::string, double> normalize_scores(const BenchmarkRecord& bench, std::vector<std::string>* warnings) {
  const double max = effective_max_score(bench, warnings);
  if (!(max > 0.0))
    throw Error(ErrorKind::domain, fmt::format("invalid benchmark '{}': max score must be positive", bench.name));
  std::map<std::string, double> out;
  for (const auto& [model, score] : bench.scores) {
    if (score > max + 1e-9)
      throw Error(ErrorKind::validation,
                  fmt::format("benchmark '{}': score {} for '{}' exceeds max score {}", bench.name, score, model, max));
    out.emplace(model, score / max);
  }
  return out;
}

CapabilityReport compute_capabilities(std::span<const BenchmarkRecord> benchmarks,
                                      std::span<const ModelRecord> models, const Taxonomy& taxonomy) {
  CapabilityReport report;
  std::vector<std::string> problems;
  for (const auto& b : benchmarks) {
    if (!b.skill_weights) problems.push_back(fmt::format("benchmark '{}' has no skill weights (unprofiled)", b.name));
    if (b.scores.empty()) problems.push_back(fmt::format("benchmark '{}' has no scores", b.name));
  }
  if (!problems.empty()) throw Error(ErrorKind::validation, "benchmarks are incomplete", problems);

  std::vector<std::map<std::string, double>> normalized;
  normalized.reserve(benchmarks.size());
  for (const auto& b : benchmarks) normalized.push_back(normalize_scores(b, &report.warnings));

  std::vector<std::string> uncovered;
  for (const auto& skill : taxonomy.ids()) {
    double total = 0.0;
    for (const auto& b : benchmarks) total += b.skill_weights->weight(skill);
    if (!(total > 0.0)) uncovered.push_back(skill);
  }
  if (!uncovered.empty()) {
    throw Error(ErrorKind::validation,
                fmt::format("uncovered skill(s): no benchmark assigns weight to {}", fmt::join(uncovered, ", ")),
                uncovered);
  }

  for (const auto& model : models) {
    CapabilityProfile p{.model = model.name, .raw = {}, .calibrated = {}, .kappa = 1.0};
    for (const auto& skill : taxonomy.ids()) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < benchmarks.size(); ++i) {
        auto it = normalized[i].find(model.name);
        if (it == normalized[i].end()) continue;
        const double w = benchmarks[i].skill_weights->weight(skill);
        num += it->second * w;
        den += w;
      }
      if (den > 0.0) {
        p.raw[skill] = num / den;
      } else {
        report.warnings.push_back(
            fmt::format("model '{}' has no scored benchmark covering '{}'; skill left unprofiled", model.name, skill));
      }
    }
    p.calibrated = p.raw;
    report.profiles.push_back(std::move(p));
  }
  return report;
}

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw Error(ErrorKind::config, fmt::format("calibration factor kappa must lie in (0, 1], got {}", kappa));
}

CapabilityProfile calibrate(CapabilityProfile profile, double kappa) {
  check_kappa(kappa);
  profile.kappa = kappa;
  profile.calibrated.clear();
  for (const auto& [skill, c] : profile.raw) profile.calibrated.emplace(skill, kappa * c);
  return profile;
}

const CapabilityProfile* ProfileSet::find(const std::string& model) const {
  for (const auto& p : profiles)
    if (p.model == model) return &p;
  return nullptr;
}

ProfileSet parse_profiles(const Json& doc, const Taxonomy& taxonomy, std::optional<double> kappa) {
  ProfileSet set;
  double file_kappa = kDefaultKappa;
  if (doc.is_object() && doc.contains("kappa") && doc["kappa"].is_number()) file_kappa = doc["kappa"].get<double>();
  set.kappa = kappa.value_or(file_kappa);
  check_kappa(set.kappa);
  const Json& arr = unwrap_array(doc, "profiles", "profiles file");
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& item : arr) {
    CapabilityProfile p;
    p.model = require_string(item, "model", "profiles file");
    if (!seen.insert(p.model).second) problems.push_back(fmt::format("duplicate profile for '{}'", p.model));
    if (!item.contains("raw") || !item["raw"].is_object())
      throw Error(ErrorKind::validation, fmt::format("profile '{}': missing 'raw' object", p.model));
    for (const auto& [skill, val] : item["raw"].items()) {
      if (!taxonomy.contains(skill)) problems.push_back(fmt::format("profile '{}': unknown skill '{}'", p.model, skill));
      if (!val.is_number() || val.get<double>() < 0.0 || val.get<double>() > 1.0) {
        problems.push_back(fmt::format("profile '{}': capability for '{}' must lie in [0, 1]", p.model, skill));
        continue;
      }
      p.raw.emplace(skill, val.get<double>());
    }
    set.profiles.push_back(calibrate(std::move(p), set.kappa));
  }
  if (!problems.empty()) throw Error(ErrorKind::validation, "invalid profiles file", problems);
  return set;
}

ProfileSet load_profiles(const std::filesystem::path& path, const Taxonomy& taxonomy, std::optional<double> kappa) {
  return parse_profiles(read_json_file(path), taxonomy, kappa);
}

Json to_json(const ProfileSet& set) {
  Json arr = Json::array();
  for (const auto& p : set.profiles) arr.push_back({{"model", p.model}, {"raw", p.raw}, {"calibrated", p.calibrated}});
  return Json{{"schema_version", kSchemaVersion}, {"kappa", set.kappa}, {"profiles", arr}};
}

}  // namespace skillroute
