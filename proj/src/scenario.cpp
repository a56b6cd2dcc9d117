#include "pcassoc/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "pcassoc/table.hpp"

namespace pcassoc {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RawEntry {
  std::string value;
  long line = 0;
  bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

class Extractor {
 public:
  Extractor(RawMap& raw, std::vector<std::string>& issues, std::string origin)
      : raw_(raw), issues_(issues), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  void fail(const std::string& key, const std::string& msg) {
    auto it = raw_.find(key);
    const std::string where =
        it != raw_.end() ? origin_ + ":" + std::to_string(it->second.line) + ": " : origin_ + ": ";
    issues_.push_back(where + msg);
  }

  long take_int(const std::string& key, long fallback, long lo, long hi) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const long parsed = std::stol(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      if (parsed < lo || parsed > hi) {
        fail(key, key + " = " + *v + " out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
        return fallback;
      }
      return parsed;
    } catch (const std::exception&) {
      fail(key, key + " must be an integer, got '" + *v + "'");
      return fallback;
    }
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback, bool* present = nullptr) {
    auto v = take(key);
    if (present) *present = v.has_value();
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const unsigned long long parsed = std::stoull(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return parsed;
    } catch (const std::exception&) {
      fail(key, key + " must be an unsigned integer, got '" + *v + "'");
      return fallback;
    }
  }

  double take_double(const std::string& key, double fallback, double lo, double hi,
                     bool lo_open = false, bool hi_open = false) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      size_t pos = 0;
      const double parsed = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      const bool below = lo_open ? parsed <= lo : parsed < lo;
      const bool above = hi_open ? parsed >= hi : parsed > hi;
      if (below || above) {
        fail(key, key + " = " + *v + " out of range");
        return fallback;
      }
      return parsed;
    } catch (const std::exception&) {
      fail(key, key + " must be a number, got '" + *v + "'");
      return fallback;
    }
  }

  template <typename T>
  T take_enum(const std::string& key, T fallback,
              const std::vector<std::pair<std::string, T>>& table) {
    auto v = take(key);
    if (!v) return fallback;
    for (const auto& [name, val] : table) {
      if (*v == name) return val;
    }
    std::string allowed;
    for (const auto& [name, val] : table) {
      if (!allowed.empty()) allowed += ", ";
      allowed += name;
    }
    fail(key, key + " = '" + *v + "' not one of: " + allowed);
    return fallback;
  }

  void report_unknown() {
    for (const auto& [key, entry] : raw_) {
      if (!entry.used) {
        issues_.push_back(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "'");
      }
    }
  }

 private:
  RawMap& raw_;
  std::vector<std::string>& issues_;
  std::string origin_;
};

const std::vector<std::pair<std::string, GenotypeCoding>> kCodingNames = {
    {"biallelic", GenotypeCoding::biallelic}, {"gaussian", GenotypeCoding::gaussian}};
const std::vector<std::pair<std::string, TraitSelection>> kSelectionNames = {
    {"uniform", TraitSelection::uniform},
    {"correlation-weighted", TraitSelection::correlation_weighted}};
const std::vector<std::pair<std::string, SignMode>> kSignNames = {
    {"all-positive", SignMode::all_positive}, {"random", SignMode::random_sign}};
const std::vector<std::pair<std::string, EffectSign>> kEffectSignNames = {
    {"concordant", EffectSign::concordant}, {"opposite", EffectSign::opposite}};
const std::vector<std::pair<std::string, LatentScheme>> kSchemeNames = {
    {"sc1", LatentScheme::sc1}, {"sc2", LatentScheme::sc2}, {"sc3", LatentScheme::sc3}};

std::string coding_name(GenotypeCoding c) {
  return c == GenotypeCoding::biallelic ? "biallelic" : "gaussian";
}
std::string selection_name(TraitSelection s) {
  return s == TraitSelection::uniform ? "uniform" : "correlation-weighted";
}
std::string sign_mode_name(SignMode s) {
  return s == SignMode::all_positive ? "all-positive" : "random";
}
std::string effect_sign_name(EffectSign s) {
  return s == EffectSign::concordant ? "concordant" : "opposite";
}
std::string scheme_name(LatentScheme s) {
  switch (s) {
    case LatentScheme::sc1: return "sc1";
    case LatentScheme::sc2: return "sc2";
    default: return "sc3";
  }
}

}  // namespace

std::string TestSpec::to_string() const {
  switch (kind) {
    case Kind::trait: return "trait";
    case Kind::trait_affected: return "trait-affected";
    case Kind::pc: return "pc";
    case Kind::best_pc: return "best-pc";
    case Kind::combined_pc: return "combined-pc";
    case Kind::fisher_split: return "fisher-split:" + std::to_string(k);
    case Kind::group: return "group:" + std::to_string(lo) + "-" + std::to_string(hi);
    case Kind::manova: return "manova";
  }
  return "?";
}

TestSpec TestSpec::parse(const std::string& token) {
  TestSpec t;
  if (token == "trait") {
    t.kind = Kind::trait;
  } else if (token == "trait-affected") {
    t.kind = Kind::trait_affected;
  } else if (token == "pc") {
    t.kind = Kind::pc;
  } else if (token == "best-pc") {
    t.kind = Kind::best_pc;
  } else if (token == "combined-pc") {
    t.kind = Kind::combined_pc;
  } else if (token == "manova") {
    t.kind = Kind::manova;
  } else if (token.rfind("fisher-split:", 0) == 0) {
    t.kind = Kind::fisher_split;
    t.k = std::stoi(token.substr(13));
    if (t.k < 1) throw std::domain_error("fisher-split needs K >= 1");
  } else if (token.rfind("group:", 0) == 0) {
    t.kind = Kind::group;
    const std::string range = token.substr(6);
    const size_t dash = range.find('-');
    if (dash == std::string::npos) throw std::domain_error("group needs LO-HI");
    t.lo = std::stoi(range.substr(0, dash));
    t.hi = std::stoi(range.substr(dash + 1));
    if (t.lo < 1 || t.hi < t.lo) throw std::domain_error("group range must satisfy 1 <= LO <= HI");
  } else {
    throw std::domain_error("unknown test '" + token + "'");
  }
  return t;
}

ScenarioError::ScenarioError(std::vector<std::string> issues)
    : std::runtime_error(issues.empty() ? "scenario error"
                                        : issues.front() + (issues.size() > 1
                                                                ? " (+" +
                                                                      std::to_string(issues.size() - 1) +
                                                                      " more)"
                                                                : "")),
      issues_(std::move(issues)) {}

int Scenario::trait_count() const {
  switch (kind) {
    case GeneratorKind::bivariate: return 2;
    case GeneratorKind::multitrait: return static_cast<int>(multitrait.scenario.corr.rows());
    case GeneratorKind::latent: return latent.n_phe;
  }
  return 0;
}

bool Scenario::has_genetic_effect() const {
  switch (kind) {
    case GeneratorKind::bivariate:
      return bivariate.params.v1 > 0.0 || bivariate.params.v2 > 0.0;
    case GeneratorKind::multitrait: return multitrait.scenario.k_assoc > 0;
    case GeneratorKind::latent: return latent.k_assoc > 0;
  }
  return false;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> issues;
  RawMap raw;

  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      issues.push_back(origin + ":" + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (raw.count(key)) {
      issues.push_back(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      continue;
    }
    raw[key] = RawEntry{value, line_no, false};
  }

  Extractor ex(raw, issues, origin);
  Scenario s;

  s.kind = ex.take_enum<GeneratorKind>("generator", GeneratorKind::multitrait,
                                       {{"bivariate", GeneratorKind::bivariate},
                                        {"multitrait", GeneratorKind::multitrait},
                                        {"latent", GeneratorKind::latent}});
  s.n = static_cast<int>(ex.take_int("n", 2000, 2, 100000000));
  s.replicates = static_cast<int>(ex.take_int("replicates", 1, 1, 100000000));
  s.alpha = ex.take_double("alpha", 5e-8, 0.0, 1.0, true, true);
  s.seed = ex.take_u64("seed", 0, &s.seed_set);
  if (!s.seed_set) {
    issues.push_back(origin + ": missing mandatory key 'seed'");
  }
  s.bonferroni_factor = static_cast<int>(ex.take_int("bonferroni_factor", 0, 0, 1000000));

  if (s.kind == GeneratorKind::bivariate) {
    auto& p = s.bivariate.params;
    p.c = ex.take_double("c", 0.0, 0.0, 1.0, false, true);
    p.v1 = ex.take_double("v1", 0.0, 0.0, 1.0, false, true);
    p.v2 = ex.take_double("v2", 0.0, 0.0, 1.0, false, true);
    p.sign2 = ex.take_enum<EffectSign>("sign2", EffectSign::concordant, kEffectSignNames);
    p.coding = ex.take_enum<GenotypeCoding>("coding", GenotypeCoding::biallelic, kCodingNames);
    p.maf = ex.take_double("maf", 0.3, 0.0, 0.5, true, false);
    if (p.c + std::max(p.v1, p.v2) > 1.0) {
      issues.push_back(origin + ": c + max(v1, v2) = " +
                       std::to_string(p.c + std::max(p.v1, p.v2)) + " exceeds 1");
    }
  } else if (s.kind == GeneratorKind::multitrait) {
    auto& cfg = s.multitrait;
    auto model = ex.take("model");
    auto corr_file = ex.take("corr_file");
    if (corr_file) {
      cfg.model = "file:" + *corr_file;
      try {
        Table t = read_tsv(*corr_file);
        cfg.scenario.corr = t.to_matrix();
      } catch (const std::exception& e) {
        issues.push_back(origin + ": corr_file: " + e.what());
        cfg.scenario.corr = preset_correlation("model3");
      }
    } else {
      cfg.model = model.value_or("model3");
      try {
        cfg.scenario.corr = preset_correlation(cfg.model);
      } catch (const std::exception& e) {
        ex.fail("model", e.what());
        cfg.scenario.corr = preset_correlation("model3");
      }
    }
    auto& sc = cfg.scenario;
    const int p_traits = static_cast<int>(sc.corr.rows());
    sc.k_assoc = static_cast<int>(ex.take_int("k_assoc", 0, 0, 1000000));
    if (sc.k_assoc > p_traits) {
      ex.fail("k_assoc", "k_assoc = " + std::to_string(sc.k_assoc) + " exceeds trait count " +
                             std::to_string(p_traits));
      sc.k_assoc = 0;
    }
    sc.v_lo = ex.take_double("v_lo", 0.001, 0.0, 1.0, true, true);
    sc.v_hi = ex.take_double("v_hi", 0.005, 0.0, 1.0, true, true);
    if (sc.v_lo > sc.v_hi) {
      issues.push_back(origin + ": v_lo > v_hi (" + std::to_string(sc.v_lo) + " > " +
                       std::to_string(sc.v_hi) + ")");
      sc.v_lo = sc.v_hi;
    }
    sc.selection = ex.take_enum<TraitSelection>("selection", TraitSelection::uniform,
                                                kSelectionNames);
    sc.signs = ex.take_enum<SignMode>("signs", SignMode::all_positive, kSignNames);
    sc.coding = ex.take_enum<GenotypeCoding>("coding", GenotypeCoding::biallelic, kCodingNames);
    sc.maf = ex.take_double("maf", 0.3, 0.0, 0.5, true, false);
  } else {
    auto& cfg = s.latent;
    cfg.scheme = ex.take_enum<LatentScheme>("scheme", LatentScheme::sc1, kSchemeNames);
    cfg.n_phe = static_cast<int>(ex.take_int("n_phe", 100, 2, 100000));
    cfg.n_latent = static_cast<int>(
        ex.take_int("n_latent", cfg.scheme == LatentScheme::sc3 ? 1000 : 30, 1, 1000000));
    cfg.n_clusters = static_cast<int>(ex.take_int("n_clusters", 10, 1, 100000));
    cfg.structure_seed = ex.take_u64("structure_seed", 0);
    cfg.k_assoc = static_cast<int>(ex.take_int("k_assoc", 0, 0, 1000000));
    const int k_max = cfg.scheme == LatentScheme::sc1 ? cfg.n_phe : cfg.n_latent;
    if (cfg.k_assoc > k_max) {
      ex.fail("k_assoc", "k_assoc = " + std::to_string(cfg.k_assoc) + " exceeds " +
                             (cfg.scheme == LatentScheme::sc1 ? "trait count " : "latent count ") +
                             std::to_string(k_max));
      cfg.k_assoc = 0;
    }
    cfg.v_lo = ex.take_double("v_lo", 0.001, 0.0, 1.0, true, true);
    cfg.v_hi = ex.take_double("v_hi", 0.005, 0.0, 1.0, true, true);
    if (cfg.v_lo > cfg.v_hi) {
      issues.push_back(origin + ": v_lo > v_hi");
      cfg.v_lo = cfg.v_hi;
    }
    cfg.selection = ex.take_enum<TraitSelection>("selection", TraitSelection::uniform,
                                                 kSelectionNames);
    cfg.coding = ex.take_enum<GenotypeCoding>("coding", GenotypeCoding::biallelic, kCodingNames);
    cfg.maf = ex.take_double("maf", 0.3, 0.0, 0.5, true, false);
  }

  if (auto tests = ex.take("tests")) {
    for (const std::string& token : split_list(*tests, ',')) {
      try {
        s.tests.push_back(TestSpec::parse(token));
      } catch (const std::exception& e) {
        ex.fail("tests", std::string("tests: ") + e.what());
      }
    }
  }
  if (s.tests.empty()) {
    s.tests.push_back({TestSpec::Kind::trait, 0, 0, 0});
    if (s.has_genetic_effect()) s.tests.push_back({TestSpec::Kind::trait_affected, 0, 0, 0});
    s.tests.push_back({TestSpec::Kind::pc, 0, 0, 0});
    s.tests.push_back({TestSpec::Kind::best_pc, 0, 0, 0});
    s.tests.push_back({TestSpec::Kind::combined_pc, 0, 0, 0});
    s.tests.push_back({TestSpec::Kind::manova, 0, 0, 0});
  }
  const int p_traits = s.trait_count();
  for (const TestSpec& t : s.tests) {
    if (t.kind == TestSpec::Kind::fisher_split && t.k >= p_traits) {
      issues.push_back(origin + ": fisher-split K = " + std::to_string(t.k) +
                       " must be below the component count " + std::to_string(p_traits));
    }
    if (t.kind == TestSpec::Kind::group && t.hi > p_traits) {
      issues.push_back(origin + ": group range " + std::to_string(t.lo) + "-" +
                       std::to_string(t.hi) + " exceeds the component count " +
                       std::to_string(p_traits));
    }
  }

  ex.report_unknown();
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError({"cannot open scenario file: " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  const auto kv = [&out](const std::string& k, const std::string& v) {
    out << k << " = " << v << "\n";
  };
  switch (s.kind) {
    case GeneratorKind::bivariate: kv("generator", "bivariate"); break;
    case GeneratorKind::multitrait: kv("generator", "multitrait"); break;
    case GeneratorKind::latent: kv("generator", "latent"); break;
  }
  kv("n", std::to_string(s.n));
  kv("replicates", std::to_string(s.replicates));
  kv("alpha", format_double(s.alpha));
  kv("seed", std::to_string(s.seed));
  if (s.bonferroni_factor != 0) kv("bonferroni_factor", std::to_string(s.bonferroni_factor));

  if (s.kind == GeneratorKind::bivariate) {
    const auto& p = s.bivariate.params;
    kv("c", format_double(p.c));
    kv("v1", format_double(p.v1));
    kv("v2", format_double(p.v2));
    kv("sign2", effect_sign_name(p.sign2));
    kv("coding", coding_name(p.coding));
    if (p.coding == GenotypeCoding::biallelic) kv("maf", format_double(p.maf));
  } else if (s.kind == GeneratorKind::multitrait) {
    const auto& cfg = s.multitrait;
    if (cfg.model.rfind("file:", 0) == 0) {
      kv("corr_file", cfg.model.substr(5));
    } else {
      kv("model", cfg.model);
    }
    kv("k_assoc", std::to_string(cfg.scenario.k_assoc));
    kv("v_lo", format_double(cfg.scenario.v_lo));
    kv("v_hi", format_double(cfg.scenario.v_hi));
    kv("selection", selection_name(cfg.scenario.selection));
    kv("signs", sign_mode_name(cfg.scenario.signs));
    kv("coding", coding_name(cfg.scenario.coding));
    if (cfg.scenario.coding == GenotypeCoding::biallelic) {
      kv("maf", format_double(cfg.scenario.maf));
    }
  } else {
    const auto& cfg = s.latent;
    kv("scheme", scheme_name(cfg.scheme));
    kv("n_phe", std::to_string(cfg.n_phe));
    kv("n_latent", std::to_string(cfg.n_latent));
    if (cfg.scheme == LatentScheme::sc3) kv("n_clusters", std::to_string(cfg.n_clusters));
    if (cfg.structure_seed != 0) kv("structure_seed", std::to_string(cfg.structure_seed));
    kv("k_assoc", std::to_string(cfg.k_assoc));
    kv("v_lo", format_double(cfg.v_lo));
    kv("v_hi", format_double(cfg.v_hi));
    kv("selection", selection_name(cfg.selection));
    kv("coding", coding_name(cfg.coding));
    if (cfg.coding == GenotypeCoding::biallelic) kv("maf", format_double(cfg.maf));
  }

  std::string tests;
  for (const TestSpec& t : s.tests) {
    if (!tests.empty()) tests += ", ";
    tests += t.to_string();
  }
  kv("tests", tests);
  return out.str();
}

}  // namespace pcassoc
