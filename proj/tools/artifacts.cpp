#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "cuelex/common.hpp"

namespace cuelex::cli {

namespace fs = std::filesystem;
using nlohmann::json;

json RunConfig::to_json() const {
  return json{{"model", models},
              {"model-format", model_formats},
              {"vocab-filter", vocab_filter},
              {"seeds", seeds},
              {"k", k},
              {"pairs", pairs},
              {"candidates", candidates},
              {"corpus", corpus},
              {"collections", collections},
              {"indicators", indicators},
              {"words", words},
              {"baseline", baseline},
              {"limit", limit},
              {"balance", balance},
              {"annotations", annotations},
              {"nodes", nodes},
              {"edges", edges},
              {"augment-threshold", augment_threshold},
              {"resolution", resolution},
              {"damping", damping},
              {"tol", tol},
              {"max-iter", max_iter},
              {"format", format},
              {"dataset", dataset},
              {"include-seeds", include_seeds},
              {"unrelated", unrelated},
              {"max-sim", max_sim},
              {"folds", folds},
              {"classifier", classifiers},
              {"matrix", matrix},
              {"components", components},
              {"no-standardize", no_standardize},
              {"top", top},
              {"p", p},
              {"dims", dims},
              {"mds-max-iter", mds_max_iter},
              {"rng-seed", rng_seed}};
}

std::string RunConfig::digest() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path canonical_or_self(const fs::path& p) {
  std::error_code ec;
  auto c = fs::weakly_canonical(p, ec);
  return ec ? p : c;
}

}  // namespace

Outputs::Outputs(const RunConfig& cfg, std::string command) : dir_(cfg.out) {
  const std::string digest = cfg.digest();
  header_ = "cuelex " + std::string(kVersion) + " command=" + command + " config=" + digest +
            " rng_seed=" + std::to_string(cfg.rng_seed);
  meta_ = {{"tool", "cuelex"},
           {"version", std::string(kVersion)},
           {"command", command},
           {"config", digest},
           {"rng_seed", cfg.rng_seed}};
  if (!cfg.reproducible) {
    const std::string ts = utc_now();
    header_ += " timestamp=" + ts;
    meta_["timestamp"] = ts;
  }
}

void Outputs::add_input(const std::string& path) {
  if (!path.empty()) inputs_.insert(canonical_or_self(path));
}

fs::path Outputs::target(const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
  const fs::path p = dir_ / name;
  if (inputs_.count(canonical_or_self(p)))
    throw InputError("refusing to overwrite input file " + p.string());
  return p;
}

void Outputs::put(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
  written_.push_back(path);
}

void Outputs::text(const std::string& name, const std::function<void(std::ostream&)>& body) {
  const auto p = target(name);
  std::ostringstream s;
  s << "# " << header_ << '\n';
  body(s);
  put(p, s.str());
}

void Outputs::json(const std::string& name, nlohmann::json body) {
  const auto p = target(name);
  nlohmann::json doc = {{"meta", meta_}};
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  put(p, doc.dump(2) + "\n");
}

void Outputs::xml(const std::string& name, const std::function<void(std::ostream&)>& body) {
  const auto p = target(name);
  std::ostringstream s;
  body(s);
  std::string x = s.str();
  const auto nl = x.find('\n');
  const std::string comment = "<!-- " + header_ + " -->\n";
  if (nl == std::string::npos) x = comment + x;
  else x.insert(nl + 1, comment);
  put(p, x);
}

std::vector<NamedModel> model_specs(const RunConfig& cfg) {
  std::vector<NamedModel> out;
  std::set<std::string> names;
  for (const auto& spec : cfg.models) {
    NamedModel m;
    const auto eq = spec.find('=');
    if (eq != std::string::npos) {
      m.name = spec.substr(0, eq);
      m.path = spec.substr(eq + 1);
    } else {
      m.path = spec;
      m.name = m.path.stem().string();
    }
    if (m.name.empty() || m.path.empty()) throw InputError("--model: bad value '" + spec + "'");
    if (!names.insert(m.name).second) throw InputError("--model: duplicate model name '" + m.name + "'");
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> expand_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (item.empty() || item.front() != '@') {
      if (!trim(item).empty()) out.emplace_back(trim(item));
      continue;
    }
    const std::string path = item.substr(1);
    std::ifstream in(path);
    if (!in) throw InputError("cannot open word list " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
      if (!trim(line).empty()) out.emplace_back(trim(line));
    }
  }
  return out;
}

std::vector<EmbeddingModel> load_models(const RunConfig& cfg, const SeedLexicon* lexicon,
                                        const std::set<std::string>& extra_words) {
  const auto specs = model_specs(cfg);
  if (specs.empty()) throw InputError("--model is required");
  if (cfg.model_formats.size() > 1 && cfg.model_formats.size() != specs.size())
    throw InputError("--model-format: give one value or one per --model");

  std::optional<std::unordered_set<std::string>> filter;
  if (!cfg.vocab_filter.empty()) {
    filter.emplace();
    for (const auto& w : expand_list({"@" + cfg.vocab_filter})) {
      std::string f = fold(w);
      for (auto& c : f)
        if (c == ' ') c = '_';
      filter->insert(f);
    }
    if (lexicon)
      for (const auto& w : lexicon->excluded_words()) filter->insert(w);
    for (const auto& w : extra_words) filter->insert(fold(w));
  }

  std::vector<EmbeddingModel> models;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    LoadOptions o;
    o.name = specs[i].name;
    if (!cfg.model_formats.empty())
      o.format = parse_model_format(cfg.model_formats[cfg.model_formats.size() == 1 ? 0 : i]);
    else if (const auto ext = fold(specs[i].path.extension().string()); ext == ".txt" || ext == ".vec")
      o.format = ModelFormat::text;
    o.vocab_filter = filter;
    models.push_back(load_model(specs[i].path, o));
  }
  return models;
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

namespace {

json number_or_marker(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

json pair_json(const CandidatePair& p) {
  return {{"seed", p.seed},
          {"candidate", p.candidate},
          {"similarity", p.similarity},
          {"model", p.model_name},
          {"query_form", p.query_form},
          {"neighbor_token", p.neighbor_token}};
}

json candidates_json(const CandidateSet& set) {
  json list = json::array();
  for (const auto& c : set.candidates) {
    json prov = json::array();
    for (const auto& [model, ev] : c.evidence)
      prov.push_back({{"model", model}, {"best_similarity", ev.best_similarity}, {"seeds", ev.seeds}});
    list.push_back({{"word", c.word},
                    {"status", std::string(to_string(c.status))},
                    {"provenance", prov},
                    {"pmi", c.pmi ? number_or_marker(*c.pmi) : json(nullptr)},
                    {"tfidf", c.tfidf ? number_or_marker(*c.tfidf) : json(nullptr)},
                    {"no_evidence", c.no_evidence}});
  }
  return {{"count", set.candidates.size()}, {"candidates", list}};
}

CandidateSet candidates_from_json(const json& j) {
  CandidateSet set;
  try {
    for (const auto& item : j.at("candidates")) {
      Candidate c;
      c.word = item.at("word").get<std::string>();
      c.status = parse_status(item.value("status", std::string("unrated")));
      for (const auto& p : item.at("provenance")) {
        ModelEvidence ev;
        ev.best_similarity = p.at("best_similarity").get<double>();
        ev.seeds = p.at("seeds").get<std::vector<std::string>>();
        c.evidence[p.at("model").get<std::string>()] = ev;
      }
      auto score = [](const json& v) -> std::optional<double> {
        if (v.is_null()) return std::nullopt;
        if (v.is_string()) {
          const auto s = v.get<std::string>();
          if (s == "-inf") return -INFINITY;
          if (s == "inf") return INFINITY;
          throw InputError("bad score value '" + s + "'");
        }
        return v.get<double>();
      };
      if (item.contains("pmi")) c.pmi = score(item["pmi"]);
      if (item.contains("tfidf")) c.tfidf = score(item["tfidf"]);
      c.no_evidence = item.value("no_evidence", false);
      set.candidates.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("candidate file: ") + e.what());
  }
  std::sort(set.candidates.begin(), set.candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.word < b.word; });
  for (std::size_t i = 1; i < set.candidates.size(); ++i)
    if (set.candidates[i].word == set.candidates[i - 1].word)
      throw InputError("candidate file: duplicate word '" + set.candidates[i].word + "'");
  return set;
}

void write_candidates_tsv(std::ostream& out, const CandidateSet& set) {
  std::set<std::string> models;
  for (const auto& c : set.candidates)
    for (const auto& [m, ev] : c.evidence) models.insert(m);
  out << "word\tstatus\tseeds";
  for (const auto& m : models) out << "\tsimilarity_" << m;
  out << "\tpmi\ttfidf\n";
  for (const auto& c : set.candidates) {
    out << c.word << '\t' << to_string(c.status) << '\t';
    const auto seeds = c.contributing_seeds();
    for (std::size_t i = 0; i < seeds.size(); ++i) out << (i ? ";" : "") << seeds[i];
    for (const auto& m : models) {
      auto it = c.evidence.find(m);
      out << '\t' << (it == c.evidence.end() ? "" : fixed(it->second.best_similarity, 6));
    }
    out << '\t' << (c.pmi ? fixed(*c.pmi, 6) : "") << '\t' << (c.tfidf ? fixed(*c.tfidf, 6) : "")
        << '\n';
  }
}

void write_review_csv(std::ostream& out, const CandidateSet& set) {
  out << "word,judge1,judge2\n";
  for (const auto& c : set.candidates) out << c.word << ",,\n";
}

}  // namespace cuelex::cli
