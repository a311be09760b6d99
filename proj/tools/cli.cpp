#include <CLI11.hpp>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <map>

#include "cli.hpp"
#include "cuelex/common.hpp"
#include "cuelex/kernels.hpp"

namespace cuelex::cli {

namespace {

/// Reads a flat JSON object whose keys are long flag names.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& r = opt->results();
        if (opt->get_expected_max() > 1) j[name] = r;
        else j[name] = r.empty() ? "" : r.back();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      for (auto& c : item.name)
        if (c == '_') c = '-';
      auto scalar = [&](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("config file: unsupported value for '" + key + "'");
      };
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      items.push_back(std::move(item));
    }
    return items;
  }
};

using Command = int (*)(const RunConfig&);

struct Entry {
  const char* name;
  const char* help;
  Command fn;
};

const Entry kCommands[] = {
    {"expand", "nearest neighbours of every seed in each model", cmd_expand},
    {"intersect", "candidates proposed by two models", cmd_intersect},
    {"score", "PMI and TF-IDF against a corpus", cmd_score},
    {"pipeline", "expand two models, intersect, optionally score", cmd_pipeline},
    {"split", "split a corpus by indicator cues", cmd_split},
    {"ratios", "per-word frequency ratios between the split halves", cmd_ratios},
    {"relscore", "baseline-relative word scores per collection", cmd_relscore},
    {"rates", "share of items matching any query word", cmd_rates},
    {"find", "example sentences for cue words", cmd_find},
    {"graph", "build the seed/candidate graph", cmd_graph},
    {"cluster", "Louvain communities", cmd_cluster},
    {"rank", "weighted PageRank", cmd_rank},
    {"export", "re-export a stored graph", cmd_export},
    {"agree", "inter-annotator agreement", cmd_agree},
    {"dataset", "labelled embedding dataset", cmd_dataset},
    {"train", "cross-validated classifiers", cmd_train},
    {"pca", "principal components of a score matrix", cmd_pca},
    {"mds", "metric MDS of a score matrix", cmd_mds},
};

void bind(CLI::App& app, RunConfig& c) {
  app.add_option("--model", c.models, "embedding model, NAME=PATH or PATH (repeatable)");
  app.add_option("--model-format", c.model_formats, "binary or text; one value or one per model (default: text for .txt/.vec, else binary)");
  app.add_option("--vocab-filter", c.vocab_filter, "keep only words listed in this file");
  app.add_option("--seeds", c.seeds, "seed lexicon");
  app.add_option("--k", c.k, "neighbours per seed form")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--pairs", c.pairs, "pairs TSV (repeatable)");
  app.add_option("--candidates", c.candidates, "candidates JSON");
  app.add_option("--corpus", c.corpus, "JSONL corpus or manifest");
  app.add_option("--collections", c.collections, "collection manifest");
  app.add_option("--indicators", c.indicators, "indicator cues; @file reads a list");
  app.add_option("--words", c.words, "words or patterns; @file reads a list");
  app.add_option("--baseline", c.baseline, "baseline word for relscore")->capture_default_str();
  app.add_option("--limit", c.limit, "sentences per cue")->capture_default_str();
  app.add_flag("--balance", c.balance, "downsample the larger split half");
  app.add_option("--annotations", c.annotations, "annotation CSV");
  app.add_option("--nodes", c.nodes, "node TSV");
  app.add_option("--edges", c.edges, "edge TSV");
  app.add_option("--augment-threshold", c.augment_threshold, "add edges above this similarity")
      ->capture_default_str();
  app.add_option("--resolution", c.resolution, "Louvain resolution")->capture_default_str();
  app.add_option("--damping", c.damping, "PageRank damping")->capture_default_str();
  app.add_option("--tol", c.tol, "convergence tolerance")->capture_default_str();
  app.add_option("--max-iter", c.max_iter, "PageRank iteration cap")->capture_default_str();
  app.add_option("--format", c.format, "gexf, node_tsv or edge_tsv")->capture_default_str();
  app.add_option("--dataset", c.dataset, "dataset TSV");
  app.add_flag("--include-seeds", c.include_seeds, "add seed forms as positives");
  app.add_option("--unrelated", c.unrelated, "unrelated words to sample")->capture_default_str();
  app.add_option("--max-sim", c.max_sim, "similarity ceiling for unrelated words")->capture_default_str();
  app.add_option("--folds", c.folds, "cross-validation folds")->capture_default_str();
  app.add_option("--classifier", c.classifiers, "knn[:k=N], nb, logistic, mlp[:hidden=..] (repeatable)")
      ->capture_default_str();
  app.add_option("--matrix", c.matrix, "score matrix TSV");
  app.add_option("--components", c.components, "PCA components")->capture_default_str();
  app.add_flag("--no-standardize", c.no_standardize, "center only");
  app.add_option("--top", c.top, "loadings to report per component")->capture_default_str();
  app.add_option("--p", c.p, "Minkowski exponent (inf allowed)")->capture_default_str();
  app.add_option("--dims", c.dims, "MDS dimensions")->capture_default_str();
  app.add_option("--mds-max-iter", c.mds_max_iter, "SMACOF iteration cap")->capture_default_str();
  app.add_option("--rng-seed", c.rng_seed, "seed for every random choice")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "OpenMP threads, 0 = runtime default")->capture_default_str();
  app.add_flag("--reproducible", c.reproducible, "omit timestamps from outputs");
}

}  // namespace

int run(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("cuelex");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"lexicon expansion, corpus analytics and cue graphs", "cuelex"};
  app.set_version_flag("--version", "cuelex " + std::string(kVersion));
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of flag values; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;
  bind(app, cfg);
  std::map<std::string, Command> dispatch;
  for (const auto& e : kCommands) {
    app.add_subcommand(e.name, e.help)->fallthrough();
    dispatch[e.name] = e.fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (auto* opt = app.get_config_ptr(); opt && opt->count() > 0) cfg.config = opt->as<std::string>();

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    kernels::set_threads(cfg.threads);
    return dispatch.at(name)(cfg);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 2;
  }
}

}  // namespace cuelex::cli
