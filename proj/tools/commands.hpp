#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/tucker.hpp"

namespace ladder::cli {

// What a command produced: a machine-readable summary for stdout and the
// files it wrote, relative to its output directory. The pipeline command
// reuses the per-stage runners and hashes `files` into its run manifest.
struct CommandResult {
  nlohmann::json summary;
  std::vector<std::string> files;
};

struct IngestArgs {
  std::string input_dir;      // directory of .html/.htm/.txt reports
  std::string crawl_fixture;  // JSON page-graph fixture, alternative input
  std::string seed_url;
  int generations = 1;
  std::vector<std::string> keywords;  // empty = built-in default list
  int window_words = 150;
  std::string out_dir;
  bool strict = false;
};
CommandResult run_ingest(const IngestArgs& args);

struct IocsArgs {
  std::string input;  // text file or directory of .txt files
  std::string out;    // empty = stdout
};
CommandResult run_iocs(const IocsArgs& args);

struct MapArgs {
  std::string phrases_file;  // one candidate phrase per line
  std::string tagged_file;   // JSON lines of tagged token sequences
  std::string catalog_file;
  std::string embeddings_file;  // external vectors; empty = hashed provider
  int dim = 256;
  double threshold = 0.6;
  double title_weight = 0.4;
  bool no_filter = false;
  std::string verbs_file;  // empty = built-in lexicon
  std::string out;         // empty = stdout
  bool pretty = false;
};
CommandResult run_map(const MapArgs& args);

struct KgBuildArgs {
  std::vector<std::string> triple_files;
  std::string rules_file;  // empty = built-in plausibility table
  std::string out_dir;
  bool no_cleanup = false;
};
CommandResult run_kg_build(const KgBuildArgs& args);

struct KgQueryArgs {
  std::string graph_dir;
  std::string relation;
  std::string head, head_class;  // one endpoint given, the other queried
  std::string tail, tail_class;
  std::string out;
  bool pretty = false;
};
CommandResult run_kg_query(const KgQueryArgs& args);

struct KgSimilarArgs {
  std::string graph_dir;
  std::string entity;
  std::string entity_class;
  std::size_t k = 10;
  bool direction_agnostic = false;
  std::string out;
  bool pretty = false;
};
CommandResult run_kg_similar(const KgSimilarArgs& args);

struct TuckerTrainArgs {
  std::string triples_file;  // exactly one of triples_file / graph_dir
  std::string graph_dir;
  TuckerConfig config;
  std::string out_model;
};
CommandResult run_tucker_train(const TuckerTrainArgs& args);

struct TuckerSplitArgs {
  std::string triples_file;
  double fraction = 0.25;
  std::uint64_t seed = 1;
  std::string train_out;
  std::string test_out;
};
CommandResult run_tucker_split(const TuckerSplitArgs& args);

struct TuckerLeaveOutArgs {
  std::string triples_file;
  std::string malware;
  std::string remaining_out;
  std::string removed_out;
};
CommandResult run_tucker_leave_out(const TuckerLeaveOutArgs& args);

struct TuckerPredictArgs {
  std::string model_file;
  std::string head;
  std::string head_class;
  std::string relation;
  std::size_t k = 10;
  std::vector<std::string> tail_classes;  // empty = all classes compete
  std::string known_file;  // triples whose tails are hidden from the ranking
  std::string out;
  bool pretty = false;
};
CommandResult run_tucker_predict(const TuckerPredictArgs& args);

struct TuckerEvalArgs {
  std::string model_file;
  std::string test_file;
  std::vector<std::string> known_files;  // extra true triples for filtering
  bool raw = false;
  std::vector<int> hits_at = {3, 10, 30};
  std::string out;  // report always printed; out writes it to a file too
};
CommandResult run_tucker_eval(const TuckerEvalArgs& args);

struct TrendsArgs {
  std::string observations_file;  // TSV: malware, technique, year
  std::string out;
  bool pretty = false;
};
CommandResult run_trends(const TrendsArgs& args);

struct PipelineArgs {
  // Stage inputs; triples feed the graph, the rest are optional.
  std::string triples;
  std::string corpus;
  std::string crawl_fixture, seed_url;
  std::vector<std::string> keywords;
  int window_words = 150;
  int generations = 1;
  std::string catalog;
  std::string phrases, tagged;
  std::string embeddings;
  std::string rules;
  int dim = 256;
  double threshold = 0.6;
  double title_weight = 0.4;
  bool no_filter = false;
  std::string verbs;
  bool no_cleanup = false;
  TuckerConfig tucker;
  double fraction = 0.25;
  std::uint64_t split_seed = 1;
  bool raw_eval = false;
  bool skip_train = false;
  std::string out_dir;
  std::string config_file;  // hashed into the manifest when one was read
};
CommandResult run_pipeline(const PipelineArgs& args);

// Stable error taxonomy for the JSON error report and the exit-code
// contract: configuration and usage mistakes exit 2, everything else 1.
const char* error_kind(const std::exception& e);
int exit_code_for(const std::exception& e);

}  // namespace ladder::cli
