#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using ladder::cli::CommandResult;

// Relation-dim follows entity-dim unless set explicitly, matching the usual
// square configuration of the factorization.
void bind_tucker_options(CLI::App* cmd, ladder::TuckerConfig& config, CLI::Option*& entity_dim,
                         CLI::Option*& relation_dim) {
  entity_dim = cmd->add_option("--entity-dim", config.entity_dim, "entity embedding width");
  relation_dim =
      cmd->add_option("--relation-dim", config.relation_dim,
                      "relation embedding width (defaults to --entity-dim)");
  cmd->add_option("--batch", config.batch_size, "queries per mini-batch");
  cmd->add_option("--iterations", config.iterations, "training epochs");
  cmd->add_option("--lr", config.learning_rate, "learning rate");
  cmd->add_option("--label-smoothing", config.label_smoothing, "target smoothing factor");
  cmd->add_option("--input-dropout", config.input_dropout, "dropout on the head embedding");
  cmd->add_option("--hidden-dropout1", config.hidden_dropout1,
                  "dropout on the relation-specific mixing matrix");
  cmd->add_option("--hidden-dropout2", config.hidden_dropout2, "dropout on the projected vector");
  cmd->add_option("--init-scale", config.init_scale, "uniform init half-width");
  cmd->add_option("--seed", config.seed, "training seed");
}

void fill_relation_dim(ladder::TuckerConfig& config, CLI::Option* entity_dim,
                       CLI::Option* relation_dim) {
  if (entity_dim->count() > 0 && relation_dim->count() == 0)
    config.relation_dim = config.entity_dim;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed threat knowledge graphs from CTI reports: ingest, technique mapping, "
               "link prediction, trends"};
  app.require_subcommand(1);
  app.fallthrough(true);
  const char* config_env = std::getenv("LADDER_CONFIG");
  CLI::Option* config_opt =
      app.set_config("--config", config_env ? config_env : "",
                     "TOML config; [section] names mirror subcommands, flags win");
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  ladder::cli::IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "clean reports into a document store");
  ingest_cmd->add_option("--input", ingest.input_dir, "directory of .html/.htm/.txt reports");
  ingest_cmd->add_option("--crawl-fixture", ingest.crawl_fixture,
                         "JSON page graph: {url: {body, links[]}}");
  ingest_cmd->add_option("--seed", ingest.seed_url, "crawl start url");
  ingest_cmd->add_option("--generations", ingest.generations, "link-following depth");
  ingest_cmd->add_option("--keyword", ingest.keywords, "relevance keyword (repeatable)");
  ingest_cmd->add_option("--window-words", ingest.window_words,
                         "keyword window in words, must exceed 100");
  ingest_cmd->add_option("--out", ingest.out_dir, "output directory")->required();
  ingest_cmd->add_flag("--strict", ingest.strict, "fail on the first unreadable file");

  ladder::cli::IocsArgs iocs;
  auto* iocs_cmd = app.add_subcommand("iocs", "extract indicators of compromise as JSON lines");
  iocs_cmd->add_option("--input", iocs.input, "text file or directory of .txt files")->required();
  iocs_cmd->add_option("--out", iocs.out, "output file (default stdout)");

  ladder::cli::MapArgs map_args;
  auto* map_cmd = app.add_subcommand("map", "map attack phrases to catalog technique ids");
  map_cmd->add_option("--phrases", map_args.phrases_file, "one candidate phrase per line");
  map_cmd->add_option("--tagged", map_args.tagged_file,
                      "JSON lines: {doc, sentence, tokens[], tags[]} with tags AP|O");
  map_cmd->add_option("--catalog", map_args.catalog_file, "technique catalog JSON")->required();
  map_cmd->add_option("--embeddings", map_args.embeddings_file,
                      "external vectors (name <TAB> components); default is the built-in provider");
  map_cmd->add_option("--dim", map_args.dim, "built-in embedding dimension");
  map_cmd->add_option("--tau", map_args.threshold, "mapping distance threshold");
  map_cmd->add_option("--title-weight", map_args.title_weight, "weight of the title distance");
  map_cmd->add_flag("--no-filter", map_args.no_filter, "skip the action-verb phrase filter");
  map_cmd->add_option("--verbs", map_args.verbs_file, "verb lexicon file (default built-in)");
  map_cmd->add_option("--out", map_args.out, "output file (default stdout)");
  map_cmd->add_flag("--pretty", map_args.pretty, "tab-separated table instead of JSON lines");

  auto* kg_cmd = app.add_subcommand("kg", "knowledge-graph construction and queries");
  kg_cmd->require_subcommand(1);

  ladder::cli::KgBuildArgs kg_build;
  auto* kg_build_cmd = kg_cmd->add_subcommand("build", "validate triples and build the graph");
  kg_build_cmd->add_option("--triples", kg_build.triple_files, "triple TSV file (repeatable)")
      ->required();
  kg_build_cmd->add_option("--rules", kg_build.rules_file,
                           "plausibility rules TSV (default built-in)");
  kg_build_cmd->add_option("--out", kg_build.out_dir, "output directory")->required();
  kg_build_cmd->add_flag("--no-cleanup", kg_build.no_cleanup,
                         "keep singleton and cross-class suspects");

  ladder::cli::KgQueryArgs kg_query;
  auto* kg_query_cmd = kg_cmd->add_subcommand("query", "list tails or heads of a relation");
  kg_query_cmd->add_option("--graph", kg_query.graph_dir, "graph directory")->required();
  kg_query_cmd->add_option("--relation", kg_query.relation, "relation name")->required();
  kg_query_cmd->add_option("--head", kg_query.head, "head entity name (query its tails)");
  kg_query_cmd->add_option("--head-class", kg_query.head_class, "head entity class");
  kg_query_cmd->add_option("--tail", kg_query.tail, "tail entity name (query its heads)");
  kg_query_cmd->add_option("--tail-class", kg_query.tail_class, "tail entity class");
  kg_query_cmd->add_option("--out", kg_query.out, "output file (default stdout)");
  kg_query_cmd->add_flag("--pretty", kg_query.pretty, "tab-separated table");

  ladder::cli::KgSimilarArgs kg_similar;
  auto* kg_similar_cmd =
      kg_cmd->add_subcommand("similar", "rank same-class entities by neighborhood overlap");
  kg_similar_cmd->add_option("--graph", kg_similar.graph_dir, "graph directory")->required();
  kg_similar_cmd->add_option("--entity", kg_similar.entity, "query entity name")->required();
  kg_similar_cmd->add_option("--class", kg_similar.entity_class, "query entity class")->required();
  kg_similar_cmd->add_option("-k,--top", kg_similar.k, "results to keep");
  kg_similar_cmd->add_flag("--direction-agnostic", kg_similar.direction_agnostic,
                           "ignore edge direction when comparing neighborhoods");
  kg_similar_cmd->add_option("--out", kg_similar.out, "output file (default stdout)");
  kg_similar_cmd->add_flag("--pretty", kg_similar.pretty, "tab-separated table");

  auto* tucker_cmd = app.add_subcommand("tucker", "link-prediction model lifecycle");
  tucker_cmd->require_subcommand(1);

  ladder::cli::TuckerTrainArgs train;
  auto* train_cmd = tucker_cmd->add_subcommand("train", "train the link predictor");
  train_cmd->add_option("--triples", train.triples_file, "triple TSV file");
  train_cmd->add_option("--graph", train.graph_dir, "graph directory (alternative input)");
  train_cmd->add_option("--out", train.out_model, "model output file")->required();
  CLI::Option *train_ed, *train_rd;
  bind_tucker_options(train_cmd, train.config, train_ed, train_rd);

  ladder::cli::TuckerSplitArgs split;
  auto* split_cmd = tucker_cmd->add_subcommand("split", "hold out a test set of link triples");
  split_cmd->add_option("--triples", split.triples_file, "triple TSV file")->required();
  split_cmd->add_option("--fraction", split.fraction, "held-out fraction of the candidate pool");
  split_cmd->add_option("--seed", split.seed, "shuffle seed");
  split_cmd->add_option("--train-out", split.train_out, "training triples output")->required();
  split_cmd->add_option("--test-out", split.test_out, "test triples output")->required();

  ladder::cli::TuckerLeaveOutArgs leave_out;
  auto* leave_out_cmd =
      tucker_cmd->add_subcommand("leave-out", "remove one malware's attack-pattern usages");
  leave_out_cmd->add_option("--triples", leave_out.triples_file, "triple TSV file")->required();
  leave_out_cmd->add_option("--malware", leave_out.malware, "malware entity name")->required();
  leave_out_cmd->add_option("--remaining-out", leave_out.remaining_out, "kept triples output")
      ->required();
  leave_out_cmd->add_option("--removed-out", leave_out.removed_out, "removed triples output")
      ->required();

  ladder::cli::TuckerPredictArgs predict;
  auto* predict_cmd = tucker_cmd->add_subcommand("predict", "rank candidate tails for a query");
  predict_cmd->add_option("--model", predict.model_file, "trained model file")->required();
  predict_cmd->add_option("--head", predict.head, "head entity name")->required();
  predict_cmd->add_option("--class", predict.head_class, "head entity class")->required();
  predict_cmd->add_option("--relation", predict.relation, "relation name")->required();
  predict_cmd->add_option("-k,--top", predict.k, "predictions to keep");
  predict_cmd->add_option("--tail-class", predict.tail_classes,
                          "restrict competing tails to this class (repeatable)");
  predict_cmd->add_option("--known", predict.known_file,
                          "triples whose answers are hidden from the ranking");
  predict_cmd->add_option("--out", predict.out, "output file (default stdout)");
  predict_cmd->add_flag("--pretty", predict.pretty, "tab-separated table");

  ladder::cli::TuckerEvalArgs eval;
  auto* eval_cmd = tucker_cmd->add_subcommand("eval", "rank test triples and report MRR/hits");
  eval_cmd->add_option("--model", eval.model_file, "trained model file")->required();
  eval_cmd->add_option("--test", eval.test_file, "test triple TSV")->required();
  eval_cmd->add_option("--known", eval.known_files,
                       "known-true triple TSV for filtered ranking (repeatable)");
  eval_cmd->add_flag("--raw", eval.raw, "raw ranking (no filtering of known tails)");
  eval_cmd->add_option("--hits", eval.hits_at, "hits@n cutoffs (repeatable; default 3 10 30)");
  eval_cmd->add_option("--out", eval.out, "also write the report to a file");

  ladder::cli::TrendsArgs trends;
  auto* trends_cmd = app.add_subcommand("trends", "technique usage shares per year");
  trends_cmd
      ->add_option("--observations", trends.observations_file,
                   "TSV: malware <TAB> technique <TAB> year")
      ->required();
  trends_cmd->add_option("--out", trends.out, "output file (default stdout)");
  trends_cmd->add_flag("--pretty", trends.pretty, "tab-separated table");

  ladder::cli::PipelineArgs pipeline;
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "ingest, map, build the graph, train, and evaluate");
  pipeline_cmd->add_option("--triples", pipeline.triples, "triple TSV file")->required();
  pipeline_cmd->add_option("--out", pipeline.out_dir, "output directory")->required();
  pipeline_cmd->add_option("--corpus", pipeline.corpus, "directory of reports to ingest");
  pipeline_cmd->add_option("--crawl-fixture", pipeline.crawl_fixture, "JSON page graph");
  pipeline_cmd->add_option("--seed-url", pipeline.seed_url, "crawl start url");
  pipeline_cmd->add_option("--keyword", pipeline.keywords, "relevance keyword (repeatable)");
  pipeline_cmd->add_option("--window-words", pipeline.window_words, "keyword window in words");
  pipeline_cmd->add_option("--generations", pipeline.generations, "crawl depth");
  pipeline_cmd->add_option("--catalog", pipeline.catalog, "technique catalog JSON");
  pipeline_cmd->add_option("--phrases", pipeline.phrases, "phrase file for the map stage");
  pipeline_cmd->add_option("--tagged", pipeline.tagged, "tagged-token JSON lines");
  pipeline_cmd->add_option("--embeddings", pipeline.embeddings, "external embedding vectors");
  pipeline_cmd->add_option("--rules", pipeline.rules, "plausibility rules TSV");
  pipeline_cmd->add_option("--dim", pipeline.dim, "built-in embedding dimension");
  pipeline_cmd->add_option("--tau", pipeline.threshold, "mapping distance threshold");
  pipeline_cmd->add_option("--title-weight", pipeline.title_weight, "title distance weight");
  pipeline_cmd->add_flag("--no-filter", pipeline.no_filter, "skip the action-verb filter");
  pipeline_cmd->add_option("--verbs", pipeline.verbs, "verb lexicon file");
  pipeline_cmd->add_flag("--no-cleanup", pipeline.no_cleanup, "keep graph cleanup candidates");
  pipeline_cmd->add_option("--fraction", pipeline.fraction, "held-out test fraction");
  pipeline_cmd->add_option("--split-seed", pipeline.split_seed, "split shuffle seed");
  pipeline_cmd->add_flag("--raw-eval", pipeline.raw_eval, "evaluate without filtering");
  pipeline_cmd->add_flag("--skip-train", pipeline.skip_train,
                         "stop after the graph stage (KG artifacts only)");
  CLI::Option *pipe_ed, *pipe_rd;
  bind_tucker_options(pipeline_cmd, pipeline.tucker, pipe_ed, pipe_rd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json err{{"error", {{"message", std::string(e.what())}, {"type", "usage"}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    CommandResult result;
    if (*ingest_cmd) {
      result = run_ingest(ingest);
    } else if (*iocs_cmd) {
      result = run_iocs(iocs);
    } else if (*map_cmd) {
      result = run_map(map_args);
    } else if (*kg_cmd) {
      if (*kg_build_cmd)
        result = run_kg_build(kg_build);
      else if (*kg_query_cmd)
        result = run_kg_query(kg_query);
      else
        result = run_kg_similar(kg_similar);
    } else if (*tucker_cmd) {
      if (*train_cmd) {
        fill_relation_dim(train.config, train_ed, train_rd);
        result = run_tucker_train(train);
      } else if (*split_cmd) {
        result = run_tucker_split(split);
      } else if (*leave_out_cmd) {
        result = run_tucker_leave_out(leave_out);
      } else if (*predict_cmd) {
        result = run_tucker_predict(predict);
      } else {
        result = run_tucker_eval(eval);
      }
    } else if (*trends_cmd) {
      result = run_trends(trends);
    } else {
      fill_relation_dim(pipeline.tucker, pipe_ed, pipe_rd);
      if (config_opt->count() > 0)
        pipeline.config_file = config_opt->as<std::string>();
      else if (config_env && std::filesystem::exists(config_env))
        pipeline.config_file = config_env;
      result = run_pipeline(pipeline);
    }
    if (!result.summary.is_null()) std::cout << result.summary.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err{
        {"error", {{"message", std::string(e.what())}, {"type", ladder::cli::error_kind(e)}}}};
    std::cerr << err.dump() << "\n";
    return ladder::cli::exit_code_for(e);
  }
}
