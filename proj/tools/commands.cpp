#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ladder/catalog.hpp"
#include "ladder/crawl.hpp"
#include "ladder/dataset_split.hpp"
#include "ladder/dates.hpp"
#include "ladder/document.hpp"
#include "ladder/embedding.hpp"
#include "ladder/errors.hpp"
#include "ladder/graph.hpp"
#include "ladder/html.hpp"
#include "ladder/ioc.hpp"
#include "ladder/mapping.hpp"
#include "ladder/phrase.hpp"
#include "ladder/text.hpp"
#include "ladder/triple_io.hpp"
#include "ladder/trends.hpp"
#include "ladder/tucker_eval.hpp"
#include "ladder/tucker_train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ladder::cli {
namespace {

// Referenced paths must resolve before any work starts; a missing input is a
// configuration mistake, not a runtime failure.
void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) throw ContractError(what + " is required");
  if (!fs::exists(path)) throw ContractError(what + " not found: " + path);
}

std::vector<std::string> default_keywords() {
  return {"malware", "trojan", "ransomware", "spyware", "botnet", "phishing", "backdoor", "APT"};
}

std::vector<std::string> effective_keywords(const std::vector<std::string>& given) {
  return given.empty() ? default_keywords() : given;
}

EntityClass parse_entity_class(const std::string& name, const std::string& what) {
  auto cls = entity_class_from(name);
  if (!cls) throw ContractError(what + ": unknown entity class '" + name + "'");
  return *cls;
}

RelationType parse_relation(const std::string& name) {
  auto rel = relation_from(name);
  if (!rel) throw ContractError("unknown relation '" + name + "'");
  return *rel;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Splits file content into lines, tolerating CRLF and a missing final newline.
std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines = split(read_file(path), '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines)
    if (!line.empty() && line.back() == '\r') line.pop_back();
  return lines;
}

// JSON-lines or a tab-separated table, to --out or stdout. Returns the list
// of files written so callers can manifest them.
std::vector<std::string> emit(const std::string& out, const std::string& payload) {
  if (out.empty()) {
    std::cout << payload;
    return {};
  }
  if (auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_file(out, payload);
  return {out};
}

std::string doc_id_from_url(std::string_view url) {
  if (auto pos = url.find("://"); pos != std::string_view::npos) url.remove_prefix(pos + 3);
  std::string id;
  for (char c : url) id += is_ascii_alnum(c) || c == '.' || c == '_' || c == '-' ? c : '_';
  return id.empty() ? "doc" : id;
}

json ioc_record(const std::string& doc, const IocHit& hit) {
  return {{"begin", hit.begin}, {"doc", doc},   {"end", hit.end},
          {"text", hit.text},   {"type", to_string(hit.type)}};
}

// Exact-lookup provider over externally computed vectors; any text missing
// from the table is an error rather than a silent fallback.
class LookupProvider final : public EmbeddingProvider {
 public:
  explicit LookupProvider(EmbeddingLoadResult loaded)
      : dim_(loaded.dimension), vectors_(std::move(loaded.vectors)) {
    if (vectors_.empty()) throw ContractError("embeddings file holds no usable vectors");
  }

  Eigen::Index dimension() const override { return dim_; }

  EmbeddingVector embed(std::string_view text) const override {
    auto it = vectors_.find(std::string(text));
    if (it == vectors_.end())
      throw ContractError("no external embedding for \"" + std::string(text) + "\"");
    return it->second;
  }

 private:
  Eigen::Index dim_;
  std::map<std::string, EmbeddingVector> vectors_;
};

struct TripleSource {
  EntityStore store;
  std::vector<Triple> triples;
  std::size_t rejections = 0;
};

TripleSource load_triple_source(const std::string& triples_file, const std::string& graph_dir) {
  if (triples_file.empty() == graph_dir.empty())
    throw ContractError("exactly one of --triples and --graph is required");
  TripleSource src;
  if (!graph_dir.empty()) {
    require_input(graph_dir, "--graph");
    auto graph = KnowledgeGraph::load(graph_dir);
    src.store = graph.entities();
    src.triples = graph.triples();
  } else {
    require_input(triples_file, "--triples");
    auto parsed = parse_triples_file(triples_file);
    src.store = std::move(parsed.entities);
    src.triples = std::move(parsed.triples);
    src.rejections = parsed.rejections.size();
  }
  return src;
}

}  // namespace

CommandResult run_ingest(const IngestArgs& args) {
  if (args.out_dir.empty()) throw ContractError("--out is required");
  const bool dir_mode = !args.input_dir.empty();
  if (dir_mode == !args.crawl_fixture.empty())
    throw ContractError("ingest takes exactly one of --input and --crawl-fixture");

  struct Ingested {
    Document doc;
    std::string source;
  };
  std::vector<Ingested> docs;
  std::vector<std::string> warnings;
  json manifest{{"format_version", 1}};

  std::set<std::string> used_ids;
  auto unique_id = [&](std::string base) {
    if (base.empty()) base = "doc";
    std::string id = base;
    for (int n = 2; !used_ids.insert(id).second; ++n) id = base + "_" + std::to_string(n);
    return id;
  };

  if (dir_mode) {
    require_input(args.input_dir, "--input");
    if (!fs::is_directory(args.input_dir))
      throw ContractError("--input is not a directory: " + args.input_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.input_dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = to_lower(entry.path().extension().string());
      if (ext == ".html" || ext == ".htm" || ext == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    manifest["mode"] = "files";
    for (const auto& file : files) {
      std::string raw;
      try {
        raw = read_file(file);
      } catch (const IoError& e) {
        if (args.strict) throw;
        warnings.push_back(file.filename().generic_string() + ": " + e.what());
        continue;
      }
      Ingested item;
      item.doc.id = unique_id(file.stem().generic_string());
      item.doc.text = clean_html(raw);
      item.doc.year = extract_year(item.doc);
      item.source = file.filename().generic_string();
      docs.push_back(std::move(item));
    }
  } else {
    require_input(args.crawl_fixture, "--crawl-fixture");
    if (args.seed_url.empty()) throw ContractError("--seed is required with --crawl-fixture");
    auto provider = FixtureProvider::from_file(args.crawl_fixture);
    CrawlOptions options;
    options.generations = args.generations;
    options.window_words = args.window_words;
    for (const auto& k : effective_keywords(args.keywords)) options.keywords.insert(k);
    CrawlResult crawled = crawl(args.seed_url, provider, options);
    manifest["mode"] = "crawl";
    manifest["visited"] = crawled.visited;
    manifest["failed"] = crawled.failed;
    for (const auto& page : crawled.saved) {
      Ingested item;
      item.doc.id = unique_id(doc_id_from_url(page.url));
      item.doc.url = page.url;
      item.doc.text = clean_html(page.body);
      item.doc.year = extract_year(item.doc);
      item.source = page.url;
      docs.push_back(std::move(item));
    }
  }

  const fs::path out = args.out_dir;
  fs::create_directories(out / "docs");
  CommandResult result;
  json documents = json::array();
  std::string ioc_lines;
  std::size_t ioc_count = 0;
  for (const auto& item : docs) {
    const std::string rel = "docs/" + item.doc.id + ".txt";
    write_file(out / rel, item.doc.text + "\n");
    result.files.push_back((out / rel).generic_string());
    json entry{{"file", rel},
               {"id", item.doc.id},
               {"source", item.source},
               {"year", item.doc.year ? json(*item.doc.year) : json(nullptr)}};
    if (item.doc.url) entry["url"] = *item.doc.url;
    documents.push_back(std::move(entry));
    for (const auto& hit : extract_iocs(item.doc.text)) {
      ioc_lines += ioc_record(item.doc.id, hit).dump() + "\n";
      ++ioc_count;
    }
  }
  manifest["documents"] = std::move(documents);
  manifest["warnings"] = warnings;

  write_file(out / "iocs.jsonl", ioc_lines);
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  result.files.push_back((out / "iocs.jsonl").generic_string());
  result.files.push_back((out / "manifest.json").generic_string());

  result.summary = {{"documents", docs.size()},
                    {"format_version", 1},
                    {"iocs", ioc_count},
                    {"warnings", warnings.size()}};
  return result;
}

CommandResult run_iocs(const IocsArgs& args) {
  require_input(args.input, "--input");
  std::vector<fs::path> files;
  if (fs::is_directory(args.input)) {
    for (const auto& entry : fs::directory_iterator(args.input)) {
      if (!entry.is_regular_file()) continue;
      if (to_lower(entry.path().extension().string()) == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(args.input);
  }

  std::string payload;
  std::size_t hits = 0;
  for (const auto& file : files) {
    const std::string doc = file.stem().generic_string();
    for (const auto& hit : extract_iocs(read_file(file))) {
      payload += ioc_record(doc, hit).dump() + "\n";
      ++hits;
    }
  }

  CommandResult result;
  result.files = emit(args.out, payload);
  if (!args.out.empty())
    result.summary = {{"documents", files.size()}, {"format_version", 1}, {"hits", hits}};
  return result;
}

CommandResult run_map(const MapArgs& args) {
  require_input(args.catalog_file, "--catalog");
  if (args.phrases_file.empty() == args.tagged_file.empty())
    throw ContractError("map takes exactly one of --phrases and --tagged");
  if (!(args.threshold >= 0.0)) throw ContractError("--tau must be >= 0");

  auto catalog = load_catalog(args.catalog_file);
  std::unique_ptr<EmbeddingProvider> provider;
  std::size_t embedding_rejections = 0;
  if (!args.embeddings_file.empty()) {
    require_input(args.embeddings_file, "--embeddings");
    std::ifstream in(args.embeddings_file);
    if (!in) throw IoError("cannot open embeddings file: " + args.embeddings_file);
    auto loaded = load_embeddings(in);
    embedding_rejections = loaded.rejections.size();
    provider = std::make_unique<LookupProvider>(std::move(loaded));
  } else {
    provider = std::make_unique<HashedEmbeddingProvider>(args.dim);
  }
  auto embedded = embed_catalog(catalog, *provider);

  std::vector<AttackPhrase> phrases;
  if (!args.phrases_file.empty()) {
    require_input(args.phrases_file, "--phrases");
    const std::string doc = fs::path(args.phrases_file).stem().generic_string();
    auto lines = read_lines(args.phrases_file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string text = trim(lines[i]);
      if (text.empty() || text[0] == '#') continue;
      AttackPhrase phrase;
      phrase.doc_id = doc;
      phrase.sentence_index = static_cast<int>(i + 1);
      phrase.token_end = split_whitespace(text).size();
      phrase.text = std::move(text);
      phrases.push_back(std::move(phrase));
    }
  } else {
    require_input(args.tagged_file, "--tagged");
    auto lines = read_lines(args.tagged_file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      json record;
      try {
        record = json::parse(lines[i]);
      } catch (const json::exception& e) {
        throw ParseError(std::string("tagged input is not valid JSON: ") + e.what(), i + 1);
      }
      if (!record.is_object() || !record.contains("tokens") || !record.contains("tags"))
        throw ParseError("tagged record needs tokens and tags arrays", i + 1);
      std::vector<std::string> tokens;
      std::vector<TokenTag> tags;
      for (const auto& tok : record["tokens"]) {
        if (!tok.is_string() || tok.get<std::string>().empty())
          throw ParseError("tokens must be non-empty strings", i + 1);
        tokens.push_back(tok.get<std::string>());
      }
      for (const auto& tag : record["tags"]) {
        const std::string name = tag.is_string() ? tag.get<std::string>() : "";
        if (name == "AP")
          tags.push_back(TokenTag::AttackPattern);
        else if (name == "O")
          tags.push_back(TokenTag::Outside);
        else
          throw ParseError("tags must be \"AP\" or \"O\"", i + 1);
      }
      if (tokens.size() != tags.size())
        throw ParseError("tokens and tags lengths differ", i + 1);
      auto merged = merge_tagged_spans(tokens, tags, record.value("doc", std::string("doc")),
                                       record.value("sentence", 0));
      phrases.insert(phrases.end(), merged.begin(), merged.end());
    }
  }

  std::vector<bool> kept(phrases.size(), true);
  if (!args.no_filter) {
    std::set<std::string> file_lexicon;
    const std::set<std::string>* lexicon = &default_verb_lexicon();
    if (!args.verbs_file.empty()) {
      require_input(args.verbs_file, "--verbs");
      file_lexicon = load_verb_lexicon(args.verbs_file);
      lexicon = &file_lexicon;
    }
    auto surviving = filter_invalid_phrases(phrases, *lexicon);
    std::size_t next = 0;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
      if (next < surviving.size() && surviving[next] == phrases[i])
        ++next;
      else
        kept[i] = false;
    }
  }

  // Nearest technique is always reported; the threshold only decides whether
  // the phrase counts as mapped.
  const MappingConfig nearest{args.title_weight, std::numeric_limits<double>::infinity()};
  std::string payload;
  std::ostringstream table;
  if (args.pretty) table << "doc\tsentence\tkept\ttechnique\tdistance\tphrase\n";
  std::size_t kept_count = 0;
  std::size_t mapped_count = 0;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    const auto& phrase = phrases[i];
    json record{{"doc", phrase.doc_id},
                {"sentence", phrase.sentence_index},
                {"phrase", phrase.text},
                {"kept", static_cast<bool>(kept[i])}};
    std::string pretty_technique = "-";
    std::string pretty_distance = "-";
    if (!kept[i]) {
      record["reason"] = "no action verb";
      record["nearest"] = nullptr;
      record["distance"] = nullptr;
      record["technique"] = nullptr;
      record["mapped"] = false;
    } else {
      ++kept_count;
      auto best = map_phrase(provider->embed(phrase.text), embedded, nearest);
      const bool mapped = best->distance < args.threshold;
      if (mapped) ++mapped_count;
      record["reason"] = nullptr;
      record["nearest"] = best->technique_id;
      record["distance"] = best->distance;
      record["technique"] = mapped ? json(best->technique_id) : json(nullptr);
      record["mapped"] = mapped;
      if (mapped) pretty_technique = best->technique_id;
      pretty_distance = fixed6(best->distance);
    }
    if (args.pretty)
      table << phrase.doc_id << '\t' << phrase.sentence_index << '\t'
            << (kept[i] ? "yes" : "no") << '\t' << pretty_technique << '\t' << pretty_distance
            << '\t' << phrase.text << '\n';
    else
      payload += record.dump() + "\n";
  }

  CommandResult result;
  result.files = emit(args.out, args.pretty ? table.str() : payload);
  if (!args.out.empty()) {
    result.summary = {{"format_version", 1},
                      {"kept", kept_count},
                      {"mapped", mapped_count},
                      {"phrases", phrases.size()}};
    if (!args.embeddings_file.empty()) result.summary["embedding_rejections"] = embedding_rejections;
  }
  return result;
}

CommandResult run_kg_build(const KgBuildArgs& args) {
  if (args.triple_files.empty()) throw ContractError("at least one --triples file is required");
  if (args.out_dir.empty()) throw ContractError("--out is required");
  PlausibilityTable table = args.rules_file.empty() ? PlausibilityTable::builtin()
                                                    : PlausibilityTable::from_file(args.rules_file);

  // Merge all files into one store; mention counts and surface forms add up.
  EntityStore store;
  std::vector<Triple> triples;
  json parse_rejections = json::array();
  std::size_t parse_duplicates = 0;
  for (const auto& file : args.triple_files) {
    require_input(file, "--triples");
    auto parsed = parse_triples_file(file, table);
    parse_duplicates += parsed.duplicates_merged;
    std::vector<EntityId> remap(parsed.entities.size(), kNoEntity);
    for (const auto& entity : parsed.entities.entities()) {
      EntityId id = store.intern(entity.canonical_name, entity.entity_class);
      auto& merged = store.get_mutable(id);
      merged.mention_count += entity.mention_count;
      merged.surface_forms.insert(entity.surface_forms.begin(), entity.surface_forms.end());
      remap[static_cast<std::size_t>(entity.id)] = id;
    }
    for (Triple t : parsed.triples) {
      t.head = remap[static_cast<std::size_t>(t.head)];
      t.tail = remap[static_cast<std::size_t>(t.tail)];
      triples.push_back(std::move(t));
    }
    for (const auto& r : parsed.rejections)
      parse_rejections.push_back({{"content", r.content},
                                  {"file", fs::path(file).filename().generic_string()},
                                  {"line", r.line},
                                  {"reason", r.reason}});
  }

  BuildOptions options;
  options.cleanup = !args.no_cleanup;
  options.table = &table;
  KnowledgeGraph graph = KnowledgeGraph::build(store, triples, options);

  const fs::path out = args.out_dir;
  fs::create_directories(out);
  graph.save(out);

  json removed = json::array();
  for (const auto& r : graph.audit().removed_entities)
    removed.push_back(
        {{"class", to_string(r.entity_class)}, {"name", r.name}, {"reason", r.reason}});
  json rejected = json::array();
  for (const auto& r : graph.audit().rejected_triples) {
    const auto& head = store.get(r.triple.head);
    const auto& tail = store.get(r.triple.tail);
    rejected.push_back({{"head", head.canonical_name},
                        {"head_class", to_string(head.entity_class)},
                        {"reason", r.reason},
                        {"relation", to_string(r.triple.relation)},
                        {"tail", tail.canonical_name},
                        {"tail_class", to_string(tail.entity_class)}});
  }
  // Duplicate lines within one file fold at parse time; duplicates across
  // files fold at build time. Report the total either way.
  const std::size_t duplicates_merged = parse_duplicates + graph.audit().duplicates_merged;
  json audit{{"duplicates_merged", duplicates_merged},
             {"format_version", 1},
             {"parse_rejections", parse_rejections},
             {"rejected_triples", rejected},
             {"removed_entities", removed}};
  write_file(out / "audit.json", audit.dump(2) + "\n");

  CommandResult result;
  result.files = {(out / "entities.json").generic_string(), (out / "triples.tsv").generic_string(),
                  (out / "audit.json").generic_string()};
  result.summary = {{"duplicates_merged", duplicates_merged},
                    {"entities", graph.entities().size()},
                    {"format_version", 1},
                    {"parse_rejections", parse_rejections.size()},
                    {"rejected_triples", graph.audit().rejected_triples.size()},
                    {"removed_entities", graph.audit().removed_entities.size()},
                    {"triples", graph.triples().size()}};
  return result;
}

CommandResult run_kg_query(const KgQueryArgs& args) {
  require_input(args.graph_dir, "--graph");
  const RelationType relation = parse_relation(args.relation);
  const bool head_mode = !args.head.empty();
  if (head_mode == !args.tail.empty())
    throw ContractError("query takes exactly one of --head and --tail");
  const std::string& name = head_mode ? args.head : args.tail;
  const std::string& cls_name = head_mode ? args.head_class : args.tail_class;
  if (cls_name.empty())
    throw ContractError(head_mode ? "--head-class is required" : "--tail-class is required");
  const EntityClass cls = parse_entity_class(cls_name, head_mode ? "--head-class" : "--tail-class");

  auto graph = KnowledgeGraph::load(args.graph_dir);
  auto id = graph.entities().find(name, cls);
  if (!id) throw ContractError("entity not in graph: " + name + " (" + to_string(cls) + ")");
  const std::set<EntityId> found =
      head_mode ? graph.query_tails(*id, relation) : graph.query_heads(relation, *id);

  std::string payload;
  std::ostringstream table;
  if (args.pretty) table << "entity\tclass\n";
  for (EntityId eid : found) {
    const auto& entity = graph.entities().get(eid);
    if (args.pretty)
      table << entity.canonical_name << '\t' << to_string(entity.entity_class) << '\n';
    else
      payload += json{{"class", to_string(entity.entity_class)}, {"entity", entity.canonical_name}}
                     .dump() +
                 "\n";
  }

  CommandResult result;
  result.files = emit(args.out, args.pretty ? table.str() : payload);
  if (!args.out.empty()) result.summary = {{"format_version", 1}, {"results", found.size()}};
  return result;
}

CommandResult run_kg_similar(const KgSimilarArgs& args) {
  require_input(args.graph_dir, "--graph");
  if (args.entity.empty()) throw ContractError("--entity is required");
  const EntityClass cls = parse_entity_class(args.entity_class, "--class");

  auto graph = KnowledgeGraph::load(args.graph_dir);
  auto id = graph.entities().find(args.entity, cls);
  if (!id)
    throw ContractError("entity not in graph: " + args.entity + " (" + to_string(cls) + ")");
  SimilarityOptions options;
  options.k = args.k;
  options.direction_agnostic = args.direction_agnostic;
  auto hits = most_similar(graph, *id, options);

  std::string payload;
  std::ostringstream table;
  if (args.pretty) table << "entity\tclass\tscore\n";
  for (const auto& hit : hits) {
    const auto& entity = graph.entities().get(hit.entity);
    if (args.pretty)
      table << entity.canonical_name << '\t' << to_string(entity.entity_class) << '\t'
            << fixed6(hit.score) << '\n';
    else
      payload += json{{"class", to_string(entity.entity_class)},
                      {"entity", entity.canonical_name},
                      {"score", hit.score}}
                     .dump() +
                 "\n";
  }

  CommandResult result;
  result.files = emit(args.out, args.pretty ? table.str() : payload);
  if (!args.out.empty()) result.summary = {{"format_version", 1}, {"results", hits.size()}};
  return result;
}

CommandResult run_tucker_train(const TuckerTrainArgs& args) {
  if (args.out_model.empty()) throw ContractError("--out is required");
  auto source = load_triple_source(args.triples_file, args.graph_dir);
  args.config.validate();
  TuckerModel model = train_tucker(source.store, source.triples, args.config);
  if (auto parent = fs::path(args.out_model).parent_path(); !parent.empty())
    fs::create_directories(parent);
  model.save(args.out_model);

  CommandResult result;
  result.files = {args.out_model};
  result.summary = {{"entities", model.entity_count()},
                    {"final_loss", model.loss_trace().empty() ? json(nullptr)
                                                              : json(model.loss_trace().back())},
                    {"format_version", 1},
                    {"iterations", args.config.iterations},
                    {"parse_rejections", source.rejections},
                    {"relations", model.relation_count()},
                    {"triples", source.triples.size()}};
  return result;
}

CommandResult run_tucker_split(const TuckerSplitArgs& args) {
  require_input(args.triples_file, "--triples");
  if (args.train_out.empty() || args.test_out.empty())
    throw ContractError("--train-out and --test-out are required");
  auto parsed = parse_triples_file(args.triples_file);
  auto split = split_dataset(parsed.entities, parsed.triples, args.fraction, args.seed);
  for (const auto& path : {args.train_out, args.test_out})
    if (auto parent = fs::path(path).parent_path(); !parent.empty())
      fs::create_directories(parent);
  write_file(args.train_out, triples_to_tsv(parsed.entities, split.train));
  write_file(args.test_out, triples_to_tsv(parsed.entities, split.test));

  CommandResult result;
  result.files = {args.train_out, args.test_out};
  result.summary = {{"format_version", 1},
                    {"parse_rejections", parsed.rejections.size()},
                    {"test", split.test.size()},
                    {"train", split.train.size()}};
  return result;
}

CommandResult run_tucker_leave_out(const TuckerLeaveOutArgs& args) {
  require_input(args.triples_file, "--triples");
  if (args.malware.empty()) throw ContractError("--malware is required");
  if (args.remaining_out.empty() || args.removed_out.empty())
    throw ContractError("--remaining-out and --removed-out are required");
  auto parsed = parse_triples_file(args.triples_file);
  auto id = parsed.entities.find(args.malware, EntityClass::Malware);
  if (!id) throw ContractError("malware not in triples: " + args.malware);
  auto result_sets = leave_out_attack_patterns(parsed.entities, parsed.triples, *id);
  for (const auto& path : {args.remaining_out, args.removed_out})
    if (auto parent = fs::path(path).parent_path(); !parent.empty())
      fs::create_directories(parent);
  write_file(args.remaining_out, triples_to_tsv(parsed.entities, result_sets.remaining));
  write_file(args.removed_out, triples_to_tsv(parsed.entities, result_sets.removed));

  CommandResult result;
  result.files = {args.remaining_out, args.removed_out};
  result.summary = {{"format_version", 1},
                    {"remaining", result_sets.remaining.size()},
                    {"removed", result_sets.removed.size()}};
  return result;
}

CommandResult run_tucker_predict(const TuckerPredictArgs& args) {
  require_input(args.model_file, "--model");
  TuckerModel model = TuckerModel::load(args.model_file);
  const EntityClass head_class = parse_entity_class(args.head_class, "--class");
  auto head = model.entity_index(args.head, head_class);
  if (!head) throw ContractError("entity not in model vocabulary: " + args.head);
  auto relation = model.relation_index(parse_relation(args.relation));
  if (!relation) throw ContractError("relation not in model vocabulary: " + args.relation);

  PredictOptions options;
  options.k = args.k;
  if (!args.tail_classes.empty()) {
    std::set<EntityClass> allowed;
    for (const auto& name : args.tail_classes)
      allowed.insert(parse_entity_class(name, "--tail-class"));
    options.allowed_classes = std::move(allowed);
  }
  if (!args.known_file.empty()) {
    require_input(args.known_file, "--known");
    auto parsed = parse_triples_file(args.known_file);
    const RelationType rel = parse_relation(args.relation);
    for (const auto& t : parsed.triples) {
      const auto& h = parsed.entities.get(t.head);
      if (h.canonical_name != args.head || h.entity_class != head_class || t.relation != rel)
        continue;
      const auto& tail = parsed.entities.get(t.tail);
      if (auto ti = model.entity_index(tail.canonical_name, tail.entity_class))
        options.exclude.insert(*ti);
    }
  }

  auto predictions = predict_tails(model, *head, *relation, options);
  std::string payload;
  std::ostringstream table;
  if (args.pretty) table << "rank\ttail\tclass\tconfidence\n";
  for (const auto& p : predictions) {
    const auto& entry = model.entity(p.tail);
    if (args.pretty)
      table << p.rank << '\t' << entry.name << '\t' << to_string(entry.entity_class) << '\t'
            << fixed6(p.confidence) << '\n';
    else
      payload += json{{"class", to_string(entry.entity_class)},
                      {"confidence", p.confidence},
                      {"rank", p.rank},
                      {"tail", entry.name}}
                     .dump() +
                 "\n";
  }

  CommandResult result;
  result.files = emit(args.out, args.pretty ? table.str() : payload);
  if (!args.out.empty())
    result.summary = {{"format_version", 1}, {"predictions", predictions.size()}};
  return result;
}

CommandResult run_tucker_eval(const TuckerEvalArgs& args) {
  require_input(args.model_file, "--model");
  require_input(args.test_file, "--test");
  if (args.hits_at.empty()) throw ContractError("--hits needs at least one cutoff");
  for (int n : args.hits_at)
    if (n <= 0) throw ContractError("--hits cutoffs must be positive");

  TuckerModel model = TuckerModel::load(args.model_file);
  auto test_parsed = parse_triples_file(args.test_file);
  std::vector<Triple> skipped_test;
  auto test = to_index_triples(model, test_parsed.entities, test_parsed.triples, &skipped_test);

  std::vector<IndexTriple> known;
  std::size_t skipped_known = 0;
  for (const auto& file : args.known_files) {
    require_input(file, "--known");
    auto parsed = parse_triples_file(file);
    std::vector<Triple> skipped;
    auto converted = to_index_triples(model, parsed.entities, parsed.triples, &skipped);
    known.insert(known.end(), converted.begin(), converted.end());
    skipped_known += skipped.size();
  }

  EvalOptions options;
  options.filtered = !args.raw;
  options.hits_at = args.hits_at;
  EvalReport report = evaluate(model, test, known, options);

  json rendered = json::parse(eval_report_to_json(report));
  rendered["test_triples"] = test.size();
  rendered["skipped_test_triples"] = skipped_test.size();
  rendered["skipped_known_triples"] = skipped_known;

  CommandResult result;
  if (!args.out.empty()) {
    if (auto parent = fs::path(args.out).parent_path(); !parent.empty())
      fs::create_directories(parent);
    write_file(args.out, rendered.dump(2) + "\n");
    result.files = {args.out};
  }
  result.summary = std::move(rendered);
  return result;
}

CommandResult run_trends(const TrendsArgs& args) {
  require_input(args.observations_file, "--observations");
  auto lines = read_lines(args.observations_file);
  std::vector<TechniqueObservation> observations;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 3)
      throw ParseError("expected 3 tab-separated fields (malware, technique, year)", i + 1);
    TechniqueObservation obs;
    obs.malware = trim(fields[0]);
    obs.technique_id = trim(fields[1]);
    const std::string year = trim(fields[2]);
    auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), obs.year);
    if (ec != std::errc() || ptr != year.data() + year.size())
      throw ParseError("year is not an integer: " + year, i + 1);
    if (obs.malware.empty() || obs.technique_id.empty())
      throw ParseError("malware and technique must be non-empty", i + 1);
    observations.push_back(std::move(obs));
  }

  TrendReport report = trend_analysis(observations);
  json years = json::array();
  std::ostringstream table;
  if (args.pretty) table << "year\ttechnique\tshare\tfamily_share\n";
  for (const auto& [year, normalized] : report.normalized) {
    years.push_back({{"families", report.families_per_year.at(year)},
                     {"family_share", report.family_share.at(year)},
                     {"normalized", normalized},
                     {"observations", report.observations_per_year.at(year)},
                     {"year", year}});
    if (args.pretty)
      for (const auto& [technique, share] : normalized)
        table << year << '\t' << technique << '\t' << fixed6(share) << '\t'
              << fixed6(report.family_share.at(year).at(technique)) << '\n';
  }
  json rendered{{"format_version", 1}, {"years", years}};

  CommandResult result;
  if (args.pretty) {
    result.files = emit(args.out, table.str());
    if (!args.out.empty()) result.summary = {{"format_version", 1}, {"years", years.size()}};
  } else if (!args.out.empty()) {
    if (auto parent = fs::path(args.out).parent_path(); !parent.empty())
      fs::create_directories(parent);
    write_file(args.out, rendered.dump(2) + "\n");
    result.files = {args.out};
    result.summary = {{"format_version", 1}, {"years", years.size()}};
  } else {
    result.summary = std::move(rendered);
  }
  return result;
}

CommandResult run_pipeline(const PipelineArgs& args) {
  if (args.out_dir.empty()) throw ContractError("--out is required");
  require_input(args.triples, "--triples");
  if (!args.corpus.empty() && !args.crawl_fixture.empty())
    throw ContractError("pipeline takes --corpus or --crawl-fixture, not both");
  if (!args.crawl_fixture.empty() && args.seed_url.empty())
    throw ContractError("--seed-url is required with --crawl-fixture");
  if (!args.phrases.empty() && !args.tagged.empty())
    throw ContractError("--phrases and --tagged are mutually exclusive");
  const bool do_ingest = !args.corpus.empty() || !args.crawl_fixture.empty();
  const bool do_map = !args.phrases.empty() || !args.tagged.empty();
  if (do_map && args.catalog.empty())
    throw ContractError("--catalog is required when mapping phrases");
  for (const auto& [path, what] :
       std::initializer_list<std::pair<std::string, std::string>>{{args.corpus, "--corpus"},
                                                                  {args.crawl_fixture, "--crawl-fixture"},
                                                                  {args.catalog, "--catalog"},
                                                                  {args.phrases, "--phrases"},
                                                                  {args.tagged, "--tagged"},
                                                                  {args.embeddings, "--embeddings"},
                                                                  {args.rules, "--rules"},
                                                                  {args.verbs, "--verbs"}})
    if (!path.empty()) require_input(path, what);
  args.tucker.validate();
  if (!(args.fraction >= 0.0 && args.fraction <= 1.0))
    throw ContractError("--fraction must lie in [0, 1]");

  const fs::path out = args.out_dir;
  fs::create_directories(out);
  std::error_code ec;
  fs::remove(out / "FAILED", ec);
  fs::remove(out / "manifest.json", ec);

  json stages = json::array();
  auto hashed_outputs = [&](std::vector<std::string> files) {
    std::sort(files.begin(), files.end());
    json outputs = json::array();
    for (const auto& file : files)
      outputs.push_back({{"file", fs::relative(file, out).generic_string()},
                         {"fnv1a64", fnv1a64_hex(read_file(file))}});
    return outputs;
  };
  auto skipped_stage = [&](const char* name, const char* reason) {
    stages.push_back({{"name", name}, {"reason", reason}, {"status", "skipped"}});
  };

  std::string current_stage = "pipeline";
  try {
    current_stage = "ingest";
    if (do_ingest) {
      IngestArgs ingest;
      ingest.input_dir = args.corpus;
      ingest.crawl_fixture = args.crawl_fixture;
      ingest.seed_url = args.seed_url;
      ingest.generations = args.generations;
      ingest.keywords = args.keywords;
      ingest.window_words = args.window_words;
      ingest.out_dir = (out / "ingest").string();
      auto r = run_ingest(ingest);
      stages.push_back(
          {{"name", "ingest"}, {"outputs", hashed_outputs(r.files)}, {"status", "ok"}});
    } else {
      skipped_stage("ingest", "no corpus or crawl fixture configured");
    }

    current_stage = "map";
    if (do_map) {
      MapArgs map;
      map.phrases_file = args.phrases;
      map.tagged_file = args.tagged;
      map.catalog_file = args.catalog;
      map.embeddings_file = args.embeddings;
      map.dim = args.dim;
      map.threshold = args.threshold;
      map.title_weight = args.title_weight;
      map.no_filter = args.no_filter;
      map.verbs_file = args.verbs;
      map.out = (out / "map" / "mappings.jsonl").string();
      auto r = run_map(map);
      stages.push_back({{"name", "map"}, {"outputs", hashed_outputs(r.files)}, {"status", "ok"}});
    } else {
      skipped_stage("map", "no phrase input configured");
    }

    current_stage = "kg";
    KgBuildArgs kg;
    kg.triple_files = {args.triples};
    kg.rules_file = args.rules;
    kg.no_cleanup = args.no_cleanup;
    kg.out_dir = (out / "kg").string();
    auto kg_result = run_kg_build(kg);
    stages.push_back(
        {{"name", "kg"}, {"outputs", hashed_outputs(kg_result.files)}, {"status", "ok"}});

    current_stage = "tucker";
    if (!args.skip_train) {
      auto graph = KnowledgeGraph::load(out / "kg");
      auto split = split_dataset(graph.entities(), graph.triples(), args.fraction, args.split_seed);
      fs::create_directories(out / "tucker");
      std::vector<std::string> files;
      write_file(out / "tucker" / "train.tsv", triples_to_tsv(graph.entities(), split.train));
      write_file(out / "tucker" / "test.tsv", triples_to_tsv(graph.entities(), split.test));
      files.push_back((out / "tucker" / "train.tsv").generic_string());
      files.push_back((out / "tucker" / "test.tsv").generic_string());

      TuckerModel model = train_tucker(graph.entities(), split.train, args.tucker);
      model.save(out / "tucker" / "model.json");
      files.push_back((out / "tucker" / "model.json").generic_string());

      if (!split.test.empty()) {
        std::vector<Triple> skipped_test;
        auto test = to_index_triples(model, graph.entities(), split.test, &skipped_test);
        std::vector<Triple> skipped_known;
        auto known = to_index_triples(model, graph.entities(), split.train, &skipped_known);
        EvalOptions options;
        options.filtered = !args.raw_eval;
        EvalReport report = evaluate(model, test, known, options);
        json rendered = json::parse(eval_report_to_json(report));
        rendered["test_triples"] = test.size();
        rendered["skipped_test_triples"] = skipped_test.size();
        write_file(out / "tucker" / "eval.json", rendered.dump(2) + "\n");
        files.push_back((out / "tucker" / "eval.json").generic_string());
      }
      stages.push_back({{"name", "tucker"}, {"outputs", hashed_outputs(files)}, {"status", "ok"}});
    } else {
      skipped_stage("tucker", "--skip-train");
    }
  } catch (const std::exception& e) {
    json failure{{"error", {{"message", e.what()}, {"type", error_kind(e)}}},
                 {"format_version", 1},
                 {"stage", current_stage}};
    write_file(out / "FAILED", failure.dump(2) + "\n");
    throw;
  }

  // Inputs are recorded by basename and content hash only, so the manifest is
  // byte-identical no matter where the tree is checked out.
  std::vector<std::pair<std::string, std::string>> inputs;
  auto add_input = [&](const std::string& path) {
    if (path.empty()) return;
    inputs.emplace_back(fs::path(path).filename().generic_string(), fnv1a64_hex(read_file(path)));
  };
  add_input(args.config_file);
  add_input(args.triples);
  if (!args.corpus.empty()) {
    std::vector<fs::path> corpus_files;
    for (const auto& entry : fs::directory_iterator(args.corpus)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = to_lower(entry.path().extension().string());
      if (ext == ".html" || ext == ".htm" || ext == ".txt") corpus_files.push_back(entry.path());
    }
    std::sort(corpus_files.begin(), corpus_files.end());
    for (const auto& file : corpus_files) add_input(file.generic_string());
  }
  add_input(args.crawl_fixture);
  add_input(args.catalog);
  add_input(args.phrases);
  add_input(args.tagged);
  add_input(args.embeddings);
  add_input(args.rules);
  add_input(args.verbs);
  std::sort(inputs.begin(), inputs.end());
  json inputs_json = json::array();
  for (const auto& [name, hash] : inputs)
    inputs_json.push_back({{"fnv1a64", hash}, {"name", name}});

  std::vector<std::string> keywords = effective_keywords(args.keywords);
  std::sort(keywords.begin(), keywords.end());
  json config{
      {"eval", {{"filtered", !args.raw_eval}, {"fraction", args.fraction}, {"split_seed", args.split_seed}}},
      {"ingest",
       {{"generations", args.generations}, {"keywords", keywords}, {"window_words", args.window_words}}},
      {"kg", {{"cleanup", !args.no_cleanup}}},
      {"mapping",
       {{"dim", args.dim},
        {"filter", !args.no_filter},
        {"threshold", args.threshold},
        {"title_weight", args.title_weight}}},
      {"skip_train", args.skip_train},
      {"tucker",
       {{"batch_size", args.tucker.batch_size},
        {"entity_dim", args.tucker.entity_dim},
        {"hidden_dropout1", args.tucker.hidden_dropout1},
        {"hidden_dropout2", args.tucker.hidden_dropout2},
        {"init_scale", args.tucker.init_scale},
        {"input_dropout", args.tucker.input_dropout},
        {"iterations", args.tucker.iterations},
        {"label_smoothing", args.tucker.label_smoothing},
        {"learning_rate", args.tucker.learning_rate},
        {"relation_dim", args.tucker.relation_dim},
        {"seed", args.tucker.seed}}}};

  json manifest{{"command", "pipeline"},
                {"config", config},
                {"format_version", 1},
                {"inputs", inputs_json},
                {"stages", stages}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  json stage_summary = json::object();
  for (const auto& stage : stages)
    stage_summary[stage.at("name").get<std::string>()] = stage.at("status");
  CommandResult result;
  result.files = {(out / "manifest.json").generic_string()};
  result.summary = {{"format_version", 1}, {"manifest", "manifest.json"}, {"stages", stage_summary}};
  return result;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ContractError*>(&e)) return "config";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const TrainingDiverged*>(&e)) return "training";
  return "runtime";
}

int exit_code_for(const std::exception& e) {
  return dynamic_cast<const ContractError*>(&e) ? 2 : 1;
}

}  // namespace ladder::cli
