#include "ladder/catalog.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {
const std::string kMobile = "mobile";
const std::string kEnterprise = "enterprise";

bool valid_technique_id(const std::string& id) {
  if (id.size() != 5 || id[0] != 'T') return false;
  return std::all_of(id.begin() + 1, id.end(), is_ascii_digit);
}
}  // namespace

const std::string& to_string(Platform p) {
  return p == Platform::Mobile ? kMobile : kEnterprise;
}

std::vector<Technique> parse_catalog(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("catalog JSON: ") + e.what(), 0);
  }
  if (!doc.is_array()) throw ParseError("catalog must be a JSON array", 0);

  std::vector<Technique> out;
  std::set<std::string> ids;
  for (const auto& entry : doc) {
    Technique t;
    t.id = entry.value("id", std::string());
    t.name = entry.value("name", std::string());
    t.description = entry.value("description", std::string());
    std::string platform = entry.value("platform", std::string());
    if (!valid_technique_id(t.id))
      throw ParseError("bad technique id '" + t.id + "'", 0);
    if (!ids.insert(t.id).second) throw ParseError("duplicate technique id " + t.id, 0);
    if (t.name.empty()) throw ParseError(t.id + ": empty name", 0);
    if (t.description.empty()) throw ParseError(t.id + ": empty description", 0);
    if (platform == kMobile) {
      t.platform = Platform::Mobile;
    } else if (platform == kEnterprise) {
      t.platform = Platform::Enterprise;
    } else {
      throw ParseError(t.id + ": platform must be 'mobile' or 'enterprise'", 0);
    }
    for (const auto& tactic : entry.value("tactics", nlohmann::json::array()))
      t.tactics.push_back(tactic.get<std::string>());
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(),
            [](const Technique& a, const Technique& b) { return a.id < b.id; });
  return out;
}

std::vector<Technique> load_catalog(const std::filesystem::path& path) {
  return parse_catalog(read_file(path));
}

std::vector<TechniqueEmbedding> embed_catalog(const std::vector<Technique>& catalog,
                                              const EmbeddingProvider& provider) {
  std::vector<TechniqueEmbedding> out;
  out.reserve(catalog.size());
  for (const Technique& t : catalog) {
    out.push_back({t.id, provider.embed(t.name), provider.embed(t.description)});
  }
  return out;
}

}  // namespace ladder
