#include "ladder/crawl.hpp"

#include <deque>

#include <nlohmann/json.hpp>

#include "ladder/errors.hpp"
#include "ladder/text.hpp"

namespace ladder {

namespace {

// Leading/trailing punctuation does not count as part of a word.
std::string strip_punct(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_ascii_alnum(token[b])) ++b;
  while (e > b && !is_ascii_alnum(token[e - 1])) --e;
  return std::string(token.substr(b, e - b));
}

}  // namespace

bool relevance_filter(std::string_view text, const std::set<std::string>& keywords,
                      int window_words) {
  if (window_words <= 100)
    throw ContractError("relevance window must exceed 100 words, got " +
                        std::to_string(window_words));
  if (keywords.empty()) throw ContractError("relevance filter needs at least one keyword");

  std::set<std::string> lowered;
  for (const std::string& k : keywords) lowered.insert(to_lower(k));

  int seen = 0;
  std::size_t i = 0;
  while (i < text.size() && seen < window_words) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == b) break;
    ++seen;
    std::string word = to_lower(strip_punct(text.substr(b, i - b)));
    if (!word.empty() && lowered.count(word)) return true;
  }
  return false;
}

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

FixtureProvider FixtureProvider::from_json_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fixture JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("fixture JSON must be an object keyed by url", 0);
  FixtureProvider out;
  for (const auto& [url, entry] : doc.items()) {
    Page page;
    page.body = entry.value("body", std::string());
    for (const auto& link : entry.value("links", nlohmann::json::array())) {
      page.links.push_back(link.get<std::string>());
    }
    out.pages_.emplace(url, std::move(page));
  }
  return out;
}

std::optional<PageProvider::Page> FixtureProvider::fetch(const std::string& url) {
  auto it = pages_.find(url);
  if (it == pages_.end()) return std::nullopt;
  return it->second;
}

CrawlResult crawl(const std::string& seed, PageProvider& provider, const CrawlOptions& options) {
  if (options.generations < 0) throw ContractError("generations must be >= 0");

  CrawlResult result;
  std::set<std::string> enqueued;  // every url ever queued; nothing repeats
  std::deque<std::string> frontier;

  frontier.push_back(seed);
  enqueued.insert(seed);

  // Generation 0 is the seed itself; each later generation is the set of
  // newly discovered links of the previous one.
  for (int depth = 0; depth <= options.generations && !frontier.empty(); ++depth) {
    std::deque<std::string> next;
    while (!frontier.empty()) {
      std::string url = frontier.front();
      frontier.pop_front();
      result.visited.push_back(url);

      std::optional<PageProvider::Page> page = provider.fetch(url);
      if (!page) {
        result.failed.push_back(url);
        continue;
      }
      bool relevant = relevance_filter(page->body, options.keywords, options.window_words);
      if (relevant) result.saved.push_back({url, page->body});

      // The seed is expanded unconditionally; everything else must have
      // passed the filter to contribute links.
      bool expand = (depth == 0) || relevant;
      if (!expand || depth == options.generations) continue;
      for (const std::string& link : page->links) {
        if (enqueued.insert(link).second) next.push_back(link);
      }
    }
    frontier = std::move(next);
  }
  return result;
}

}  // namespace ladder
