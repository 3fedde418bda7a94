#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ladder {

// True when any keyword occurs, case-insensitively and as a whole word, in
// the first `window_words` whitespace-separated words of `text`. Tokens are
// stripped of leading and trailing punctuation before comparison, so
// "Trojan," matches keyword "trojan". window_words must exceed 100; a page
// that buries its only keyword deeper than the opening passage is treated
// as off-topic. Throws ContractError on window_words <= 100 or empty keywords.
bool relevance_filter(std::string_view text, const std::set<std::string>& keywords,
                      int window_words);

// Source of pages for the crawler. fetch returns the page body plus outgoing
// links, or nullopt when the url cannot be retrieved.
class PageProvider {
 public:
  struct Page {
    std::string body;                 // already-cleaned text or raw HTML
    std::vector<std::string> links;   // outgoing urls, document order
  };

  virtual ~PageProvider() = default;
  virtual std::optional<Page> fetch(const std::string& url) = 0;
};

// Offline provider backed by a JSON map: {"url": {"body": "...",
// "links": ["...", ...]}, ...}. Used for tests and reproducible runs.
class FixtureProvider final : public PageProvider {
 public:
  static FixtureProvider from_file(const std::filesystem::path& path);
  static FixtureProvider from_json_text(std::string_view json_text);

  std::optional<Page> fetch(const std::string& url) override;

 private:
  std::map<std::string, Page> pages_;
};

struct CrawlOptions {
  int generations = 1;  // link-following depth beyond the seed; >= 0
  std::set<std::string> keywords;
  int window_words = 150;
};

struct CrawlResult {
  struct SavedPage {
    std::string url;
    std::string body;
  };

  std::vector<SavedPage> saved;         // relevant pages, discovery order
  std::vector<std::string> visited;     // every url fetched, fetch order
  std::vector<std::string> failed;      // urls whose fetch returned nothing
};

// Breadth-first crawl from the seed. Each url is enqueued at most once, the
// queue is FIFO, and generations advance level by level, so the visit order
// is a pure function of the seed and the provider. The seed's links are
// always followed; a non-seed page's links are followed only when the page
// itself passed the relevance filter. A page is saved iff it is relevant.
CrawlResult crawl(const std::string& seed, PageProvider& provider, const CrawlOptions& options);

}  // namespace ladder
