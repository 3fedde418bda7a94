#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ladder/ioc.hpp"

using namespace ladder;

namespace {

std::vector<IocHit> only(std::string_view text) { return extract_iocs(text); }

}  // namespace

TEST_CASE("each indicator type is recognized") {
  struct Case {
    const char* text;
    IocType type;
  };
  const Case cases[] = {
      {"e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855", IocType::Sha256},
      {"da39a3ee5e6b4b0d3255bfef95601890afd80709", IocType::Sha1},
      {"CVE-2021-44228", IocType::Cve},
      {"CVE-2014-0160", IocType::Cve},
      {"198.51.100.7", IocType::Ipv4},
      {"abuse@example.org", IocType::Email},
      {"/usr/local/bin/payload", IocType::FilePath},
      {"C:\\Windows\\System32\\evil.exe", IocType::FilePath},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    std::string padded = std::string("seen near ") + c.text + " in the report";
    auto hits = only(padded);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].type == c.type);
    CHECK(hits[0].text == c.text);
    CHECK(padded.substr(hits[0].begin, hits[0].end - hits[0].begin) == hits[0].text);
  }
}

TEST_CASE("a 64-hex digest is one SHA256, never also its prefix") {
  std::string digest(64, 'a');
  for (std::size_t i = 0; i < digest.size(); i += 3) digest[i] = '0' + char(i % 10);
  auto hits = only("hash " + digest + " end");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].type == IocType::Sha256);
  CHECK(hits[0].text == digest);
}

TEST_CASE("hash digests match in a single case register") {
  std::string upper = "E3B0C44298FC1C149AFBF4C8996FB92427AE41E4649B934CA495991B7852B855";
  auto hits = only("x " + upper + " y");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].type == IocType::Sha256);

  // Alternating case (no digits) leaves no single-case run at all.
  std::string mixed;
  for (int i = 0; i < 32; ++i) mixed += "aA";
  CHECK(only("x " + mixed + " y").empty());
}

TEST_CASE("hex context suppresses digest matches") {
  std::string digest(64, 'b');
  CHECK(only("0" + digest).empty());
  CHECK(only(digest + "c").empty());
}

TEST_CASE("dotted number runs are not addresses") {
  CHECK(only("1.2.3.4.5").empty());
  CHECK(only("version 1.2.3.4.5 shipped").empty());
  CHECK(only("256.1.1.1").empty());
  CHECK(only("999.1.1.1").empty());
}

TEST_CASE("octets hold the 0-255 range") {
  auto hits = only("at 255.255.255.255 now");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].text == "255.255.255.255");
  CHECK(only("at 0.0.0.0 now").size() == 1);
}

TEST_CASE("cve ids reject alphanumeric context and lowercase") {
  CHECK(only("XCVE-2021-44228").empty());
  CHECK(only("CVE-2021-442289999").empty());
  CHECK(only("cve-2021-44228").empty());
  auto hits = only("see CVE-2021-123456.");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].text == "CVE-2021-123456");
}

TEST_CASE("emails need a clean left boundary") {
  CHECK(only("Abuse@example.org").empty());
  auto hits = only("mail abuse@mail.example.org now");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].text == "abuse@mail.example.org");
}

TEST_CASE("email beats file path on overlap") {
  auto hits = only("/tmp/abuse@example.org");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].type == IocType::Email);
  CHECK(hits[0].text == "abuse@example.org");
}

TEST_CASE("paths never end in separators or dots") {
  auto hits = only("run /opt/tool/bin.sh now");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].text == "/opt/tool/bin.sh");
  auto trailing = only("under /var/log/ today");
  REQUIRE(trailing.size() == 1);
  CHECK(trailing[0].text == "/var/log");
}

TEST_CASE("hits come back in text order with exact offsets") {
  std::string text = "ip 10.0.0.1 then CVE-2020-1234 then /etc/passwd done";
  auto hits = only(text);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].type == IocType::Ipv4);
  CHECK(hits[1].type == IocType::Cve);
  CHECK(hits[2].type == IocType::FilePath);
  for (const auto& h : hits) {
    CHECK(text.substr(h.begin, h.end - h.begin) == h.text);
  }
}

TEST_CASE("planted indicators are recovered exactly") {
  std::mt19937_64 gen(7);
  const std::vector<std::string> fillers = {"the", "report", "describes", "activity",
                                            "observed", "during", "the", "incident"};
  const std::vector<std::string> plants = {
      "9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08",
      "356a192b7913b04c54574d18c28d46e6395428ab",
      "CVE-2019-0708",
      "203.0.113.99",
      "charlie@corp.example",
      "/home/user/.ssh/id_rsa",
  };
  for (int round = 0; round < 50; ++round) {
    std::ostringstream text;
    std::vector<std::string> expected;
    for (int i = 0; i < 30; ++i) {
      text << fillers[gen() % fillers.size()] << ' ';
      if (i % 5 == 4) {
        const std::string& p = plants[gen() % plants.size()];
        text << p << ' ';
        expected.push_back(p);
      }
    }
    auto hits = only(text.str());
    REQUIRE(hits.size() == expected.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].text == expected[i]);
    }
  }
}
