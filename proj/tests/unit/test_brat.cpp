#include <string>

#include "doctest.h"
#include "ladder/brat.hpp"
#include "ladder/errors.hpp"
#include "ladder/text.hpp"
#include "test_util.hpp"

using namespace ladder;

namespace {

AnnotatedDocument fixture_doc() {
  return parse_brat_files(testing::fixture_dir() / "cerberus.txt",
                          testing::fixture_dir() / "cerberus.ann");
}

}  // namespace

TEST_CASE("the annotated fixture parses with every span verified") {
  auto doc = fixture_doc();
  CHECK(doc.document.id == "cerberus");
  REQUIRE(doc.entity_spans.size() == 8);

  for (const auto& s : doc.entity_spans) {
    std::string from_text = doc.document.text.substr(s.begin, s.end - s.begin);
    for (char& c : from_text)
      if (c == '\n') c = ' ';
    CHECK(from_text == s.text);
  }

  CHECK(doc.entity_spans[0].tid == "T1");
  CHECK(doc.entity_spans[0].entity_class == EntityClass::Malware);
  CHECK(doc.entity_spans[0].text == "Cerberus");
  CHECK(doc.entity_spans[2].entity_class == EntityClass::Time);
}

TEST_CASE("attack pattern spans may nest other entities") {
  auto doc = fixture_doc();
  REQUIRE(doc.attack_pattern_spans.size() == 2);
  const auto& ap = doc.entity_spans[doc.attack_pattern_spans[0]];
  CHECK(ap.text == "break Android's application sandbox");

  // The nested OS span sits strictly inside the attack pattern span and is
  // still its own entity span.
  const auto& os = doc.entity_spans[4];
  CHECK(os.entity_class == EntityClass::OS);
  CHECK(ap.begin <= os.begin);
  CHECK(os.end <= ap.end);
}

TEST_CASE("relations resolve to span indices by annotation id") {
  auto doc = fixture_doc();
  REQUIRE(doc.relations.size() == 5);
  const auto& r3 = doc.relations[2];
  CHECK(r3.relation == RelationType::Targets);
  CHECK(doc.entity_spans[r3.arg1].text == "Cerberus");
  CHECK(doc.entity_spans[r3.arg2].entity_class == EntityClass::OS);

  const auto& r4 = doc.relations[3];
  CHECK(r4.relation == RelationType::HasAlias);
  CHECK(doc.entity_spans[r4.arg2].text == "RATel");
}

TEST_CASE("serialization round-trips") {
  auto doc = fixture_doc();
  auto again = parse_brat(doc.document.text, to_brat(doc));
  CHECK(again.entity_spans == doc.entity_spans);
  CHECK(again.attack_pattern_spans == doc.attack_pattern_spans);
  CHECK(again.relations == doc.relations);
}

TEST_CASE("newlines in the text compare equal to spaces in the surface column") {
  std::string text = "steal\ncodes now";
  std::string ann = "T1\tAttackPattern 0 11\tsteal codes\n";
  auto doc = parse_brat(text, ann);
  REQUIRE(doc.entity_spans.size() == 1);
  CHECK(doc.entity_spans[0].text == "steal codes");
}

TEST_CASE("offset mismatches raise a parse error with the line number") {
  std::string text = "Cerberus steals data";
  try {
    parse_brat(text, "T1\tMalware 0 8\tAnubis\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("unknown classes, relations and dangling arguments are rejected") {
  std::string text = "Cerberus steals data";
  CHECK_THROWS_AS(parse_brat(text, "T1\tMysteryClass 0 8\tCerberus\n"), ParseError);
  CHECK_THROWS_AS(parse_brat(text,
                             "T1\tMalware 0 8\tCerberus\n"
                             "R1\tsummons Arg1:T1 Arg2:T1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_brat(text,
                             "T1\tMalware 0 8\tCerberus\n"
                             "R1\tuses Arg1:T1 Arg2:T9\n"),
                  ParseError);
}

TEST_CASE("note and attribute lines are skipped") {
  std::string text = "Cerberus steals data";
  std::string ann =
      "T1\tMalware 0 8\tCerberus\n"
      "#1\tAnnotatorNotes T1\tchecked twice\n"
      "A1\tNegated T1\n"
      "M1\tSpeculated T1\n"
      "N1\tReference T1 Wikipedia:Q1\n";
  auto doc = parse_brat(text, ann);
  CHECK(doc.entity_spans.size() == 1);
  CHECK(doc.relations.empty());
}

TEST_CASE("out-of-bounds offsets are rejected") {
  CHECK_THROWS_AS(parse_brat("short", "T1\tMalware 0 99\tshort\n"), ParseError);
}
