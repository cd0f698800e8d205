#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "revpat/error.hpp"
#include "revpat/gazetteer.hpp"

using namespace revpat;
using testing_support::default_gazetteer;

namespace {

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

Gazetteer parse(const std::string& text) {
  std::istringstream in(text);
  return Gazetteer::parse(in);
}

}  // namespace

TEST(Gazetteer, DefaultFileHasTheDocumentedTypes) {
  const auto keys = default_gazetteer().keys();
  for (const char* k : {"app", "user", "action", "object", "component", "device", "update",
                        "software bug", "software update"}) {
    EXPECT_TRUE(has(keys, k)) << k;
  }
}

TEST(Gazetteer, Lookup) {
  const Gazetteer& g = default_gazetteer();
  EXPECT_TRUE(has(g.lookup("evernote"), "app"));
  EXPECT_EQ(g.lookup("application"), std::vector<std::string>{"app"});
  EXPECT_TRUE(has(g.lookup("software update"), "software update") ||
              has(g.lookup("update"), "software update"));
  EXPECT_TRUE(g.lookup("zzzz").empty());
}

TEST(Gazetteer, PhraseEntries) {
  const Gazetteer g = parse("software update: software update, new version\nbug: crash\n");
  EXPECT_EQ(g.lookup("software update"), std::vector<std::string>{"software update"});
  EXPECT_EQ(g.max_phrase_tokens(), 2u);
}

TEST(Gazetteer, EmptyEntrySetNamesTheKey) {
  try {
    parse("x:\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos) << e.what();
  }
}

TEST(Gazetteer, Errors) {
  EXPECT_THROW(parse("no colon here\n"), InputError);
  EXPECT_THROW(parse("a: x\na: y\n"), InputError);
  EXPECT_THROW(parse(": x\n"), InputError);
  EXPECT_THROW(parse("a: one two three four five\n"), InputError);
}

TEST(Gazetteer, CommentsAndCaseFolding) {
  const Gazetteer g = parse("# header\nApp: Evernote, IT  # trailing\n\n");
  EXPECT_EQ(g.lookup("evernote"), std::vector<std::string>{"app"});
  EXPECT_EQ(g.lookup("it"), std::vector<std::string>{"app"});
}

TEST(Gazetteer, LookupRoundTripsWithFileEntries) {
  const Gazetteer& g = default_gazetteer();
  for (const auto& key : g.keys()) {
    for (const auto& term : g.entries(key)) EXPECT_TRUE(has(g.lookup(term), key)) << term;
  }
  EXPECT_TRUE(g.lookup("").empty());
}

TEST(Gazetteer, MissingFile) {
  EXPECT_THROW(load_gazetteer("/nonexistent/gaz.txt"), InputError);
}
