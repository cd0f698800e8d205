#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "revpat/document.hpp"
#include "revpat/gazetteer.hpp"
#include "revpat/rng.hpp"

namespace testing_support {

inline std::filesystem::path data_dir() { return REVPAT_TEST_DATA_DIR; }

inline const revpat::Gazetteer& default_gazetteer() {
  static const revpat::Gazetteer gaz = revpat::load_gazetteer(data_dir() / "gazetteer.txt");
  return gaz;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// "word/TAG" items, optionally "word/TAG/ent1+ent2".
inline revpat::Document doc_from(std::string id, const std::vector<std::string>& items) {
  revpat::Document doc;
  doc.review_id = std::move(id);
  for (const auto& item : items) {
    revpat::Token t;
    const auto a = item.find('/');
    t.surface = item.substr(0, a);
    t.norm = t.surface;
    for (char& c : t.norm) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (a != std::string::npos) {
      const auto b = item.find('/', a + 1);
      t.pos = item.substr(a + 1, b == std::string::npos ? std::string::npos : b - a - 1);
      if (b != std::string::npos) {
        std::string rest = item.substr(b + 1);
        std::size_t p = 0;
        while (p <= rest.size()) {
          const auto q = rest.find('+', p);
          t.entity_types.push_back(rest.substr(p, q == std::string::npos ? std::string::npos : q - p));
          if (q == std::string::npos) break;
          p = q + 1;
        }
      }
    } else {
      t.pos = "NN";
    }
    doc.tokens.push_back(std::move(t));
  }
  return doc;
}

// Small random world used by the matcher property tests.
struct MiniWorld {
  std::vector<std::string> words{"a", "b", "c", "d"};
  std::vector<std::string> tags{"NN", "VB", "DT"};
  std::vector<std::string> entities{"x", "y"};

  revpat::Document document(revpat::Rng& rng, std::size_t max_tokens) const {
    revpat::Document doc;
    doc.review_id = "d";
    const auto n = rng.uniform_index(max_tokens + 1);
    for (std::size_t i = 0; i < n; ++i) {
      revpat::Token t;
      t.surface = t.norm = words[rng.uniform_index(words.size())];
      t.pos = tags[rng.uniform_index(tags.size())];
      for (const auto& e : entities) {
        if (rng.bernoulli(0.3)) t.entity_types.push_back(e);
      }
      doc.tokens.push_back(std::move(t));
    }
    return doc;
  }
};

}  // namespace testing_support
