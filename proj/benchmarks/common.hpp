#pragma once

#include <filesystem>
#include <vector>

#include "revpat/corpus.hpp"
#include "revpat/gazetteer.hpp"
#include "revpat/linguistics.hpp"

namespace bench {

inline const revpat::Gazetteer& gazetteer() {
  static const revpat::Gazetteer g =
      revpat::load_gazetteer(std::filesystem::path(REVPAT_BENCH_DATA_DIR) / "gazetteer.txt");
  return g;
}

// The bundled synthetic corpus, annotated once per process.
inline const std::vector<revpat::LabeledExample>& corpus() {
  static const auto examples = revpat::annotate_all(
      revpat::ingest(std::filesystem::path(REVPAT_BENCH_DATA_DIR) / "synthetic" / "corpus.jsonl",
                     revpat::InputFormat::Jsonl),
      gazetteer());
  return examples;
}

inline std::vector<revpat::Document> documents() {
  std::vector<revpat::Document> docs;
  for (const auto& ex : corpus()) docs.push_back(ex.document);
  return docs;
}

}  // namespace bench
