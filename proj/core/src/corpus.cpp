#include "revpat/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "revpat/error.hpp"
#include "revpat/rng.hpp"

namespace revpat {
namespace {

using nlohmann::json;

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

void check_unique(std::vector<RawReview>& reviews) {
  std::unordered_set<std::string> seen;
  for (const auto& review : reviews) {
    if (!seen.insert(review.id).second) {
      throw InputError("duplicate review id '" + review.id + "'");
    }
  }
}

std::optional<bool> optional_bool(const json& object, const char* key, std::size_t line) {
  if (!object.contains(key) || object[key].is_null()) return std::nullopt;
  if (!object[key].is_boolean()) {
    throw InputError(at_line(line, std::string("'") + key + "' must be a boolean"));
  }
  return object[key].get<bool>();
}

RawReview review_from_json(const json& record, std::size_t line) {
  if (!record.is_object()) throw InputError(at_line(line, "record is not a JSON object"));
  RawReview review;
  if (!record.contains("id") || !record["id"].is_string()) {
    throw InputError(at_line(line, "missing string field 'id'"));
  }
  review.id = record["id"].get<std::string>();
  if (review.id.empty()) throw InputError(at_line(line, "empty 'id'"));

  if (record.contains("tokens")) {
    if (!record["tokens"].is_array()) throw InputError(at_line(line, "'tokens' must be an array"));
    for (const auto& tok : record["tokens"]) {
      if (!tok.is_object() || !tok.contains("surface") || !tok["surface"].is_string() ||
          !tok.contains("pos") || !tok["pos"].is_string()) {
        throw InputError(at_line(line, "each token needs string 'surface' and 'pos'"));
      }
      review.tokens.push_back({tok["surface"].get<std::string>(), tok["pos"].get<std::string>()});
    }
    for (std::size_t i = 0; i < review.tokens.size(); ++i) {
      if (i) review.text += ' ';
      review.text += review.tokens[i].surface;
    }
  }
  if (record.contains("text")) {
    if (!record["text"].is_string()) throw InputError(at_line(line, "'text' must be a string"));
    review.text = record["text"].get<std::string>();
  } else if (!record.contains("tokens")) {
    throw InputError(at_line(line, "missing string field 'text'"));
  }
  if (review.text.empty()) throw InputError(at_line(line, "empty 'text'"));

  if (record.contains("labels") && !record["labels"].is_null()) {
    const auto& labels = record["labels"];
    if (!labels.is_object()) throw InputError(at_line(line, "'labels' must be an object"));
    review.labels.defect = optional_bool(labels, "defect", line);
    review.labels.improvement = optional_bool(labels, "improvement", line);
  }
  if (record.contains("votes") && !record["votes"].is_null()) {
    const auto& votes = record["votes"];
    if (!votes.is_object()) throw InputError(at_line(line, "'votes' must be an object"));
    for (FeedbackType type : kFeedbackTypes) {
      const std::string key(to_string(type));
      if (!votes.contains(key)) continue;
      if (!votes[key].is_array()) throw InputError(at_line(line, "'votes." + key + "' must be an array"));
      std::size_t annotator = 0;
      for (const auto& v : votes[key]) {
        if (!v.is_boolean()) throw InputError(at_line(line, "votes must be booleans"));
        review.votes.push_back({type, v.get<bool>(), "a" + std::to_string(annotator++)});
      }
    }
  }
  return review;
}

// RFC 4180 record reader; returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  ++line;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw InputError(at_line(line, "unterminated quoted field"));
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

void parse_csv_votes(const std::string& field, FeedbackType type, std::size_t line,
                     RawReview& review) {
  if (field.empty()) return;
  std::size_t annotator = 0;
  std::stringstream ss(field);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item == "t") {
      review.votes.push_back({type, true, "a" + std::to_string(annotator++)});
    } else if (item == "f") {
      review.votes.push_back({type, false, "a" + std::to_string(annotator++)});
    } else {
      throw InputError(at_line(line, "vote '" + item + "' is not t or f"));
    }
  }
}

}  // namespace

InputFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? InputFormat::Csv : InputFormat::Jsonl;
}

std::vector<RawReview> parse_jsonl(std::istream& in) {
  std::vector<RawReview> reviews;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(at_line(line, std::string("malformed JSON: ") + e.what()));
    }
    reviews.push_back(review_from_json(record, line));
  }
  check_unique(reviews);
  return reviews;
}

std::vector<RawReview> parse_csv(std::istream& in) {
  static const std::vector<std::string> kHeader{"id", "text", "defect_votes", "improvement_votes"};
  std::vector<RawReview> reviews;
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_csv_record(in, fields, line)) return reviews;
  if (fields != kHeader) {
    throw InputError(at_line(1, "expected header id,text,defect_votes,improvement_votes"));
  }
  while (true) {
    const std::size_t record_line = line + 1;
    if (!read_csv_record(in, fields, line)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != kHeader.size()) {
      throw InputError(at_line(record_line, "expected 4 fields, found " + std::to_string(fields.size())));
    }
    RawReview review;
    review.id = fields[0];
    review.text = fields[1];
    if (review.id.empty()) throw InputError(at_line(record_line, "empty id"));
    if (review.text.empty()) throw InputError(at_line(record_line, "empty text"));
    parse_csv_votes(fields[2], FeedbackType::Defect, record_line, review);
    parse_csv_votes(fields[3], FeedbackType::Improvement, record_line, review);
    reviews.push_back(std::move(review));
  }
  check_unique(reviews);
  return reviews;
}

std::string review_to_jsonl(const RawReview& review) {
  nlohmann::ordered_json j;
  j["id"] = review.id;
  j["text"] = review.text;
  if (!review.tokens.empty()) {
    j["tokens"] = nlohmann::ordered_json::array();
    for (const auto& tok : review.tokens) j["tokens"].push_back({{"surface", tok.surface}, {"pos", tok.pos}});
  }
  if (review.labels.any()) {
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    for (FeedbackType type : kFeedbackTypes) {
      if (auto v = review.labels.get(type)) labels[std::string(to_string(type))] = *v;
    }
    j["labels"] = std::move(labels);
  }
  if (!review.votes.empty()) {
    nlohmann::ordered_json votes = nlohmann::ordered_json::object();
    for (FeedbackType type : kFeedbackTypes) {
      nlohmann::ordered_json list = nlohmann::ordered_json::array();
      for (const auto& vote : review.votes) {
        if (vote.feedback_type == type) list.push_back(vote.value);
      }
      if (!list.empty()) votes[std::string(to_string(type))] = std::move(list);
    }
    j["votes"] = std::move(votes);
  }
  return j.dump();
}

void write_jsonl(std::span<const RawReview> reviews, std::ostream& out) {
  for (const auto& review : reviews) out << review_to_jsonl(review) << '\n';
}

std::vector<RawReview> ingest(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return format == InputFormat::Csv ? parse_csv(in) : parse_jsonl(in);
}

MajorityVote majority_vote(std::span<const bool> votes) {
  if (votes.empty()) throw InputError("majority_vote: no votes");
  const auto yes = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), true));
  const std::size_t no = votes.size() - yes;
  return {yes > no, yes == no};
}

LabelResolution resolve_labels(const RawReview& review) {
  LabelResolution out;
  for (FeedbackType type : kFeedbackTypes) {
    if (auto explicit_label = review.labels.get(type)) {
      out.labels.set(type, *explicit_label);
      continue;
    }
    const auto count = static_cast<std::size_t>(std::count_if(
        review.votes.begin(), review.votes.end(),
        [type](const AnnotatorVote& v) { return v.feedback_type == type; }));
    if (count == 0) continue;
    auto flags = std::make_unique<bool[]>(count);
    std::size_t i = 0;
    for (const auto& vote : review.votes) {
      if (vote.feedback_type == type) flags[i++] = vote.value;
    }
    const MajorityVote result = majority_vote(std::span<const bool>(flags.get(), count));
    out.labels.set(type, result.value);
    if (result.tie) out.ties.push_back(type);
  }
  return out;
}

std::vector<VoteTally> tally_votes(std::span<const RawReview> reviews, FeedbackType type) {
  std::vector<VoteTally> tallies;
  for (const auto& review : reviews) {
    VoteTally tally;
    for (const auto& vote : review.votes) {
      if (vote.feedback_type != type) continue;
      (vote.value ? tally.positive : tally.negative) += 1;
    }
    if (tally.total() > 0) tallies.push_back(tally);
  }
  return tallies;
}

AgreementReport fleiss_kappa(std::span<const VoteTally> tallies) {
  std::map<int, std::size_t> by_count;
  for (const auto& t : tallies) ++by_count[t.total()];
  if (by_count.empty()) throw InputError("fleiss_kappa: no rated reviews");
  // Most common rating count; smallest count wins ties.
  int raters = 0;
  std::size_t best = 0;
  for (const auto& [count, reviews] : by_count) {
    if (reviews > best) {
      best = reviews;
      raters = count;
    }
  }
  AgreementReport report;
  report.raters = raters;
  report.reviews_used = best;
  report.reviews_excluded = tallies.size() - best;
  if (raters < 2) throw InputError("fleiss_kappa: need at least 2 ratings per review");
  if (best < 2) throw InputError("fleiss_kappa: need at least 2 reviews with equal rating counts");

  const double n = raters;
  double agreement_sum = 0.0;
  double positive_total = 0.0;
  for (const auto& t : tallies) {
    if (t.total() != raters) continue;
    const double yes = t.positive;
    const double no = t.negative;
    agreement_sum += (yes * yes + no * no - n) / (n * (n - 1.0));
    positive_total += yes;
  }
  const double reviews = static_cast<double>(best);
  const double p_yes = positive_total / (reviews * n);
  const double p_no = 1.0 - p_yes;
  report.observed_agreement = agreement_sum / reviews;
  report.expected_agreement = p_yes * p_yes + p_no * p_no;
  if (report.expected_agreement >= 1.0) {
    report.kappa = 1.0;
    report.degenerate = true;
  } else {
    report.kappa = (report.observed_agreement - report.expected_agreement) /
                   (1.0 - report.expected_agreement);
  }
  return report;
}

DatasetSplit split(std::span<const SplitItem> items, std::uint64_t seed) {
  std::vector<SplitItem> order(items.begin(), items.end());
  std::sort(order.begin(), order.end(),
            [](const SplitItem& a, const SplitItem& b) { return a.id < b.id; });
  Rng rng(seed);
  rng.shuffle(std::span<SplitItem>(order));
  const auto test_size = static_cast<std::size_t>(std::llround(kTestFraction * static_cast<double>(order.size())));

  DatasetSplit out;
  out.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < test_size) {
      out.test.push_back(order[i].id);
    } else {
      out.distant_train.push_back(order[i].id);
      if (order[i].labeled) out.gold_train.push_back(order[i].id);
    }
  }
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.gold_train.begin(), out.gold_train.end());
  std::sort(out.distant_train.begin(), out.distant_train.end());
  return out;
}

DatasetSplit split(std::span<const RawReview> reviews, std::uint64_t seed) {
  std::vector<SplitItem> items;
  items.reserve(reviews.size());
  for (const auto& review : reviews) items.push_back({review.id, resolve_labels(review).labels.any()});
  return split(std::span<const SplitItem>(items), seed);
}

DatasetSplit split(std::span<const LabeledExample> examples, std::uint64_t seed) {
  std::vector<SplitItem> items;
  items.reserve(examples.size());
  for (const auto& ex : examples) items.push_back({ex.document.review_id, ex.labels.any()});
  return split(std::span<const SplitItem>(items), seed);
}

std::string split_to_json(const DatasetSplit& split) {
  json out = json::object();
  out["seed"] = split.seed;
  out["test"] = split.test;
  out["gold_train"] = split.gold_train;
  out["distant_train"] = split.distant_train;
  return out.dump(2) + "\n";
}

DatasetSplit split_from_json(const std::string& text) {
  DatasetSplit out;
  try {
    const json in = json::parse(text);
    out.seed = in.at("seed").get<std::uint64_t>();
    out.test = in.at("test").get<std::vector<std::string>>();
    out.gold_train = in.at("gold_train").get<std::vector<std::string>>();
    out.distant_train = in.at("distant_train").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed split file: ") + e.what());
  }
  std::set<std::string> test(out.test.begin(), out.test.end());
  for (const auto& id : out.distant_train) {
    if (test.count(id)) throw InputError("split file: id '" + id + "' is in both test and distant_train");
  }
  for (const auto& id : out.gold_train) {
    if (test.count(id)) throw InputError("split file: id '" + id + "' is in both test and gold_train");
  }
  return out;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << split_to_json(split);
}

DatasetSplit load_split(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return split_from_json(ss.str());
}

}  // namespace revpat
