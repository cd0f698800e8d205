#include "revpat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "revpat/error.hpp"
#include "revpat/rng.hpp"

namespace revpat {
namespace {

using nlohmann::json;

double dot(const SparseVector& x, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& [i, v] : x) s += w[i] * v;
  return s;
}

}  // namespace

std::vector<std::string> extract_features(const Document& doc) {
  std::vector<std::string> out;
  const auto& t = doc.tokens;
  out.reserve(3 * t.size());
  for (const auto& token : t) out.push_back("w:" + token.norm);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    out.push_back("b:" + t[i].norm + " " + t[i + 1].norm);
    out.push_back("p:" + t[i].pos + " " + t[i + 1].pos);
  }
  return out;
}

FeatureSpace fit_feature_space(std::span<const Document> docs, std::size_t min_df) {
  std::map<std::string, std::uint32_t> df;
  for (const auto& doc : docs) {
    auto features = extract_features(doc);
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    for (auto& f : features) ++df[std::move(f)];
  }
  FeatureSpace space;
  space.fitted_on = docs.size();
  const double n = static_cast<double>(docs.size());
  for (const auto& [feature, count] : df) {
    if (count < min_df) continue;
    space.vocabulary.emplace(feature, static_cast<std::uint32_t>(space.document_frequency.size()));
    space.document_frequency.push_back(count);
    space.idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  return space;
}

SparseVector featurize(const Document& doc, const FeatureSpace& space) {
  std::map<std::uint32_t, std::size_t> tf;
  for (const auto& f : extract_features(doc)) {
    if (auto it = space.vocabulary.find(f); it != space.vocabulary.end()) ++tf[it->second];
  }
  SparseVector x;
  x.reserve(tf.size());
  double norm = 0.0;
  for (const auto& [index, count] : tf) {
    const double v = (1.0 + std::log(static_cast<double>(count))) * space.idf[index];
    x.emplace_back(index, v);
    norm += v * v;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& entry : x) entry.second /= norm;
  }
  return x;
}

double LinearModel::decision_value(const Document& doc) const {
  return dot(featurize(doc, space), weights) + bias;
}

bool predict(const LinearModel& model, const Document& doc) { return model.predict(doc); }

LinearModel train(std::span<const Document> docs, std::span<const bool> labels,
                  const Hyperparameters& hyper, TrainingTrace* trace) {
  if (docs.size() != labels.size()) throw InputError("train: documents and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw TrainingError("train: need at least one positive and one negative example (got " +
                        std::to_string(positives) + " positive, " + std::to_string(negatives) +
                        " negative)");
  }
  if (!(hyper.lambda > 0.0)) throw InputError("train: lambda must be > 0");

  LinearModel model;
  model.hyperparameters = hyper;
  const double c_pos = hyper.class_weight_positive.value_or(static_cast<double>(negatives) /
                                                           static_cast<double>(positives));
  model.hyperparameters.class_weight_positive = c_pos;
  model.space = fit_feature_space(docs);

  // The bias is an extra always-on feature, so it shares the L2 penalty.
  const std::size_t dim = model.space.vocabulary.size();
  const auto bias_index = static_cast<std::uint32_t>(dim);
  std::vector<SparseVector> xs;
  xs.reserve(docs.size());
  for (const auto& doc : docs) {
    xs.push_back(featurize(doc, model.space));
    xs.back().emplace_back(bias_index, 1.0);
  }
  std::vector<double> ys(labels.size());
  std::vector<double> cs(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ys[i] = labels[i] ? 1.0 : -1.0;
    cs[i] = labels[i] ? c_pos : 1.0;
  }

  const double lambda = hyper.lambda;
  const double n = static_cast<double>(docs.size());
  // ||w*|| is bounded by sqrt(2 f(0) / lambda), where f(0) is the mean class weight.
  const double radius = std::sqrt(2.0 * (std::accumulate(cs.begin(), cs.end(), 0.0) / n) / lambda);

  // w = scale * v keeps the per-step shrink O(1).
  std::vector<double> v(dim + 1, 0.0);
  double scale = 1.0;
  double v_norm2 = 0.0;

  // The returned model is the mean of the iterates over the second half of
  // training; the last iterate alone oscillates with the 1/(lambda t) step.
  // Lazily: sum of iterates = S * v - u, with S the running sum of scales and
  // u[j] accumulating each change of v[j] times the S seen before it.
  const std::size_t averaging_from = hyper.epochs / 2;
  std::vector<double> flushed(dim + 1, 0.0);
  std::vector<double> u(dim + 1, 0.0);
  double scale_sum = 0.0;
  std::uint64_t averaged_steps = 0;
  bool averaging = false;

  auto flush = [&] {
    for (std::size_t j = 0; j <= dim; ++j) flushed[j] += scale_sum * v[j] - u[j];
    std::fill(u.begin(), u.end(), 0.0);
    scale_sum = 0.0;
  };
  auto current = [&] {
    std::vector<double> w(dim + 1);
    for (std::size_t j = 0; j <= dim; ++j) {
      w[j] = averaging ? (flushed[j] + scale_sum * v[j] - u[j]) / static_cast<double>(averaged_steps)
                       : scale * v[j];
    }
    return w;
  };
  auto objective = [&] {
    const std::vector<double> w = current();
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      loss += cs[i] * std::max(0.0, 1.0 - ys[i] * dot(xs[i], w));
    }
    double norm2 = 0.0;
    for (double x : w) norm2 += x * x;
    return 0.5 * lambda * norm2 + loss / n;
  };

  Rng rng(hyper.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    averaging = averaging || epoch >= averaging_from;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = ys[i] * scale * dot(xs[i], v);
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        if (averaging) flush();
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
        v_norm2 = 0.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        const double step = eta * cs[i] * ys[i] / scale;
        for (const auto& [j, value] : xs[i]) {
          const double before = v[j];
          v[j] += step * value;
          v_norm2 += v[j] * v[j] - before * before;
          if (averaging) u[j] += (v[j] - before) * scale_sum;
        }
      }
      const double norm = scale * std::sqrt(std::max(v_norm2, 0.0));
      if (norm > radius) scale *= radius / norm;
      if (scale < 1e-9) {
        if (averaging) flush();
        for (auto& w : v) w *= scale;
        v_norm2 *= scale * scale;
        scale = 1.0;
      }
      if (averaging) {
        scale_sum += scale;
        ++averaged_steps;
      }
    }
    if (trace) trace->objective.push_back(objective());
  }

  const std::vector<double> w = current();
  model.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim));
  model.bias = w[dim];
  return model;
}

LinearModel distant_train(std::span<const Document> unlabeled, const PatternGroup& group,
                          const Hyperparameters& hyper) {
  if (unlabeled.empty()) throw InputError("distant_train: no documents");
  if (group.patterns.empty()) throw InputError("distant_train: pattern group is empty");
  auto labels = std::make_unique<bool[]>(unlabeled.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    labels[i] = group_label(group, unlabeled[i]);
    positives += labels[i] ? 1 : 0;
  }
  if (positives == 0 || positives == unlabeled.size()) {
    throw TrainingError(std::string("distant_train: the pattern group labels every document ") +
                        (positives == 0 ? "negative" : "positive") +
                        "; use a richer pattern group");
  }
  return train(unlabeled, std::span<const bool>(labels.get(), unlabeled.size()), hyper);
}

std::string model_to_json(const LinearModel& model) {
  json j;
  json vocab = json::object();
  for (const auto& [feature, index] : model.space.vocabulary) vocab[feature] = index;
  j["vocabulary"] = std::move(vocab);
  j["idf"] = model.space.idf;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  const auto& h = model.hyperparameters;
  j["hyperparameters"] = {{"lambda", h.lambda},
                          {"epochs", h.epochs},
                          {"class_weight_positive", h.class_weight_positive.value_or(1.0)},
                          {"seed", h.seed}};
  return j.dump(1) + "\n";
}

LinearModel model_from_json(const std::string& text) {
  LinearModel model;
  try {
    const json j = json::parse(text);
    const auto& vocab = j.at("vocabulary");
    for (auto it = vocab.begin(); it != vocab.end(); ++it) {
      model.space.vocabulary.emplace(it.key(), it.value().get<std::uint32_t>());
    }
    model.space.idf = j.at("idf").get<std::vector<double>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    const auto& h = j.at("hyperparameters");
    model.hyperparameters.lambda = h.at("lambda").get<double>();
    model.hyperparameters.epochs = h.at("epochs").get<std::size_t>();
    model.hyperparameters.class_weight_positive = h.at("class_weight_positive").get<double>();
    model.hyperparameters.seed = h.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
  const std::size_t dim = model.space.vocabulary.size();
  if (model.space.idf.size() != dim || model.weights.size() != dim) {
    throw InputError("model file: vocabulary, idf and weights differ in length");
  }
  std::vector<bool> seen(dim, false);
  for (const auto& [feature, index] : model.space.vocabulary) {
    if (index >= dim || seen[index]) throw InputError("model file: vocabulary indices are not dense");
    seen[index] = true;
  }
  return model;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(model);
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace revpat
