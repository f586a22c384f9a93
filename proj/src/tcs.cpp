#include "chemscore/tcs.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "chemscore/text.hpp"

namespace chemscore::corpus {

using nlohmann::json;

const char* to_string(Label label) {
  switch (label) {
    case Label::Chemistry: return "chemistry";
    case Label::NonChemistry: return "non-chemistry";
    case Label::Undetermined: return "undetermined";
    case Label::Unlabeled: return "unlabeled";
  }
  return "?";
}

Label label_from_string(std::string_view s) {
  if (s == "chemistry") return Label::Chemistry;
  if (s == "non-chemistry") return Label::NonChemistry;
  if (s == "undetermined") return Label::Undetermined;
  return Label::Unlabeled;
}

std::vector<std::string> lemmatize(std::string_view text) {
  std::vector<std::string> out;
  for_each_lemma(text, [&](std::string_view lemma) { out.emplace_back(lemma); });
  return out;
}

FrequencyModel FrequencyModel::from_counts(const CountMap& counts,
                                           double smoothing) {
  if (!(smoothing > 0.0)) throw CorpusError("smoothing must be > 0");
  FrequencyModel model;
  model.smoothing_ = smoothing;
  model.weights_.reserve(counts.size());
  for (const auto& [lemma, pair] : counts) {
    Entry entry;
    entry.chem_count = pair.first;
    entry.nonchem_count = pair.second;
    model.total_chem_ += pair.first;
    model.total_nonchem_ += pair.second;
    model.weights_.emplace(lemma, entry);
  }
  model.rebuild_weights();
  return model;
}

void FrequencyModel::rebuild_weights() {
  double s = smoothing_;
  double v = static_cast<double>(weights_.size());
  double chem_denominator = static_cast<double>(total_chem_) + s * v;
  double nonchem_denominator = static_cast<double>(total_nonchem_) + s * v;
  for (auto& [lemma, entry] : weights_) {
    // f_c/f_n as one division so equal count layouts give bit-equal ratios.
    entry.ratio = ((static_cast<double>(entry.chem_count) + s) * nonchem_denominator) /
                  ((static_cast<double>(entry.nonchem_count) + s) * chem_denominator);
    entry.weight = entry.ratio > 1.0 ? entry.ratio : 0.0;
  }
}

FrequencyModel FrequencyModel::fit(std::span<const CorpusDoc> docs,
                                   double smoothing) {
  CountMap counts;
  std::size_t chem_docs = 0;
  std::size_t nonchem_docs = 0;
  for (const CorpusDoc& doc : docs) {
    if (doc.label != Label::Chemistry && doc.label != Label::NonChemistry) {
      continue;
    }
    bool chem = doc.label == Label::Chemistry;
    chem ? ++chem_docs : ++nonchem_docs;
    for_each_lemma(doc.text, [&](std::string_view lemma) {
      auto& slot = counts[std::string(lemma)];
      chem ? ++slot.first : ++slot.second;
    });
  }
  if (chem_docs == 0 || nonchem_docs == 0) {
    throw EmptyClass("fit needs at least one document per class");
  }
  return from_counts(counts, smoothing);
}

TcsValue FrequencyModel::score_text(std::string_view text, bool per_type) const {
  TcsValue value;
  double sum = 0.0;
  if (!per_type) {
    std::size_t n = 0;
    for_each_lemma(text, [&](std::string_view lemma) {
      ++n;
      auto it = weights_.find(lemma);
      if (it != weights_.end()) sum += it->second.weight;
    });
    value.lemmas = n;
  } else {
    std::unordered_set<std::string> seen;
    for_each_lemma(text, [&](std::string_view lemma) {
      if (seen.insert(std::string(lemma)).second) {
        auto it = weights_.find(lemma);
        if (it != weights_.end()) sum += it->second.weight;
      }
    });
    value.lemmas = seen.size();
  }
  value.score = value.lemmas == 0 ? 0.0 : sum / static_cast<double>(value.lemmas);
  return value;
}

double FrequencyModel::ratio(std::string_view lemma) const {
  auto it = weights_.find(lemma);
  return it == weights_.end() ? 0.0 : it->second.ratio;
}

void FrequencyModel::save(std::ostream& out) const {
  out << "# chemscore-tcs v1\n";
  out << "# smoothing\t" << smoothing_ << "\n";
  // Raw per-class occurrence counts; frequencies are reconstructed exactly.
  std::vector<const WeightMap::value_type*> rows;
  rows.reserve(weights_.size());
  for (const auto& kv : weights_) rows.push_back(&kv);
  std::sort(rows.begin(), rows.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (const auto* kv : rows) {
    out << kv->first << '\t' << kv->second.chem_count << '\t'
        << kv->second.nonchem_count << '\n';
  }
}

FrequencyModel FrequencyModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# chemscore-tcs v1") {
    throw CorpusError("not a chemscore-tcs v1 model file");
  }
  if (!std::getline(in, line)) throw CorpusError("truncated model file");
  auto header = split_on(trim(line), '\t');
  if (header.size() != 2 || header[0] != "# smoothing") {
    throw CorpusError("missing smoothing header");
  }
  double smoothing = std::stod(header[1]);

  CountMap counts;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cols = split_on(line, '\t');
    if (cols.size() != 3) throw CorpusError("malformed model row: " + line);
    counts[cols[0]] = {std::stoull(cols[1]), std::stoull(cols[2])};
  }
  return from_counts(counts, smoothing);
}

std::optional<CorpusDoc> read_doc_line(std::string_view line) {
  if (trim(line).empty()) return std::nullopt;
  json j = json::parse(line);
  CorpusDoc doc;
  doc.id = j.value("id", "");
  doc.text = j.at("text").get<std::string>();
  doc.url = j.value("url", "");
  if (j.contains("label")) {
    doc.label = label_from_string(j.at("label").get<std::string>());
  }
  if (j.contains("tcs") && !j.at("tcs").is_null()) {
    doc.tcs = j.at("tcs").get<double>();
  }
  return doc;
}

std::string doc_to_json(const CorpusDoc& doc) {
  json j{{"id", doc.id}, {"text", doc.text}};
  if (!doc.url.empty()) j["url"] = doc.url;
  if (doc.label != Label::Unlabeled) j["label"] = to_string(doc.label);
  if (doc.tcs) j["tcs"] = *doc.tcs;
  return j.dump();
}

std::vector<CorpusDoc> read_docs(std::istream& in) {
  std::vector<CorpusDoc> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto doc = read_doc_line(line)) out.push_back(std::move(*doc));
  }
  return out;
}

const std::vector<double>& default_bucket_edges() {
  static const std::vector<double> edges = {0,  0.5, 1,  2,  3,
                                            4,  6,   8,  12, 16};
  return edges;
}

std::string FilterStats::to_json() const {
  json buckets = json::array();
  for (std::size_t i = 0; i < bucket_edges.size(); ++i) {
    buckets.push_back(json{{"edge", bucket_edges[i]},
                           {"docs", bucket_docs[i]},
                           {"lemmas", bucket_lemmas[i]}});
  }
  json j{{"total_docs", total_docs},
         {"retained_docs", retained_docs},
         {"total_lemmas", total_lemmas},
         {"retained_lemmas", retained_lemmas},
         {"buckets", buckets}};
  return j.dump(2);
}

FilterStats filter_stream(const FrequencyModel& model, std::istream& docs,
                          double threshold, std::ostream& retained,
                          const std::vector<double>& bucket_edges) {
  FilterStats stats;
  stats.bucket_edges = bucket_edges;
  stats.bucket_docs.assign(bucket_edges.size(), 0);
  stats.bucket_lemmas.assign(bucket_edges.size(), 0);

  std::string line;
  while (std::getline(docs, line)) {
    std::optional<CorpusDoc> doc = read_doc_line(line);
    if (!doc) continue;
    TcsValue value = model.score_text(doc->text);
    doc->tcs = value.score;
    ++stats.total_docs;
    stats.total_lemmas += value.lemmas;

    // Last bucket whose lower edge is <= score.
    std::size_t bucket = 0;
    for (std::size_t i = 0; i < bucket_edges.size(); ++i) {
      if (value.score >= bucket_edges[i]) bucket = i;
    }
    ++stats.bucket_docs[bucket];
    stats.bucket_lemmas[bucket] += value.lemmas;

    if (value.score > threshold) {
      ++stats.retained_docs;
      stats.retained_lemmas += value.lemmas;
      retained << doc_to_json(*doc) << '\n';
    }
  }
  return stats;
}

std::vector<PrPoint> pr_curve(const FrequencyModel& model,
                              std::span<const CorpusDoc> docs,
                              std::span<const double> thresholds) {
  std::vector<std::pair<double, bool>> scored;  // (score, is_chemistry)
  std::size_t positives = 0;
  for (const CorpusDoc& doc : docs) {
    if (doc.label != Label::Chemistry && doc.label != Label::NonChemistry) {
      continue;
    }
    bool positive = doc.label == Label::Chemistry;
    positives += positive;
    scored.emplace_back(model.tcs(doc.text), positive);
  }
  if (positives == 0) {
    throw NoPositives("pr_curve needs at least one chemistry-labeled doc");
  }

  std::vector<PrPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const auto& [score, positive] : scored) {
      if (score > t) (positive ? tp : fp)++;
    }
    PrPoint point;
    point.threshold = t;
    point.precision = (tp + fp) == 0
                          ? 1.0
                          : static_cast<double>(tp) / static_cast<double>(tp + fp);
    point.recall = static_cast<double>(tp) / static_cast<double>(positives);
    out.push_back(point);
  }
  return out;
}

}  // namespace chemscore::corpus
