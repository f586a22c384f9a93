#ifndef CHEMSCORE_TCS_HPP
#define CHEMSCORE_TCS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chemscore::corpus {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyClass : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

class NoPositives : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

enum class Label { Chemistry, NonChemistry, Undetermined, Unlabeled };

const char* to_string(Label label);
Label label_from_string(std::string_view s);

struct CorpusDoc {
  std::string id;
  std::string text;
  std::string url;
  Label label = Label::Unlabeled;
  std::optional<double> tcs;
};

// Maps every character outside [a-zA-Z0-9] to a space, lowercases, splits
// on whitespace, drops empties.
std::vector<std::string> lemmatize(std::string_view text);

// Allocation-free iteration over the lemmas of text; fn receives a
// string_view valid only during the call.
template <typename Fn>
void for_each_lemma(std::string_view text, Fn&& fn) {
  std::string buffer;
  buffer.reserve(32);
  for (std::size_t i = 0; i <= text.size(); ++i) {
    char c = i < text.size() ? text[i] : ' ';
    bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                 (c >= '0' && c <= '9');
    if (alnum) {
      buffer.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!buffer.empty()) {
      fn(std::string_view(buffer));
      buffer.clear();
    }
  }
}

struct TcsValue {
  double score = 0.0;
  std::size_t lemmas = 0;
};

// Per-class relative lemma frequencies with additive smoothing; the score
// weight of a lemma is f_c/f_n gated at > 1, and lemmas outside the vocab
// contribute 0.
class FrequencyModel {
 public:
  using CountMap = std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>;

  static FrequencyModel from_counts(const CountMap& counts, double smoothing);
  static FrequencyModel fit(std::span<const CorpusDoc> docs,
                            double smoothing = 1.0);

  // Mean gated ratio over lemma occurrences (the default), or over distinct
  // lemmas when per_type is set.
  TcsValue score_text(std::string_view text, bool per_type = false) const;
  double tcs(std::string_view text, bool per_type = false) const {
    return score_text(text, per_type).score;
  }

  // Smoothed f_c/f_n for one lemma; 0 when outside the vocab.
  double ratio(std::string_view lemma) const;

  std::size_t vocab_size() const { return weights_.size(); }
  double smoothing() const { return smoothing_; }

  // Versioned line-oriented serialization; exact score round-trip.
  void save(std::ostream& out) const;
  static FrequencyModel load(std::istream& in);

 private:
  struct TransparentHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
    std::size_t operator()(const std::string& s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  struct Entry {
    std::uint64_t chem_count = 0;
    std::uint64_t nonchem_count = 0;
    double ratio = 0.0;
    double weight = 0.0;  // gated ratio
  };
  using WeightMap =
      std::unordered_map<std::string, Entry, TransparentHash, std::equal_to<>>;

  // Open-addressing table over (fnv hash, arena slice, weight); the scoring
  // hot path never allocates or touches the node-based map.
  struct Slot {
    std::uint64_t hash = 0;  // 0 = empty
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
    double weight = 0.0;
  };

  WeightMap weights_;
  std::vector<Slot> table_;
  std::string arena_;
  std::uint64_t table_mask_ = 0;
  std::uint64_t total_chem_ = 0;
  std::uint64_t total_nonchem_ = 0;
  double smoothing_ = 1.0;

  void rebuild_weights();
  double lookup_weight(const char* data, std::size_t len,
                       std::uint64_t hash) const;
};

// JSON-lines {id, text, url?, label?, tcs?}.
std::optional<CorpusDoc> read_doc_line(std::string_view line);
std::string doc_to_json(const CorpusDoc& doc);
std::vector<CorpusDoc> read_docs(std::istream& in);

struct FilterStats {
  std::vector<double> bucket_edges;          // ascending lower edges
  std::vector<std::size_t> bucket_docs;      // one per edge
  std::vector<std::uint64_t> bucket_lemmas;
  std::size_t total_docs = 0;
  std::size_t retained_docs = 0;
  std::uint64_t total_lemmas = 0;
  std::uint64_t retained_lemmas = 0;

  std::string to_json() const;
};

const std::vector<double>& default_bucket_edges();

// Single streaming pass: scores each doc, writes docs with tcs > threshold
// (with the tcs field filled) to retained, and tallies per-bucket counts.
FilterStats filter_stream(const FrequencyModel& model, std::istream& docs,
                          double threshold, std::ostream& retained,
                          const std::vector<double>& bucket_edges =
                              default_bucket_edges());

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
};

// Precision/recall of the chemistry class at each threshold (score strictly
// above). Undetermined and unlabeled docs are excluded.
std::vector<PrPoint> pr_curve(const FrequencyModel& model,
                              std::span<const CorpusDoc> docs,
                              std::span<const double> thresholds);

}  // namespace chemscore::corpus

#endif  // CHEMSCORE_TCS_HPP
