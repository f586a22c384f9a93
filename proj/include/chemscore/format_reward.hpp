#ifndef CHEMSCORE_FORMAT_REWARD_HPP
#define CHEMSCORE_FORMAT_REWARD_HPP

#include <optional>
#include <string>
#include <string_view>

namespace chemscore::rewards {

struct SpanMatch {
  bool matched = false;
  std::size_t begin = 0;  // group start
  std::size_t end = 0;    // group end (exclusive)
};

// Search semantics of <answer>(.*)</answer> with dot-matches-newline and a
// greedy group: first opening tag, last closing tag after it.
SpanMatch match_answer_block(std::string_view o);

struct ThinkAnswerMatch {
  bool matched = false;
  std::size_t think_begin = 0, think_end = 0;
  std::size_t answer_begin = 0, answer_end = 0;
};

// Search semantics of <think>(.*)</think>\n<answer>(.*)</answer>, greedy.
ThinkAnswerMatch match_think_answer(std::string_view o);

// Incremental formatting reward in [-1, 1]: +-0.05 per exactly-once check of
// the four tags, +-0.05 for starts-with <think>, +-0.05 for ends-with
// </answer>, +-0.1 for exactly one "</think>\n<answer>" boundary, +0.2/-0.2
// for the answer block match, +0.4/-0.4 for the whole think/answer pattern.
double format_reward(std::string_view o);

// First answer-block group, trimmed; nullopt when absent.
std::optional<std::string> extract_answer(std::string_view o);

}  // namespace chemscore::rewards

#endif  // CHEMSCORE_FORMAT_REWARD_HPP
