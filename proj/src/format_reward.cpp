#include "chemscore/format_reward.hpp"

#include "chemscore/text.hpp"

namespace chemscore::rewards {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kBoundary = "</think>\n<answer>";

}  // namespace

SpanMatch match_answer_block(std::string_view o) {
  SpanMatch m;
  std::size_t open = o.find(kAnswerOpen);
  if (open == std::string_view::npos) return m;
  std::size_t close = o.rfind(kAnswerClose);
  if (close == std::string_view::npos || close < open + kAnswerOpen.size()) {
    return m;
  }
  m.matched = true;
  m.begin = open + kAnswerOpen.size();
  m.end = close;
  return m;
}

ThinkAnswerMatch match_think_answer(std::string_view o) {
  ThinkAnswerMatch m;
  std::size_t think = o.find(kThinkOpen);
  if (think == std::string_view::npos) return m;
  std::size_t answer_close = o.rfind(kAnswerClose);
  if (answer_close == std::string_view::npos) return m;
  // Greedy first group: the last boundary that still leaves a closing tag.
  std::size_t limit = answer_close;
  if (limit < kBoundary.size()) return m;
  std::size_t boundary = std::string_view::npos;
  std::size_t from = think + kThinkOpen.size();
  while (from + kBoundary.size() <= answer_close) {
    std::size_t hit = o.find(kBoundary, from);
    if (hit == std::string_view::npos ||
        hit + kBoundary.size() > answer_close) {
      break;
    }
    boundary = hit;
    from = hit + 1;
  }
  if (boundary == std::string_view::npos) return m;
  m.matched = true;
  m.think_begin = think + kThinkOpen.size();
  m.think_end = boundary;
  m.answer_begin = boundary + kBoundary.size();
  m.answer_end = answer_close;
  return m;
}

double format_reward(std::string_view o) {
  double r = 0.0;

  for (std::string_view tag : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
    r += count_occurrences(o, tag) == 1 ? 0.05 : -0.05;
  }

  r += o.substr(0, kThinkOpen.size()) == kThinkOpen ? 0.05 : -0.05;
  r += o.size() >= kAnswerClose.size() &&
               o.substr(o.size() - kAnswerClose.size()) == kAnswerClose
           ? 0.05
           : -0.05;

  r += count_occurrences(o, kBoundary) == 1 ? 0.1 : -0.1;

  SpanMatch m1 = match_answer_block(o);
  if (!m1.matched) {
    r -= 0.2;
  } else {
    r += 0.2;  // single capture group by construction
  }

  ThinkAnswerMatch m2 = match_think_answer(o);
  if (!m2.matched) {
    r -= 0.4;
  } else {
    r += 0.4;  // two capture groups by construction
  }

  return r;
}

std::optional<std::string> extract_answer(std::string_view o) {
  SpanMatch m = match_answer_block(o);
  if (!m.matched) return std::nullopt;
  return std::string(trim(o.substr(m.begin, m.end - m.begin)));
}

}  // namespace chemscore::rewards
