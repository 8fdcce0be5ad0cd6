#pragma once

// Brute-force reference implementations used only by tests. None of these
// touch PatternIndex, ContingencyCounts or the incremental MDL coder.

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cxg/association.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"
#include "cxg/matcher.hpp"

namespace cxg::oracle {

inline bool matches_at(const SlotSequence& slots, const Sentence& s, std::size_t start) {
  if (start + slots.size() > s.size()) return false;
  for (std::size_t j = 0; j < slots.size(); ++j)
    if (!slots[j].satisfied_by(s.tokens[start + j])) return false;
  return true;
}

/// (cid, sentence, start) for every sliding-window match.
using MatchKey = std::tuple<ConstructionId, std::size_t, std::size_t>;

inline std::set<MatchKey> naive_matches(const Grammar& grammar, const EncodedCorpus& corpus) {
  std::set<MatchKey> out;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s)
    for (const auto& c : grammar)
      for (std::size_t i = 0; i < corpus.sentences[s].size(); ++i)
        if (matches_at(c.slots, corpus.sentences[s], i)) out.emplace(c.id, s, i);
  return out;
}

/// ΔP from a 2x2 table built by scanning every adjacent position directly.
inline double brute_delta_p(const EncodedCorpus& corpus, const SlotFiller& x, const SlotFiller& y, Direction dir) {
  double a = 0, b = 0, c = 0, d = 0;
  for (const auto& s : corpus.sentences)
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const bool cue = x.satisfied_by(s.tokens[i]);
      const bool outcome = y.satisfied_by(s.tokens[i + 1]);
      if (cue && outcome) ++a;
      else if (cue) ++b;
      else if (outcome) ++c;
      else ++d;
    }
  const auto cond = [](double h, double t) { return t > 0 ? h / t : 0.0; };
  if (dir == Direction::LR) return cond(a, a + b) - cond(c, c + d);
  return cond(a, a + c) - cond(b, b + d);
}

inline std::vector<SlotFiller> fillers_of(const Token& t) {
  std::vector<SlotFiller> out;
  for (auto level : {Level::Lex, Level::Syn, Level::Sem})
    if (auto f = SlotFiller::of(t, level)) out.push_back(*f);
  return out;
}

/// Every slot sequence the search space admits: all level choices from every
/// start, each transition at or above the threshold, length in
/// [min_len, max_len], mean transition above the threshold. ΔP values come
/// from brute_delta_p.
inline std::set<SlotSequence> exhaustive_candidates(const EncodedCorpus& corpus, std::size_t min_len,
                                                    std::size_t max_len, double threshold,
                                                    std::uint64_t min_pair_freq = 1) {
  std::map<std::pair<SlotSequence, SlotSequence>, double> memo;  // keyed by 1-slot sequences
  const auto dp = [&](const SlotFiller& x, const SlotFiller& y) {
    const auto key = std::make_pair(SlotSequence{x}, SlotSequence{y});
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::uint64_t joint = 0;
    for (const auto& s : corpus.sentences)
      for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (x.satisfied_by(s.tokens[i]) && y.satisfied_by(s.tokens[i + 1])) ++joint;
    const double v = joint >= min_pair_freq ? brute_delta_p(corpus, x, y, Direction::LR) : 0.0;
    memo.emplace(key, v);
    return v;
  };

  std::set<SlotSequence> out;
  for (const auto& s : corpus.sentences)
    for (std::size_t start = 0; start < s.size(); ++start) {
      // depth-first over level choices
      std::vector<std::pair<SlotSequence, double>> stack;
      for (auto& f : fillers_of(s.tokens[start])) stack.push_back({SlotSequence{f}, 0.0});
      while (!stack.empty()) {
        auto [seq, sum] = stack.back();
        stack.pop_back();
        if (seq.size() >= min_len && sum / static_cast<double>(seq.size() - 1) > threshold) out.insert(seq);
        const std::size_t pos = start + seq.size();
        if (seq.size() >= max_len || pos >= s.size()) continue;
        for (auto& f : fillers_of(s.tokens[pos])) {
          const double v = dp(seq.back(), f);
          if (v < threshold) continue;
          auto next = seq;
          next.push_back(f);
          stack.push_back({std::move(next), sum + v});
        }
      }
    }
  return out;
}

/// Greedy longest-match coder written directly from its definition over
/// the naive matcher.
inline double reference_data_cost(const Grammar& grammar, const EncodedCorpus& corpus, std::size_t lex_vocab) {
  std::map<ConstructionId, double> count;
  double total = 0;
  for (const auto& [cid, s, i] : naive_matches(grammar, corpus)) {
    count[cid] += 1;
    total += 1;
  }
  const double denom = total + static_cast<double>(grammar.size());
  const double literal = std::log2(static_cast<double>(lex_vocab) + 1.0);
  double bits = 0;
  for (const auto& s : corpus.sentences) {
    std::size_t i = 0;
    while (i < s.size()) {
      const Construction* best = nullptr;
      for (const auto& c : grammar) {
        if (!matches_at(c.slots, s, i)) continue;
        if (best == nullptr || c.size() > best->size() ||
            (c.size() == best->size() && (count[c.id] > count[best->id] ||
                                          (count[c.id] == count[best->id] && c.id < best->id))))
          best = &c;
      }
      if (best != nullptr) {
        bits += -std::log2((count[best->id] + 1.0) / denom);
        i += best->size();
      } else {
        bits += literal;
        ++i;
      }
    }
  }
  return bits;
}

/// Minimal Newick reader: returns the tree as nested leaf sets (each
/// internal node's sorted leaves), plus the leaf list.
struct NewickTree {
  std::vector<std::string> leaves;
  std::set<std::set<std::string>> clades;
};

inline NewickTree parse_newick(const std::string& text) {
  NewickTree tree;
  std::size_t i = 0;
  const auto skip_length = [&] {
    if (i < text.size() && text[i] == ':') {
      ++i;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                                 text[i] == 'e' || text[i] == '-' || text[i] == '+'))
        ++i;
    }
  };
  const auto parse = [&](auto&& self) -> std::set<std::string> {
    std::set<std::string> leaves;
    if (text[i] == '(') {
      ++i;
      while (true) {
        auto sub = self(self);
        leaves.insert(sub.begin(), sub.end());
        if (text[i] == ',') {
          ++i;
          continue;
        }
        if (text[i] != ')') throw std::runtime_error("newick: expected ')'");
        ++i;
        break;
      }
      tree.clades.insert(leaves);
    } else {
      std::string label;
      if (text[i] == '\'') {
        ++i;
        while (true) {
          if (text[i] == '\'' && i + 1 < text.size() && text[i + 1] == '\'') {
            label += '\'';
            i += 2;
          } else if (text[i] == '\'') {
            ++i;
            break;
          } else {
            label += text[i++];
          }
        }
      } else {
        while (i < text.size() && text[i] != ':' && text[i] != ',' && text[i] != ')' && text[i] != ';')
          label += text[i++];
      }
      tree.leaves.push_back(label);
      leaves.insert(label);
    }
    skip_length();
    return leaves;
  };
  parse(parse);
  if (i >= text.size() || text[i] != ';') throw std::runtime_error("newick: missing ';'");
  return tree;
}

}  // namespace cxg::oracle
