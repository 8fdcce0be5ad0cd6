#include "cxg/association.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cxg/text.hpp"

namespace cxg {
namespace {

constexpr std::array<Level, kLevelCount> kLevels = {Level::Lex, Level::Syn, Level::Sem};

std::uint64_t at_or_zero(const std::vector<std::uint64_t>& v, FillerId id) {
  return id < v.size() ? v[id] : 0;
}

double conditional(double hits, double total) { return total > 0.0 ? hits / total : 0.0; }

}  // namespace

FillerId FillerIndex::intern(const SlotFiller& filler) {
  const auto [it, inserted] = ids_.emplace(filler, static_cast<FillerId>(fillers_.size()));
  if (inserted) fillers_.push_back(filler);
  return it->second;
}

std::optional<FillerId> FillerIndex::find(const SlotFiller& filler) const {
  const auto it = ids_.find(filler);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenFillers> encode_sentence(const Sentence& sentence, FillerIndex& fillers) {
  std::vector<TokenFillers> out;
  out.reserve(sentence.size());
  for (const auto& token : sentence.tokens) {
    TokenFillers ids{};
    for (auto level : kLevels) {
      const auto f = SlotFiller::of(token, level);
      ids[static_cast<std::size_t>(level)] = f ? fillers.intern(*f) : kNoFiller;
    }
    out.push_back(ids);
  }
  return out;
}

std::vector<TokenFillers> lookup_sentence(const Sentence& sentence, const FillerIndex& fillers) {
  std::vector<TokenFillers> out;
  out.reserve(sentence.size());
  for (const auto& token : sentence.tokens) {
    TokenFillers ids{};
    for (auto level : kLevels) {
      const auto f = SlotFiller::of(token, level);
      const auto id = f ? fillers.find(*f) : std::nullopt;
      ids[static_cast<std::size_t>(level)] = id.value_or(kNoFiller);
    }
    out.push_back(ids);
  }
  return out;
}

std::uint64_t ContingencyCounts::pair_count(FillerId x, FillerId y) const {
  const auto it = pair_counts.find(pair_key(x, y));
  return it == pair_counts.end() ? 0 : it->second;
}

std::uint64_t ContingencyCounts::pair_count(const SlotFiller& x, const SlotFiller& y) const {
  const auto ix = fillers->find(x);
  const auto iy = fillers->find(y);
  return ix && iy ? pair_count(*ix, *iy) : 0;
}

std::uint64_t ContingencyCounts::left_total(const SlotFiller& x) const {
  const auto id = fillers->find(x);
  return id ? at_or_zero(left_totals, *id) : 0;
}

std::uint64_t ContingencyCounts::right_total(const SlotFiller& y) const {
  const auto id = fillers->find(y);
  return id ? at_or_zero(right_totals, *id) : 0;
}

ContingencyCounts count_pairs(const EncodedCorpus& corpus) {
  ContingencyCounts counts;
  auto& index = *counts.fillers;
  for (const auto& sentence : corpus.sentences) {
    const auto ids = encode_sentence(sentence, index);
    counts.left_totals.resize(index.size(), 0);
    counts.right_totals.resize(index.size(), 0);
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      ++counts.total_pairs;
      for (FillerId x : ids[i]) {
        if (x == kNoFiller) continue;
        ++counts.left_totals[x];
        for (FillerId y : ids[i + 1])
          if (y != kNoFiller) ++counts.pair_counts[pair_key(x, y)];
      }
      for (FillerId y : ids[i + 1])
        if (y != kNoFiller) ++counts.right_totals[y];
    }
  }
  counts.left_totals.resize(index.size(), 0);
  counts.right_totals.resize(index.size(), 0);
  return counts;
}

ContingencyCounts transpose(const ContingencyCounts& counts) {
  ContingencyCounts t;
  t.fillers = counts.fillers;
  t.total_pairs = counts.total_pairs;
  t.left_totals = counts.right_totals;
  t.right_totals = counts.left_totals;
  t.pair_counts.reserve(counts.pair_counts.size());
  for (const auto& [key, n] : counts.pair_counts) {
    const auto x = static_cast<FillerId>(key >> 32);
    const auto y = static_cast<FillerId>(key & 0xFFFFFFFFu);
    t.pair_counts.emplace(pair_key(y, x), n);
  }
  return t;
}

double delta_p(const Contingency2x2& t, Direction direction) {
  if (direction == Direction::LR) return conditional(t.a, t.a + t.b) - conditional(t.c, t.c + t.d);
  return conditional(t.a, t.a + t.c) - conditional(t.b, t.b + t.d);
}

Contingency2x2 contingency(const ContingencyCounts& counts, FillerId x, FillerId y) {
  const auto a = counts.pair_count(x, y);
  const auto b = at_or_zero(counts.left_totals, x) - a;
  const auto c = at_or_zero(counts.right_totals, y) - a;
  const auto d = counts.total_pairs - a - b - c;
  return {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c), static_cast<double>(d)};
}

double delta_p(const ContingencyCounts& counts, const SlotFiller& x, const SlotFiller& y, Direction direction) {
  if (counts.total_pairs == 0) throw std::invalid_argument("delta_p: no adjacent pairs counted");
  const auto ix = counts.fillers->find(x);
  const auto iy = counts.fillers->find(y);
  Contingency2x2 t;
  const auto total = static_cast<double>(counts.total_pairs);
  if (ix && iy) {
    t = contingency(counts, *ix, *iy);
  } else {
    // one side never observed: a = 0 and the other side's marginal is all it has
    const double left = ix ? static_cast<double>(at_or_zero(counts.left_totals, *ix)) : 0.0;
    const double right = iy ? static_cast<double>(at_or_zero(counts.right_totals, *iy)) : 0.0;
    t = {0.0, left, right, total - left - right};
  }
  return delta_p(t, direction);
}

double AssociationMatrix::lr(FillerId x, FillerId y) const {
  const auto it = values.find(pair_key(x, y));
  return it == values.end() ? 0.0 : it->second.lr;
}

double AssociationMatrix::rl(FillerId x, FillerId y) const {
  const auto it = values.find(pair_key(x, y));
  return it == values.end() ? 0.0 : it->second.rl;
}

double AssociationMatrix::lr(const SlotFiller& x, const SlotFiller& y) const {
  const auto ix = fillers->find(x);
  const auto iy = fillers->find(y);
  return ix && iy ? lr(*ix, *iy) : 0.0;
}

double AssociationMatrix::rl(const SlotFiller& x, const SlotFiller& y) const {
  const auto ix = fillers->find(x);
  const auto iy = fillers->find(y);
  return ix && iy ? rl(*ix, *iy) : 0.0;
}

AssociationMatrix build_matrix(const ContingencyCounts& counts, std::uint64_t min_pair_freq) {
  if (min_pair_freq < 1) throw std::invalid_argument("build_matrix: min_pair_freq must be >= 1");
  AssociationMatrix m;
  m.fillers = counts.fillers;
  m.min_pair_freq = min_pair_freq;
  for (const auto& [key, n] : counts.pair_counts) {
    if (n < min_pair_freq) continue;
    const auto t = contingency(counts, static_cast<FillerId>(key >> 32), static_cast<FillerId>(key & 0xFFFFFFFFu));
    m.values.emplace(key, AssociationValue{delta_p(t, Direction::LR), delta_p(t, Direction::RL)});
  }
  return m;
}

std::uint64_t scaled_min_pair_freq(std::size_t word_count, double per_million) {
  const double scaled = std::round(per_million * static_cast<double>(word_count) / 1e6);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(scaled));
}

void write_matrix_tsv(const AssociationMatrix& matrix, std::ostream& out) {
  std::vector<std::pair<std::uint64_t, AssociationValue>> rows(matrix.values.begin(), matrix.values.end());
  const auto& f = *matrix.fillers;
  std::sort(rows.begin(), rows.end(), [&](const auto& p, const auto& q) {
    const auto px = f.at(static_cast<FillerId>(p.first >> 32)), qx = f.at(static_cast<FillerId>(q.first >> 32));
    if (px != qx) return px < qx;
    return f.at(static_cast<FillerId>(p.first & 0xFFFFFFFFu)) < f.at(static_cast<FillerId>(q.first & 0xFFFFFFFFu));
  });
  out << "level_x\tvalue_x\tlevel_y\tvalue_y\tdp_lr\tdp_rl\n";
  for (const auto& [key, v] : rows) {
    const auto& x = f.at(static_cast<FillerId>(key >> 32));
    const auto& y = f.at(static_cast<FillerId>(key & 0xFFFFFFFFu));
    out << to_string(x.level()) << '\t' << x.value_text() << '\t' << to_string(y.level()) << '\t'
        << y.value_text() << '\t' << text::format_double(v.lr) << '\t' << text::format_double(v.rl) << '\n';
  }
}

}  // namespace cxg
