#include "cxg/induction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "cxg/matcher.hpp"
#include "cxg/parallel.hpp"

namespace cxg {
namespace {

using FillerSeq = std::u32string;  // FillerIds, used as a hashable key

struct Beam {
  FillerSeq seq;
  double sum = 0.0;  // summed transition ΔP
};

bool better_beam(const Beam& a, const Beam& b) {
  if (a.sum != b.sum) return a.sum > b.sum;
  return a.seq < b.seq;
}

void search_from(const std::vector<TokenFillers>& tokens, std::size_t start, const AssociationMatrix& matrix,
                 const BeamConfig& config, std::unordered_set<FillerSeq>& found) {
  std::vector<Beam> beams;
  for (FillerId f : tokens[start])
    if (f != kNoFiller) beams.push_back(Beam{FillerSeq(1, static_cast<char32_t>(f)), 0.0});

  std::vector<Beam> next;
  for (std::size_t depth = 1; depth < config.max_len && start + depth < tokens.size(); ++depth) {
    next.clear();
    for (const auto& beam : beams) {
      const auto last = static_cast<FillerId>(beam.seq.back());
      for (FillerId f : tokens[start + depth]) {
        if (f == kNoFiller) continue;
        const double s = matrix.lr(last, f);
        if (s < config.dp_threshold) continue;
        Beam b{beam.seq, beam.sum + s};
        b.seq.push_back(static_cast<char32_t>(f));
        next.push_back(std::move(b));
      }
    }
    if (next.empty()) break;
    if (next.size() > config.beam_width) {
      std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(config.beam_width), next.end(),
                        better_beam);
      next.resize(config.beam_width);
    }
    const std::size_t len = depth + 1;
    if (len >= config.min_len)
      for (const auto& b : next)
        if (b.sum / static_cast<double>(len - 1) > config.dp_threshold) found.insert(b.seq);
    beams.swap(next);
  }
}

double log2_or_zero(double x) { return x > 0.0 ? std::log2(x) : 0.0; }

// Per-sentence code statistics; total data bits are
// emissions * log2(N + |G|) - log_counts + literals * literal_bits.
struct CodeStats {
  std::int64_t emissions = 0;
  double log_counts = 0.0;  // sum over emissions of log2(count + 1)
  std::int64_t literals = 0;

  CodeStats& operator+=(const CodeStats& o) {
    emissions += o.emissions;
    log_counts += o.log_counts;
    literals += o.literals;
    return *this;
  }
  CodeStats& operator-=(const CodeStats& o) {
    emissions -= o.emissions;
    log_counts -= o.log_counts;
    literals -= o.literals;
    return *this;
  }
};

struct Placed {
  std::uint32_t start;
  std::uint32_t length;
  std::uint64_t count;
  ConstructionId id;
};

bool preferred(const Placed& a, const Placed& b) {
  if (a.length != b.length) return a.length > b.length;
  if (a.count != b.count) return a.count > b.count;
  return a.id < b.id;
}

// Greedy longest-match parse of one sentence over the given matches.
CodeStats code_sentence(std::size_t length, const std::vector<Placed>& matches, std::vector<const Placed*>& best) {
  best.assign(length, nullptr);
  for (const auto& m : matches)
    if (best[m.start] == nullptr || preferred(m, *best[m.start])) best[m.start] = &m;
  CodeStats stats;
  std::size_t pos = 0;
  while (pos < length) {
    if (const auto* m = best[pos]) {
      ++stats.emissions;
      stats.log_counts += std::log2(static_cast<double>(m->count) + 1.0);
      pos += m->length;
    } else {
      ++stats.literals;
      ++pos;
    }
  }
  return stats;
}

double data_bits(const CodeStats& s, std::uint64_t total_count, std::size_t grammar_size, double literal_bits) {
  const double denom = static_cast<double>(total_count) + static_cast<double>(grammar_size);
  return static_cast<double>(s.emissions) * log2_or_zero(denom) - s.log_counts +
         static_cast<double>(s.literals) * literal_bits;
}

}  // namespace

void BeamConfig::validate() const {
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  if (min_len < kMinSlots) throw std::invalid_argument("min_len must be >= 3");
  if (max_len < min_len) throw std::invalid_argument("max_len must be >= min_len");
  if (max_candidates < 1) throw std::invalid_argument("max_candidates must be >= 1");
}

std::vector<Candidate> beam_search_candidates(const EncodedCorpus& corpus, const AssociationMatrix& matrix,
                                              const BeamConfig& config, unsigned threads) {
  config.validate();
  const auto& sentences = corpus.sentences;
  const unsigned workers = effective_workers(sentences.size(), threads);
  std::vector<std::unordered_set<FillerSeq>> found(workers);
  parallel_chunks(sentences.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto tokens = lookup_sentence(sentences[s], *matrix.fillers);
      for (std::size_t i = 0; i < tokens.size(); ++i) search_from(tokens, i, matrix, config, found[w]);
    }
  });
  for (unsigned w = 1; w < workers; ++w) found[0].merge(found[w]);

  std::vector<FillerSeq> unique(found[0].begin(), found[0].end());
  found.clear();
  std::sort(unique.begin(), unique.end());

  std::vector<Candidate> out;
  out.reserve(unique.size());
  PatternIndex index;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const auto& seq = unique[i];
    Candidate c;
    double sum = 0.0;
    for (std::size_t j = 0; j < seq.size(); ++j) {
      c.slots.push_back(matrix.fillers->at(static_cast<FillerId>(seq[j])));
      if (j > 0) sum += matrix.lr(static_cast<FillerId>(seq[j - 1]), static_cast<FillerId>(seq[j]));
    }
    c.mean_dp = sum / static_cast<double>(seq.size() - 1);
    index.add(static_cast<ConstructionId>(i), c.slots);
    out.push_back(std::move(c));
  }
  unique.clear();

  std::vector<std::vector<std::uint64_t>> freq(workers, std::vector<std::uint64_t>(out.size(), 0));
  parallel_chunks(sentences.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<RawMatch> raw;
    for (std::size_t s = begin; s < end; ++s) {
      raw.clear();
      index.collect(sentences[s], raw);
      for (const auto& m : raw) ++freq[w][static_cast<std::size_t>(m.id)];
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (unsigned w = 0; w < workers; ++w) out[i].frequency += freq[w][i];
    out[i].score = out[i].mean_dp * std::log(static_cast<double>(std::max<std::uint64_t>(out[i].frequency, 1)));
  }

  // `out` is in FillerSeq order, which makes the final tie-break deterministic
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.frequency > b.frequency;
  });
  if (out.size() > config.max_candidates) out.resize(config.max_candidates);
  return out;
}

std::size_t VocabSizes::at(Level level) const {
  switch (level) {
    case Level::Lex: return lex;
    case Level::Syn: return syn;
    case Level::Sem: return sem;
  }
  return 1;
}

VocabSizes vocab_sizes(const EncodedCorpus& corpus, int clusters) {
  std::unordered_set<std::string> forms;
  for (const auto& s : corpus.sentences)
    for (const auto& t : s.tokens) forms.insert(t.form);
  VocabSizes v;
  v.lex = std::max<std::size_t>(1, forms.size());
  v.sem = static_cast<std::size_t>(std::max(1, clusters));
  return v;
}

double construction_cost(const SlotSequence& slots, const VocabSizes& vocab, std::size_t max_len) {
  double bits = std::log2(static_cast<double>(max_len));
  for (const auto& s : slots) bits += std::log2(3.0) + std::log2(static_cast<double>(vocab.at(s.level())));
  return bits;
}

double grammar_cost(const Grammar& grammar, const VocabSizes& vocab, std::size_t max_len) {
  double bits = 0.0;
  for (const auto& c : grammar) bits += construction_cost(c.slots, vocab, max_len);
  return bits;
}

double data_cost(const Grammar& grammar, const EncodedCorpus& corpus, const VocabSizes& vocab) {
  const double literal_bits = std::log2(static_cast<double>(vocab.lex) + 1.0);
  const PatternIndex index(grammar);

  std::vector<std::vector<RawMatch>> per_sentence(corpus.sentences.size());
  std::unordered_map<ConstructionId, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    index.collect(corpus.sentences[s], per_sentence[s]);
    for (const auto& m : per_sentence[s]) ++counts[m.id];
    total += per_sentence[s].size();
  }

  CodeStats stats;
  std::vector<Placed> placed;
  std::vector<const Placed*> best;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    placed.clear();
    for (const auto& m : per_sentence[s]) placed.push_back(Placed{m.start, m.length, counts[m.id], m.id});
    stats += code_sentence(corpus.sentences[s].size(), placed, best);
  }
  return data_bits(stats, total, grammar.size(), literal_bits);
}

MdlScore mdl_score(const Grammar& grammar, const EncodedCorpus& corpus, const VocabSizes& vocab, std::size_t max_len) {
  MdlScore s;
  s.grammar_bits = grammar_cost(grammar, vocab, max_len);
  s.data_bits = data_cost(grammar, corpus, vocab);
  s.total = s.grammar_bits + s.data_bits;
  return s;
}

Selection select_grammar(const std::vector<Candidate>& candidates, const EncodedCorpus& corpus,
                         const VocabSizes& vocab, std::size_t max_len) {
  if (candidates.empty()) throw std::invalid_argument("select_grammar: no candidates");
  const double literal_bits = std::log2(static_cast<double>(vocab.lex) + 1.0);
  const auto& sentences = corpus.sentences;

  PatternIndex index;
  for (std::size_t i = 0; i < candidates.size(); ++i) index.add(static_cast<ConstructionId>(i), candidates[i].slots);

  // occurrences[c] = (sentence, start) pairs, sentence-ordered
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> occurrences(candidates.size());
  std::vector<RawMatch> raw;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    raw.clear();
    index.collect(sentences[s], raw);
    for (const auto& m : raw)
      occurrences[static_cast<std::size_t>(m.id)].emplace_back(static_cast<std::uint32_t>(s), m.start);
  }

  Selection result;
  result.baseline.data_bits = static_cast<double>(corpus.word_count()) * literal_bits;
  result.baseline.total = result.baseline.data_bits;

  std::vector<std::vector<Placed>> accepted(sentences.size());  // accepted matches per sentence
  std::vector<CodeStats> sentence_stats(sentences.size());
  CodeStats totals;
  totals.literals = static_cast<std::int64_t>(corpus.word_count());
  for (std::size_t s = 0; s < sentences.size(); ++s) sentence_stats[s].literals = static_cast<std::int64_t>(sentences[s].size());

  double grammar_bits = 0.0;
  std::uint64_t total_count = 0;
  std::size_t grammar_size = 0;
  double current = result.baseline.total;

  std::vector<Placed> trial;
  std::vector<const Placed*> best;
  std::vector<std::pair<std::uint32_t, CodeStats>> changed;

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& occ = occurrences[c];
    const std::uint64_t count = occ.size();
    const auto length = static_cast<std::uint32_t>(candidates[c].slots.size());
    const double cost = construction_cost(candidates[c].slots, vocab, max_len);

    CodeStats trial_totals = totals;
    changed.clear();
    for (std::size_t i = 0; i < occ.size();) {
      const auto s = occ[i].first;
      trial = accepted[s];
      for (; i < occ.size() && occ[i].first == s; ++i)
        trial.push_back(Placed{occ[i].second, length, count, static_cast<ConstructionId>(c)});
      const auto stats = code_sentence(sentences[s].size(), trial, best);
      trial_totals -= sentence_stats[s];
      trial_totals += stats;
      changed.emplace_back(s, stats);
    }
    const double proposed = grammar_bits + cost +
                            data_bits(trial_totals, total_count + count, grammar_size + 1, literal_bits);
    if (!(proposed < current)) continue;

    current = proposed;
    grammar_bits += cost;
    total_count += count;
    ++grammar_size;
    totals = trial_totals;
    for (const auto& [s, stats] : changed) sentence_stats[s] = stats;
    for (const auto& [s, start] : occ) accepted[s].push_back(Placed{start, length, count, static_cast<ConstructionId>(c)});
    result.grammar.add(Construction{static_cast<ConstructionId>(c), candidates[c].slots, 1.0});
  }

  result.score.grammar_bits = grammar_bits;
  result.score.data_bits = current - grammar_bits;
  result.score.total = current;
  return result;
}

Grammar prune_by_exposure(const Grammar& grammar, const std::vector<EncodedCorpus>& subcorpora, double decay) {
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("decay must be in (0, 1]");
  constexpr double kEps = 1e-12;

  const auto& all = grammar.constructions();
  std::vector<std::size_t> absences(all.size(), 0);
  std::vector<bool> alive(all.size(), true);
  std::unordered_map<ConstructionId, std::size_t> position;
  for (std::size_t i = 0; i < all.size(); ++i) position.emplace(all[i].id, i);

  std::vector<RawMatch> raw;
  for (const auto& sub : subcorpora) {
    PatternIndex index;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (alive[i]) index.add(all[i].id, all[i].slots);
    std::vector<bool> seen(all.size(), false);
    for (const auto& s : sub.sentences) {
      raw.clear();
      index.collect(s, raw);
      for (const auto& m : raw) seen[position.at(m.id)] = true;
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!alive[i]) continue;
      absences[i] = seen[i] ? 0 : absences[i] + 1;
      if (1.0 - static_cast<double>(absences[i]) * decay <= kEps) alive[i] = false;
    }
  }

  Grammar out;
  out.config = grammar.config;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!alive[i]) continue;
    Construction c = all[i];
    c.weight = 1.0 - static_cast<double>(absences[i]) * decay;
    out.add(std::move(c));
  }
  return out;
}

}  // namespace cxg
