// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cxg/analytics.hpp"
#include "cxg/association.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"
#include "cxg/induction.hpp"
#include "cxg/matcher.hpp"
#include "pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cxg;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome delta_p_oracle() {
  Outcome r;
  const auto start = Clock::now();
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t tokens = 200 + rng() % 1801;
    const std::size_t vocab = 6 + rng() % 20;
    const auto corpus = testing::random_corpus(rng, tokens, vocab);
    const auto m = build_matrix(count_pairs(corpus), 1 + seed % 3);
    for (const auto& [key, v] : m.values) {
      const auto& x = m.fillers->at(static_cast<FillerId>(key >> 32));
      const auto& y = m.fillers->at(static_cast<FillerId>(key & 0xFFFFFFFFu));
      const double lr = oracle::brute_delta_p(corpus, x, y, Direction::LR);
      const double rl = oracle::brute_delta_p(corpus, x, y, Direction::RL);
      r.require(std::abs(v.lr - lr) <= 1e-12 && std::abs(v.rl - rl) <= 1e-12,
                "seed " + std::to_string(seed) + ": stored value differs from oracle");
      ++checked;
    }
  }
  const double secs = seconds_since(start);
  r.require(checked > 0, "no values checked");
  r.require(secs < 10.0, "runtime " + std::to_string(secs) + " s");
  if (r.ok) r.detail = std::to_string(checked) + " values, " + std::to_string(secs) + " s";
  return r;
}

Outcome planted_recovery() {
  Outcome r;
  const auto start = Clock::now();
  const auto planted = testing::planted_corpus(200000, 1);
  testing::TempDir tmp;
  {
    std::ostringstream out;
    write_tagged_corpus(planted.corpus, out);
    testing::write_file(tmp / "train.tsv", out.str());
    std::ostringstream lex;
    write_lexicon(planted.lexicon, lex);
    testing::write_file(tmp / "lexicon.tsv", lex.str());
  }
  cli::PipelineConfig config;
  config.set("corpus", (tmp / "train.tsv").string());
  config.set("lexicon", (tmp / "lexicon.tsv").string());
  config.set("grammar", (tmp / "grammar.jsonl").string());
  config.set("report", (tmp / "report.txt").string());
  std::ostringstream log;
  cli::cmd_learn(config, log);

  const auto grammar = read_grammar(tmp / "grammar.jsonl");
  std::size_t recovered = 0;
  for (const auto& t : planted.templates) recovered += grammar.contains(t) ? 1 : 0;

  const auto report = testing::read_file(tmp / "report.txt");
  const auto value_of = [&](const std::string& key) {
    const auto pos = report.find("\n" + key + "=");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(report.substr(pos + key.size() + 2));
  };
  const double total = value_of("total");
  const double baseline = value_of("baseline_total");
  const double secs = seconds_since(start);
  r.require(recovered >= 16, std::to_string(recovered) + "/20 templates recovered");
  r.require(std::isfinite(total) && std::isfinite(baseline), "report lacks MDL totals");
  r.require(total < baseline, "selected MDL not below baseline");
  r.require(secs < 300.0, "runtime " + std::to_string(secs) + " s");
  if (r.ok)
    r.detail = std::to_string(recovered) + "/20 recovered, " + std::to_string(grammar.size()) +
               " constructions, MDL " + std::to_string(total) + " < " + std::to_string(baseline) + ", " +
               std::to_string(secs) + " s";
  return r;
}

// Sub-corpora of exactly `words` words; `observed` ones contain one
// "play the game" and the others none.
EncodedCorpus exposure_corpus(const std::string& pattern, std::size_t words) {
  EncodedCorpus corpus;
  for (char c : pattern) {
    std::size_t produced = 0;
    if (c == 'o') {
      corpus.sentences.push_back(testing::tagged("play/VERB the/DET game/NOUN"));
      produced = 3;
    }
    while (produced < words) {
      const std::size_t n = std::min<std::size_t>(10, words - produced);
      Sentence s;
      for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(Token{"w" + std::to_string(i), Upos::NOUN, kOov});
      corpus.sentences.push_back(std::move(s));
      produced += n;
    }
  }
  return corpus;
}

Outcome pruning_arithmetic() {
  Outcome r;
  const auto grammar = testing::grammar_of({"\"play\" -- DET -- NOUN"});
  const auto run = [&](const std::string& pattern) {
    const auto subs = split_subcorpora(exposure_corpus(pattern, 100000), 100000);
    r.require(subs.size() == pattern.size(), "unexpected sub-corpus count");
    for (const auto& s : subs) r.require(s.word_count() == 100000, "sub-corpus is not 100k words");
    return prune_by_exposure(grammar, subs, 0.25);
  };
  r.require(run("xxxx").empty(), "absent from 4 sub-corpora but not removed");
  const auto kept = run("xxxo");
  r.require(kept.size() == 1 && kept.find(1)->weight == 1.0, "absent 3 then observed: weight not 1");
  const auto three = run("oxxx");
  r.require(three.size() == 1 && std::abs(three.find(1)->weight - 0.25) < 1e-12, "absent 3: weight not 0.25");
  r.require(run("oxxxx").empty(), "observed then absent 4: not removed");
  if (r.ok) r.detail = "removal after 4 absences, reset to 1 on observation";
  return r;
}

Outcome matcher_fixtures() {
  Outcome r;
  const auto grammar = testing::grammar_of({"AUX -- \"being\" -- VERB", "\"play\" -- DET -- NOUN",
                                            "\"to\" -- VERB -- \"down\"",
                                            "\"one\" -- ADP -- \"the\" -- \"best\" -- NOUN"});
  const auto corpus = testing::corpus_of({
      "the/DET rumor/NOUN was/AUX being/AUX spread/VERB",
      "they/PRON play/VERB the/DET game/NOUN",
      "he/PRON wanted/VERB to/PART sit/VERB down/ADP",
      "one/NUM of/ADP the/DET best/ADJ books/NOUN",
  });
  const std::size_t expected_start[] = {2, 1, 2, 0};
  const char* expected_text[] = {"was being spread", "play the game", "to sit down", "one of the best books"};
  const auto matches = match_corpus(grammar, corpus);
  r.require(matches.size() == 4, std::to_string(matches.size()) + " matches on the fixtures, expected 4");
  for (std::size_t s = 0; s < 4; ++s) {
    std::size_t hits = 0;
    for (const auto& m : matches)
      if (m.sentence == s) {
        ++hits;
        r.require(m.construction_id == s + 1 && m.start == expected_start[s] && m.realization == expected_text[s],
                  "wrong match in fixture " + std::to_string(s));
      }
    r.require(hits == 1, "fixture " + std::to_string(s) + " has " + std::to_string(hits) + " matches");
  }

  std::size_t compared = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed * 101);
    const auto random = testing::random_corpus(rng, 10000);
    // constructions drawn from the corpus so matches are plentiful
    Grammar g;
    ConstructionId id = 1;
    std::set<SlotSequence> seen;
    while (g.size() < 40) {
      const auto& s = random.sentences[rng() % random.sentences.size()];
      const std::size_t len = 3 + rng() % 3;
      if (s.size() < len) continue;
      const std::size_t at = rng() % (s.size() - len + 1);
      SlotSequence slots;
      for (std::size_t i = 0; i < len; ++i) {
        const auto options = oracle::fillers_of(s.tokens[at + i]);
        slots.push_back(options[rng() % options.size()]);
      }
      if (!seen.insert(slots).second) continue;
      g.add(Construction{id++, slots, 1.0});
    }
    const auto expected = oracle::naive_matches(g, random);
    for (unsigned threads : {1u, 3u}) {
      std::set<oracle::MatchKey> got;
      for (const auto& m : match_corpus(g, random, threads)) got.emplace(m.construction_id, m.sentence, m.start);
      r.require(got == expected, "match set differs from oracle, seed " + std::to_string(seed));
      compared += got.size();
    }
  }
  if (r.ok) r.detail = "4 fixtures, " + std::to_string(compared) + " oracle matches compared";
  return r;
}

FrequencyProfile profile_of(const std::string& label, const std::vector<double>& per_million) {
  FrequencyProfile p;
  p.label = label;
  p.word_count = 1000000;
  p.grammar_fingerprint = 1;
  for (std::size_t i = 0; i < per_million.size(); ++i)
    p.entries.push_back(ProfileEntry{static_cast<ConstructionId>(i + 1),
                                     static_cast<std::uint64_t>(std::max(0.0, per_million[i])), per_million[i], 1});
  return p;
}

Outcome delta_and_clustering() {
  Outcome r;
  const auto start = Clock::now();
  const auto hand = burrows_delta({profile_of("A", {10}), profile_of("B", {20})});
  r.require(hand.distances(0, 1) == 2.0 && hand.distances(1, 0) == 2.0, "two-corpus case is not 2.0");

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 50);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrequencyProfile> ps;
    const int n = 3 + trial % 6;
    for (int c = 0; c < n; ++c) {
      std::vector<double> v(25);
      for (auto& x : v) x = u(rng);
      ps.push_back(profile_of("c" + std::to_string(c), v));
    }
    const auto d = burrows_delta(ps);
    for (Eigen::Index i = 0; i < n; ++i) {
      r.require(d.distances(i, i) == 0.0, "nonzero diagonal");
      for (Eigen::Index j = 0; j < n; ++j) r.require(d.distances(i, j) == d.distances(j, i), "asymmetric");
    }
  }

  int separated = 0;
  constexpr int kFeatures = 40;
  constexpr int kPerGroup = 4;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    // per feature, groups sit at distinct multiples of 10 sigma
    std::vector<std::array<int, 3>> order(kFeatures);
    for (auto& o : order) {
      o = {0, 1, 2};
      std::shuffle(o.begin(), o.end(), g);
    }
    std::vector<FrequencyProfile> ps;
    std::vector<int> group_of;
    for (int grp = 0; grp < 3; ++grp)
      for (int m = 0; m < kPerGroup; ++m) {
        std::vector<double> v(kFeatures);
        for (int f = 0; f < kFeatures; ++f) v[f] = 100.0 + 10.0 * order[f][grp] + noise(g);
        ps.push_back(profile_of("g" + std::to_string(grp) + "m" + std::to_string(m), v));
        group_of.push_back(grp);
      }
    // present corpora in a seeded random order
    std::vector<std::size_t> perm(ps.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<FrequencyProfile> shuffled;
    for (auto i : perm) shuffled.push_back(ps[i]);

    const auto tree = upgma(burrows_delta(shuffled));
    const auto& root = tree.nodes[static_cast<std::size_t>(tree.root())];
    bool ok = true;
    for (int side : {root.left, root.right}) {
      std::set<char> groups;
      const auto leaves = tree.leaves_under(side);
      for (const auto& l : leaves) groups.insert(l[1]);
      // each side holds whole groups only
      ok = ok && leaves.size() == groups.size() * kPerGroup;
    }
    separated += ok ? 1 : 0;
  }
  const double secs = seconds_since(start);
  r.require(separated == 100, std::to_string(separated) + "/100 trials separated");
  r.require(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  if (r.ok) r.detail = "Delta=2.0, 100/100 top splits separate groups, " + std::to_string(secs) + " s";
  return r;
}

Outcome category_distribution_check() {
  Outcome r;
  std::vector<CategoryLabel> labels;
  for (ConstructionId id = 1; id <= 1000; ++id)
    labels.push_back({id, id <= 337 ? Category::Verbal : static_cast<Category>(1 + id % (kCategoryCount - 1))});
  const auto dist = category_distribution(labels, 12856);
  r.require(std::abs(dist.percent[0] - 33.7) <= 0.01, "Verbal share " + std::to_string(dist.percent[0]));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CategoryLabel> sample;
    const std::size_t n = 1 + rng() % 3000;
    for (ConstructionId id = 1; id <= n; ++id)
      sample.push_back({id, static_cast<Category>(rng() % (1 + rng() % kCategoryCount))});
    const auto d = category_distribution(sample);
    double sum = 0;
    for (double p : d.percent) sum += p;
    r.require(std::abs(sum - 100.0) <= 0.01, "percentages sum to " + std::to_string(sum));
  }
  if (r.ok) r.detail = "Verbal " + std::to_string(dist.percent[0]) + "%, sums within 0.01 of 100";
  return r;
}

Outcome mdl_sanity() {
  Outcome r;
  const auto planted = testing::planted_corpus(200000, 1);
  const auto vocab = vocab_sizes(planted.corpus, planted.lexicon.k);
  const double words = static_cast<double>(planted.corpus.word_count());
  const double empty = data_cost(Grammar{}, planted.corpus, vocab);
  r.require(empty == words * std::log2(static_cast<double>(vocab.lex) + 1.0), "empty-grammar cost differs");

  const auto base = mdl_score(Grammar{}, planted.corpus, vocab, 7);
  const auto with = mdl_score(testing::grammar_of({"\"but\" -- \"i\" -- VERB"}), planted.corpus, vocab, 7);
  r.require(with.total < base.total, "planted trigram does not lower total MDL");
  if (r.ok)
    r.detail = "empty " + std::to_string(empty) + " bits, trigram total " + std::to_string(with.total) + " < " +
               std::to_string(base.total);
  return r;
}

Outcome clipping() {
  Outcome r;
  const auto grammar = testing::grammar_of({"SCONJ -- VERB -- \"to\"", "\"to\" -- VERB -- \"down\""});
  const auto pairs = clip_pairs(grammar, 1);
  const ClipPair expected{1, 2, 1};
  r.require(std::find(pairs.begin(), pairs.end(), expected) != pairs.end(), "pair (1, 2) with overlap 1 missing");
  r.require(pairs.size() == 1, std::to_string(pairs.size()) + " pairs reported, expected 1");
  if (r.ok) r.detail = "(1, 2) overlap 1";
  return r;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"delta-p equals the brute-force contingency oracle", delta_p_oracle},
      {"planted templates recovered by learn", planted_recovery},
      {"exposure pruning arithmetic", pruning_arithmetic},
      {"matcher fixtures and oracle equality", matcher_fixtures},
      {"Delta values and register clustering", delta_and_clustering},
      {"category distribution percentages", category_distribution_check},
      {"MDL coder sanity", mdl_sanity},
      {"clip pairs", clipping},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name << " (" << o.detail << ")"
              << std::endl;
    failures += o.ok ? 0 : 1;
  }
  std::cout << (n - failures) << "/" << n << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
