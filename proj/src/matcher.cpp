#include "cxg/matcher.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/parallel.hpp"
#include "cxg/text.hpp"

namespace cxg {

PatternIndex::PatternIndex(const Grammar& grammar) {
  for (const auto& c : grammar) add(c.id, c.slots);
}

void PatternIndex::add(ConstructionId id, const SlotSequence& slots) {
  std::uint32_t node = 0;
  for (const auto& slot : slots) {
    const FillerId f = fillers_.intern(slot);
    const auto [it, inserted] = edges_.emplace(pair_key(node, f), static_cast<std::uint32_t>(terminals_.size()));
    if (inserted) terminals_.emplace_back();
    node = it->second;
  }
  terminals_[node].push_back(Terminal{id, static_cast<std::uint32_t>(slots.size())});
  ++patterns_;
}

std::uint32_t PatternIndex::child(std::uint32_t node, FillerId filler) const {
  const auto it = edges_.find(pair_key(node, filler));
  return it == edges_.end() ? 0 : it->second;  // the root is never a child
}

void PatternIndex::collect(const std::vector<TokenFillers>& encoded, std::vector<RawMatch>& out) const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (node, depth)
  const auto n = static_cast<std::uint32_t>(encoded.size());
  for (std::uint32_t start = 0; start < n; ++start) {
    stack.assign(1, {0u, 0u});
    while (!stack.empty()) {
      const auto [node, depth] = stack.back();
      stack.pop_back();
      for (const auto& t : terminals_[node]) out.push_back(RawMatch{t.id, start, t.length});
      if (start + depth >= n) continue;
      for (FillerId f : encoded[start + depth]) {
        if (f == kNoFiller) continue;
        if (const auto next = child(node, f); next != 0) stack.emplace_back(next, depth + 1);
      }
    }
  }
}

void PatternIndex::collect(const Sentence& sentence, std::vector<RawMatch>& out) const {
  collect(lookup_sentence(sentence, fillers_), out);
}

std::string realization_of(const Sentence& sentence, std::size_t start, std::size_t length) {
  std::string out;
  for (std::size_t i = start; i < start + length; ++i) {
    if (i != start) out += ' ';
    out += sentence.tokens[i].form;
  }
  return out;
}

std::vector<Match> match_sentence(const PatternIndex& index, const Sentence& sentence, std::size_t sentence_index) {
  std::vector<RawMatch> raw;
  index.collect(sentence, raw);
  std::vector<Match> out;
  out.reserve(raw.size());
  for (const auto& m : raw)
    out.push_back(Match{m.id, sentence_index, m.start, m.length, realization_of(sentence, m.start, m.length)});
  return out;
}

std::vector<Match> match_sentence(const Grammar& grammar, const Sentence& sentence, std::size_t sentence_index) {
  return match_sentence(PatternIndex(grammar), sentence, sentence_index);
}

std::vector<Match> match_corpus(const Grammar& grammar, const EncodedCorpus& corpus, unsigned threads) {
  const PatternIndex index(grammar);
  const auto& sentences = corpus.sentences;
  const unsigned workers = effective_workers(sentences.size(), threads);
  std::vector<std::vector<Match>> parts(workers);
  parallel_chunks(sentences.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t s = begin; s < end; ++s) {
      auto m = match_sentence(index, sentences[s], s);
      parts[w].insert(parts[w].end(), std::make_move_iterator(m.begin()), std::make_move_iterator(m.end()));
    }
  });
  std::vector<Match> out;
  for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;
}

const ProfileEntry* FrequencyProfile::find(ConstructionId id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

FrequencyProfile profile_corpus(const Grammar& grammar, const EncodedCorpus& corpus, std::string label,
                                unsigned threads) {
  const PatternIndex index(grammar);
  std::unordered_map<ConstructionId, std::size_t> slot_of;
  for (std::size_t i = 0; i < grammar.size(); ++i) slot_of.emplace(grammar.constructions()[i].id, i);

  struct Tally {
    std::vector<std::uint64_t> tokens;
    std::vector<std::unordered_set<std::string>> types;
  };
  const auto& sentences = corpus.sentences;
  const unsigned workers = effective_workers(sentences.size(), threads);
  std::vector<Tally> tallies(workers);
  parallel_chunks(sentences.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& tally = tallies[w];
    tally.tokens.assign(grammar.size(), 0);
    tally.types.resize(grammar.size());
    std::vector<RawMatch> raw;
    for (std::size_t s = begin; s < end; ++s) {
      raw.clear();
      index.collect(sentences[s], raw);
      for (const auto& m : raw) {
        const auto i = slot_of.at(m.id);
        ++tally.tokens[i];
        tally.types[i].insert(realization_of(sentences[s], m.start, m.length));
      }
    }
  });

  FrequencyProfile profile;
  profile.label = std::move(label);
  profile.word_count = corpus.word_count();
  profile.grammar_fingerprint = fingerprint(grammar);
  profile.entries.reserve(grammar.size());
  for (std::size_t i = 0; i < grammar.size(); ++i) {
    ProfileEntry e;
    e.id = grammar.constructions()[i].id;
    std::unordered_set<std::string> types;
    for (auto& t : tallies) {
      if (t.tokens.empty()) continue;
      e.tokens += t.tokens[i];
      types.merge(t.types[i]);
    }
    e.types = types.size();
    e.per_million = profile.word_count == 0
                        ? 0.0
                        : static_cast<double>(e.tokens) * 1e6 / static_cast<double>(profile.word_count);
    profile.entries.push_back(e);
  }
  return profile;
}

std::vector<std::pair<std::string, std::uint64_t>> realizations(const Grammar& grammar, const EncodedCorpus& corpus,
                                                                ConstructionId id) {
  const auto* c = grammar.find(id);
  if (c == nullptr) throw std::invalid_argument("unknown construction id " + std::to_string(id));
  PatternIndex index;
  index.add(c->id, c->slots);
  std::unordered_map<std::string, std::uint64_t> counts;
  std::vector<RawMatch> raw;
  for (const auto& s : corpus.sentences) {
    raw.clear();
    index.collect(s, raw);
    for (const auto& m : raw) ++counts[realization_of(s, m.start, m.length)];
  }
  std::vector<std::pair<std::string, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

void write_matches_jsonl(const std::vector<Match>& matches, std::ostream& out) {
  for (const auto& m : matches) {
    nlohmann::ordered_json row;
    row["cid"] = m.construction_id;
    row["sent"] = m.sentence;
    row["start"] = m.start;
    row["text"] = m.realization;
    out << row.dump() << '\n';
  }
}

void write_profile_tsv(const FrequencyProfile& profile, std::ostream& out) {
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(profile.grammar_fingerprint));
  out << "# label=" << profile.label << '\n';
  out << "# words=" << profile.word_count << '\n';
  out << "# grammar=" << fp << '\n';
  out << "cid\ttokens\ttokens_per_million\ttypes\n";
  for (const auto& e : profile.entries)
    out << e.id << '\t' << e.tokens << '\t' << text::format_double(e.per_million) << '\t' << e.types << '\n';
}

FrequencyProfile parse_profile_tsv(std::istream& in, const std::string& source) {
  FrequencyProfile p;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    if (row.front() == '#') {
      const auto body = text::trim(row.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const std::string value(body.substr(eq + 1));
      try {
        if (key == "label") p.label = value;
        else if (key == "words") p.word_count = std::stoull(value);
        else if (key == "grammar") p.grammar_fingerprint = std::stoull(value, nullptr, 16);
      } catch (const std::logic_error&) {
        throw ParseError(source, line_no, "bad header value '" + value + "'");
      }
      continue;
    }
    if (row.rfind("cid\t", 0) == 0) continue;
    const auto f = text::split(row, '\t');
    if (f.size() != 4) throw ParseError(source, line_no, "expected 4 columns");
    try {
      ProfileEntry e;
      e.id = std::stoll(std::string(f[0]));
      e.tokens = std::stoull(std::string(f[1]));
      e.per_million = std::stod(std::string(f[2]));
      e.types = std::stoull(std::string(f[3]));
      if (e.types > e.tokens) throw ParseError(source, line_no, "types exceed tokens");
      p.entries.push_back(e);
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "bad number");
    }
  }
  return p;
}

FrequencyProfile read_profile_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open profile " + path.string());
  return parse_profile_tsv(in, path.string());
}

}  // namespace cxg
