#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"
#include "cxg/text.hpp"

namespace cxg::testing {

/// "was/AUX being/AUX spread/VERB" -> one sentence. A third field sets the
/// cluster: "house/NOUN/521".
inline Sentence tagged(const std::string& text) {
  Sentence s;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    const auto parts = text::split(item, '/');
    Token t;
    t.form = parts.at(0);
    t.upos = *parse_upos(parts.at(1));
    if (parts.size() > 2) t.sem = std::stoi(std::string(parts[2]));
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline EncodedCorpus corpus_of(std::initializer_list<std::string> sentences) {
  EncodedCorpus c;
  for (const auto& s : sentences) c.sentences.push_back(tagged(s));
  return c;
}

inline Grammar grammar_of(std::initializer_list<std::string> notations) {
  Grammar g;
  ConstructionId id = 1;
  for (const auto& n : notations) g.add(Construction{id++, parse_notation(n), 1.0});
  return g;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("cxg-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cxg::testing
