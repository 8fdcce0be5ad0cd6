#include "cxg/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/text.hpp"

namespace cxg {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c);
  });
  return out;
}

}  // namespace

std::size_t SlotSequenceHash::operator()(const SlotSequence& slots) const noexcept {
  std::size_t h = slots.size();
  SlotFillerHash fh;
  for (const auto& s : slots) h = h * 0x100000001b3ull ^ fh(s);
  return h;
}

void Grammar::add(Construction construction) {
  if (construction.slots.size() < kMinSlots)
    throw ValidationError("construction " + std::to_string(construction.id) + " has fewer than " +
                          std::to_string(kMinSlots) + " slots");
  if (!(construction.weight >= 0.0 && construction.weight <= 1.0))
    throw ValidationError("construction " + std::to_string(construction.id) + " weight outside [0,1]");
  if (by_id_.count(construction.id) != 0)
    throw ValidationError("duplicate construction id " + std::to_string(construction.id));
  if (sequences_.count(construction.slots) != 0)
    throw ValidationError("duplicate slot sequence " + to_notation(construction.slots));
  by_id_.emplace(construction.id, constructions_.size());
  sequences_.insert(construction.slots);
  constructions_.push_back(std::move(construction));
}

const Construction* Grammar::find(ConstructionId id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &constructions_[it->second];
}

std::string to_notation(const SlotSequence& slots) {
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i != 0) out += " -- ";
    const auto& s = slots[i];
    switch (s.level()) {
      case Level::Lex: out += '"' + s.form() + '"'; break;
      case Level::Syn: out += to_string(s.tag()); break;
      case Level::Sem: out += '<' + std::to_string(s.cluster()) + '>'; break;
    }
  }
  return out;
}

SlotSequence parse_notation(std::string_view notation) {
  SlotSequence slots;
  const auto fail = [&](const char* why) {
    return ValidationError(std::string(why) + " in '" + std::string(notation) + "'");
  };
  std::size_t i = 0;
  const auto skip_spaces = [&] {
    while (i < notation.size() && notation[i] == ' ') ++i;
  };
  while (true) {
    skip_spaces();
    if (i >= notation.size()) throw fail("missing slot");
    std::string_view field;
    if (notation[i] == '"') {
      const auto close = notation.find('"', i + 1);
      if (close == std::string_view::npos) throw fail("unterminated quote");
      slots.push_back(SlotFiller::parse(Level::Lex, notation.substr(i + 1, close - i - 1)));
      i = close + 1;
    } else {
      auto end = notation.find(" --", i);
      if (end == std::string_view::npos) end = notation.size();
      field = text::trim(notation.substr(i, end - i));
      if (field.empty()) throw fail("empty slot");
      if (field.front() == '<' && field.back() == '>')
        slots.push_back(SlotFiller::parse(Level::Sem, field.substr(1, field.size() - 2)));
      else
        slots.push_back(SlotFiller::parse(Level::Syn, upper(field)));
      i = end;
    }
    skip_spaces();
    if (i >= notation.size()) break;
    if (notation.substr(i, 2) != "--") throw fail("expected '--'");
    i += 2;
  }
  return slots;
}

void write_grammar(const Grammar& grammar, std::ostream& out) {
  for (const auto& c : grammar) {
    nlohmann::ordered_json row;
    row["id"] = c.id;
    row["weight"] = c.weight;
    auto& slots = row["slots"] = nlohmann::ordered_json::array();
    for (const auto& s : c.slots)
      slots.push_back({{"level", std::string(to_string(s.level()))}, {"value", s.value_text()}});
    out << row.dump() << '\n';
  }
}

Grammar parse_grammar(std::istream& in, const std::string& source) {
  Grammar grammar;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      Construction c;
      c.id = row.at("id").get<ConstructionId>();
      c.weight = row.contains("weight") ? row["weight"].get<double>() : 1.0;
      for (const auto& slot : row.at("slots")) {
        const auto& level_name = slot.at("level").get_ref<const std::string&>();
        const auto level = parse_level(level_name);
        if (!level) throw ValidationError("unknown level " + level_name);
        const auto& value = slot.at("value");
        c.slots.push_back(SlotFiller::parse(*level, value.is_string() ? value.get<std::string>() : value.dump()));
      }
      grammar.add(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return grammar;
}

Grammar read_grammar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grammar " + path.string());
  return parse_grammar(in, path.string());
}

std::uint64_t fingerprint(const Grammar& grammar) {
  std::vector<std::uint64_t> parts;
  parts.reserve(grammar.size());
  for (const auto& c : grammar) parts.push_back(fnv1a(std::to_string(c.id) + "\t" + to_notation(c)));
  std::sort(parts.begin(), parts.end());
  std::uint64_t h = kFnvOffset;
  for (auto p : parts) h = fnv1a(std::string_view(reinterpret_cast<const char*>(&p), sizeof p), h);
  return h;
}

}  // namespace cxg
