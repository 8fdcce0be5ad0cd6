#include "cxg/slot.hpp"

#include <charconv>
#include <stdexcept>

#include "cxg/errors.hpp"
#include "cxg/text.hpp"

namespace cxg {

std::optional<Level> parse_level(std::string_view name) {
  if (name == "LEX") return Level::Lex;
  if (name == "SYN") return Level::Syn;
  if (name == "SEM") return Level::Sem;
  return std::nullopt;
}

std::optional<SlotFiller> SlotFiller::of(const Token& token, Level level) {
  switch (level) {
    case Level::Lex: return lex(token.form);
    case Level::Syn: return syn(token.upos);
    case Level::Sem:
      if (token.sem == kOov) return std::nullopt;
      return sem(token.sem);
  }
  return std::nullopt;
}

SlotFiller SlotFiller::parse(Level level, std::string_view value) {
  switch (level) {
    case Level::Lex:
      if (value.empty()) throw ValidationError("empty lexical constraint");
      return lex(text::to_lower(value));
    case Level::Syn: {
      const auto tag = parse_upos(value);
      if (!tag) throw ValidationError("unknown tag " + std::string(value));
      return syn(*tag);
    }
    case Level::Sem: {
      ClusterId id = 0;
      const auto* end = value.data() + value.size();
      const auto res = std::from_chars(value.data(), end, id);
      if (res.ec != std::errc() || res.ptr != end || id < 0)
        throw ValidationError("bad cluster index '" + std::string(value) + "'");
      return sem(id);
    }
  }
  throw std::logic_error("unreachable level");
}

std::string SlotFiller::value_text() const {
  switch (level_) {
    case Level::Lex: return form_;
    case Level::Syn: return std::string(to_string(tag_));
    case Level::Sem: return std::to_string(cluster_);
  }
  return {};
}

bool SlotFiller::satisfied_by(const Token& token) const {
  switch (level_) {
    case Level::Lex: return token.form == form_;
    case Level::Syn: return token.upos == tag_;
    case Level::Sem: return token.sem != kOov && token.sem == cluster_;
  }
  return false;
}

std::strong_ordering operator<=>(const SlotFiller& a, const SlotFiller& b) {
  if (a.level_ != b.level_) return a.level_ <=> b.level_;
  switch (a.level_) {
    case Level::Lex: return a.form_.compare(b.form_) <=> 0;
    case Level::Syn: return a.tag_ <=> b.tag_;
    case Level::Sem: return a.cluster_ <=> b.cluster_;
  }
  return std::strong_ordering::equal;
}

std::size_t SlotFillerHash::operator()(const SlotFiller& f) const noexcept {
  std::size_t h = 0;
  switch (f.level()) {
    case Level::Lex: h = std::hash<std::string>{}(f.form()); break;
    case Level::Syn: h = static_cast<std::size_t>(f.tag()); break;
    case Level::Sem: h = std::hash<ClusterId>{}(f.cluster()); break;
  }
  return h * 3 + static_cast<std::size_t>(f.level());
}

}  // namespace cxg
