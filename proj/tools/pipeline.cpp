#include "pipeline.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cxg/analytics.hpp"
#include "cxg/association.hpp"
#include "cxg/categories.hpp"
#include "cxg/corpus.hpp"
#include "cxg/errors.hpp"
#include "cxg/grammar.hpp"
#include "cxg/induction.hpp"
#include "cxg/matcher.hpp"
#include "cxg/text.hpp"

namespace cxg::cli {
namespace {

namespace fs = std::filesystem;

struct KeyInfo {
  const char* key;
  const char* fallback;
  const char* help;
  const char* commands;  // space separated; "*" for every command
};

// clang-format off
constexpr KeyInfo kKeys[] = {
    {"threads", "0", "worker threads (0 = all cores)", "*"},
    {"format", "tsv", "corpus format: tsv or jsonl", "learn prune annotate profile run-all"},
    {"drop_punct", "true", "drop PUNCT tokens when reading corpora", "learn prune annotate profile run-all"},
    {"corpus", "", "tagged corpus file", "learn prune annotate profile run-all"},
    {"lexicon", "", "semantic lexicon TSV (written by categories, read elsewhere)", "categories learn prune annotate profile run-all"},
    {"embeddings", "", "word vectors in text format", "categories run-all"},
    {"max_words", "100000", "read at most this many embedding rows", "categories run-all"},
    {"k", "1000", "number of semantic clusters", "categories run-all"},
    {"seed", "1", "k-means seed", "categories run-all"},
    {"max_iter", "100", "k-means iteration cap", "categories run-all"},
    {"grammar", "", "grammar JSONL (written by learn, read elsewhere)", "learn prune annotate profile clip distribution"},
    {"report", "", "learn report path (default: stdout)", "learn"},
    {"dump_matrix", "", "write the association matrix TSV here", "learn run-all"},
    {"beam_width", "16", "beams kept per step", "learn run-all"},
    {"min_len", "3", "shortest candidate", "learn run-all"},
    {"max_len", "7", "longest candidate", "learn run-all"},
    {"dp_threshold", "0.1", "minimum transition association", "learn run-all"},
    {"max_candidates", "20000", "candidates passed to selection", "learn run-all"},
    {"min_pair_freq", "0", "pair count threshold (0 = scaled per million)", "learn run-all"},
    {"min_pair_per_million", "5", "scaled pair threshold", "learn run-all"},
    {"subcorpus_size", "100000", "words per exposure sub-corpus", "prune run-all"},
    {"decay", "0.25", "weight lost per unobserved sub-corpus", "prune run-all"},
    {"exposure", "", "pruning corpus (default: the training corpus)", "run-all"},
    {"label", "", "profile label (default: corpus file stem)", "profile"},
    {"profiles", "", "comma-separated profile TSVs", "delta table"},
    {"n_features", "0", "most frequent constructions used by Delta (0 = all)", "delta run-all"},
    {"delta", "", "Delta matrix TSV", "cluster"},
    {"linkage", "average", "average, single or complete", "cluster run-all"},
    {"ascii", "", "write the ASCII dendrogram here (default: log)", "cluster"},
    {"max_overlap", "1", "longest shared boundary in clip", "clip"},
    {"labels", "", "category labels TSV", "distribution table"},
    {"svg", "", "also write a bar chart SVG", "distribution"},
    {"eval", "", "comma-separated corpora to profile", "run-all"},
    {"out_dir", "", "directory for run-all outputs", "run-all"},
    {"output", "", "main output path (default: stdout)", "prune annotate profile delta cluster clip distribution table"},
};
// clang-format on

constexpr const char* kCommands[][2] = {
    {"categories", "cluster word embeddings into a semantic lexicon"},
    {"learn", "induce a grammar from a tagged corpus"},
    {"prune", "forget constructions unobserved in successive sub-corpora"},
    {"annotate", "list every construction match in a corpus"},
    {"profile", "token and type frequency per construction"},
    {"delta", "Burrows' Delta between corpus profiles"},
    {"cluster", "hierarchical clustering of a Delta matrix"},
    {"clip", "construction pairs sharing boundary slots"},
    {"distribution", "category distribution of labeled constructions"},
    {"table", "mean frequency and types per category and corpus"},
    {"run-all", "categories, learn, prune, annotate, profile, delta, cluster"},
};

bool applies(const KeyInfo& info, std::string_view command) {
  const std::string_view list = info.commands;
  if (list == "*") return true;
  for (const auto& c : text::split(list, ' '))
    if (c == command) return true;
  return false;
}

bool is_list(std::string_view key) { return key == "profiles" || key == "eval"; }

std::string option_name(std::string_view key) {
  std::string out = "--";
  for (char c : key) out += c == '_' ? '-' : c;
  return out;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

// Writes through `write` to the configured path, or to `log` when unset.
void emit(const PipelineConfig& config, const std::string& key, std::ostream& log,
          const std::function<void(std::ostream&)>& write) {
  const auto& target = config.get(key);
  if (target.empty()) {
    write(log);
    return;
  }
  auto out = open_output(target);
  write(out);
  if (!out) throw InputError("write failed: " + target);
}

unsigned threads(const PipelineConfig& config) {
  return static_cast<unsigned>(config.get_int("threads", 0, 4096));
}

std::optional<SemanticLexicon> load_lexicon(const PipelineConfig& config) {
  if (config.get("lexicon").empty()) return std::nullopt;
  return read_lexicon(config.get("lexicon"));
}

EncodedCorpus load_corpus(const PipelineConfig& config, const fs::path& path,
                          const std::optional<SemanticLexicon>& lexicon) {
  const auto format = parse_corpus_format(config.get("format"));
  auto corpus = read_tagged_corpus(path, format, ReadOptions{config.get_bool("drop_punct")});
  if (lexicon) corpus = attach_semantics(std::move(corpus), *lexicon);
  return corpus;
}

BeamConfig beam_config(const PipelineConfig& config) {
  BeamConfig b;
  b.beam_width = static_cast<std::size_t>(config.get_int("beam_width", 1, 1 << 20));
  b.min_len = static_cast<std::size_t>(config.get_int("min_len", 3, 64));
  b.max_len = static_cast<std::size_t>(config.get_int("max_len", 3, 64));
  b.dp_threshold = config.get_real("dp_threshold");
  b.max_candidates = static_cast<std::size_t>(config.get_int("max_candidates", 1, 1LL << 40));
  b.validate();
  return b;
}

std::vector<FrequencyProfile> load_profiles(const PipelineConfig& config) {
  std::vector<FrequencyProfile> out;
  for (const auto& p : config.get_list("profiles")) out.push_back(read_profile_tsv(p));
  if (out.empty()) throw InputError("no profiles given");
  return out;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  for (const auto& k : kKeys) values_.emplace(k.key, k.fallback);
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown configuration key '" + key + "'");
  it->second = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("unregistered configuration key " + key);
  return it->second;
}

long long PipelineConfig::get_int(const std::string& key, long long min, long long max) const {
  const auto s = text::trim(get(key));
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError(key + ": expected an integer, got '" + std::string(s) + "'");
  if (v < min || v > max)
    throw InputError(key + ": " + std::to_string(v) + " outside [" + std::to_string(min) + ", " +
                     std::to_string(max) + "]");
  return v;
}

double PipelineConfig::get_real(const std::string& key) const {
  const auto s = text::trim(get(key));
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError(key + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

bool PipelineConfig::get_bool(const std::string& key) const {
  const auto s = text::to_lower(text::trim(get(key)));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InputError(key + ": expected true or false, got '" + s + "'");
}

fs::path PipelineConfig::get_path(const std::string& key) const {
  const auto& v = get(key);
  if (v.empty()) throw InputError("missing required setting '" + key + "' (" + option_name(key) + ")");
  return v;
}

std::vector<std::string> PipelineConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& item : text::split(get(key), ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void PipelineConfig::validate() const {
  get_int("threads", 0, 4096);
  get_bool("drop_punct");
  parse_corpus_format(get("format"));
  get_int("max_words", 1, 1LL << 40);
  get_int("k", 1, 1 << 30);
  get_int("seed", 0, std::numeric_limits<long long>::max());
  get_int("max_iter", 1, 1 << 30);
  beam_config(*this);
  get_int("min_pair_freq", 0, 1LL << 40);
  get_real("min_pair_per_million");
  get_int("subcorpus_size", 1, 1LL << 40);
  const double decay = get_real("decay");
  if (!(decay > 0.0 && decay <= 1.0)) throw InputError("decay must be in (0, 1]");
  get_int("n_features", 0, 1LL << 40);
  parse_linkage(get("linkage"));
  get_int("max_overlap", 1, 64);
}

void apply_config_file(PipelineConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(text::chomp(line));
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(path.string(), line_no, "expected key = value");
    std::string key(text::trim(body.substr(0, eq)));
    for (auto& c : key)
      if (c == '-') c = '_';
    try {
      config.set(key, std::string(text::trim(body.substr(eq + 1))));
    } catch (const InputError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
}

void echo_config(const PipelineConfig& config, std::ostream& out) {
  out << "config_schema=" << kConfigSchemaVersion << '\n';
  for (const auto& [k, v] : config.values()) out << k << '=' << v << '\n';
}

void cmd_categories(const PipelineConfig& config, std::ostream& log) {
  const auto table = read_embedding_table(config.get_path("embeddings"),
                                          static_cast<std::size_t>(config.get_int("max_words", 1, 1LL << 40)));
  if (table.size() == 0) throw InputError("embedding table is empty");
  KMeansOptions opts;
  opts.k = static_cast<int>(config.get_int("k", 1, 1 << 30));
  opts.seed = static_cast<std::uint64_t>(config.get_int("seed", 0, std::numeric_limits<long long>::max()));
  opts.max_iter = static_cast<int>(config.get_int("max_iter", 1, 1 << 30));
  const auto lexicon = kmeans(table, opts);
  auto out = open_output(config.get_path("lexicon"));
  write_lexicon(lexicon, out);
  log << "categories: " << table.size() << " words, k=" << lexicon.k << ", "
      << lexicon.inertia_trace.size() << " iterations, inertia="
      << text::format_double(lexicon.inertia_trace.empty() ? 0.0 : lexicon.inertia_trace.back()) << '\n';
}

void cmd_learn(const PipelineConfig& config, std::ostream& log) {
  const auto lexicon = load_lexicon(config);
  const auto corpus = load_corpus(config, config.get_path("corpus"), lexicon);
  if (corpus.word_count() == 0) throw InputError("corpus is empty: " + config.get("corpus"));
  const auto beam = beam_config(config);
  const fs::path grammar_path = config.get_path("grammar");

  std::uint64_t min_pair = static_cast<std::uint64_t>(config.get_int("min_pair_freq", 0, 1LL << 40));
  if (min_pair == 0) min_pair = scaled_min_pair_freq(corpus.word_count(), config.get_real("min_pair_per_million"));
  const auto matrix = build_matrix(count_pairs(corpus), min_pair);
  if (!config.get("dump_matrix").empty()) {
    auto out = open_output(config.get("dump_matrix"));
    write_matrix_tsv(matrix, out);
  }
  const auto candidates = beam_search_candidates(corpus, matrix, beam, threads(config));
  const auto vocab = vocab_sizes(corpus, lexicon ? lexicon->k : 1);

  Selection selection;
  if (candidates.empty()) {
    selection.baseline = mdl_score(Grammar{}, corpus, vocab, beam.max_len);
    selection.score = selection.baseline;
  } else {
    selection = select_grammar(candidates, corpus, vocab, beam.max_len);
  }
  {
    auto out = open_output(grammar_path);
    write_grammar(selection.grammar, out);
  }

  emit(config, "report", log, [&](std::ostream& out) {
    out << "# learn report\n";
    echo_config(config, out);
    out << "words=" << corpus.word_count() << '\n'
        << "sentences=" << corpus.sentences.size() << '\n'
        << "min_pair_freq_used=" << min_pair << '\n'
        << "matrix_pairs=" << matrix.size() << '\n'
        << "vocab_lex=" << vocab.lex << '\n'
        << "vocab_syn=" << vocab.syn << '\n'
        << "vocab_sem=" << vocab.sem << '\n'
        << "candidates=" << candidates.size() << '\n'
        << "constructions=" << selection.grammar.size() << '\n'
        << "grammar_bits=" << text::format_fixed(selection.score.grammar_bits, 3) << '\n'
        << "data_bits=" << text::format_fixed(selection.score.data_bits, 3) << '\n'
        << "total=" << text::format_fixed(selection.score.total, 3) << '\n'
        << "baseline_data_bits=" << text::format_fixed(selection.baseline.data_bits, 3) << '\n'
        << "baseline_total=" << text::format_fixed(selection.baseline.total, 3) << '\n';
  });
  if (!config.get("report").empty())
    log << "learn: " << selection.grammar.size() << " constructions from " << candidates.size()
        << " candidates, total " << text::format_fixed(selection.score.total, 1) << " bits (baseline "
        << text::format_fixed(selection.baseline.total, 1) << ")\n";
}

void cmd_prune(const PipelineConfig& config, std::ostream& log) {
  const auto grammar = read_grammar(config.get_path("grammar"));
  const auto corpus = load_corpus(config, config.get_path("corpus"), load_lexicon(config));
  if (corpus.word_count() == 0) throw InputError("corpus is empty: " + config.get("corpus"));
  const auto parts = split_subcorpora(corpus, config.get_int("subcorpus_size", 1, 1LL << 40));
  const auto pruned = prune_by_exposure(grammar, parts, config.get_real("decay"));
  const fs::path target = config.get("output").empty() ? config.get_path("grammar") : fs::path(config.get("output"));
  auto out = open_output(target);
  write_grammar(pruned, out);
  log << "prune: kept " << pruned.size() << " of " << grammar.size() << " constructions over " << parts.size()
      << " sub-corpora\n";
}

void cmd_annotate(const PipelineConfig& config, std::ostream& log) {
  const auto grammar = read_grammar(config.get_path("grammar"));
  const auto corpus = load_corpus(config, config.get_path("corpus"), load_lexicon(config));
  const auto matches = match_corpus(grammar, corpus, threads(config));
  emit(config, "output", log, [&](std::ostream& out) { write_matches_jsonl(matches, out); });
}

void cmd_profile(const PipelineConfig& config, std::ostream& log) {
  const auto grammar = read_grammar(config.get_path("grammar"));
  const fs::path corpus_path = config.get_path("corpus");
  const auto corpus = load_corpus(config, corpus_path, load_lexicon(config));
  const std::string label = config.get("label").empty() ? corpus_path.stem().string() : config.get("label");
  const auto profile = profile_corpus(grammar, corpus, label, threads(config));
  emit(config, "output", log, [&](std::ostream& out) { write_profile_tsv(profile, out); });
}

void cmd_delta(const PipelineConfig& config, std::ostream& log) {
  const auto delta =
      burrows_delta(load_profiles(config), static_cast<std::size_t>(config.get_int("n_features", 0, 1LL << 40)));
  emit(config, "output", log, [&](std::ostream& out) { write_delta_tsv(delta, out); });
}

void cmd_cluster(const PipelineConfig& config, std::ostream& log) {
  const fs::path path = config.get_path("delta");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open delta matrix " + path.string());
  const auto tree = upgma(parse_delta_tsv(in, path.string()), parse_linkage(config.get("linkage")));
  emit(config, "output", log, [&](std::ostream& out) { out << to_newick(tree) << '\n'; });
  emit(config, "ascii", log, [&](std::ostream& out) { out << render_ascii(tree); });
}

void cmd_clip(const PipelineConfig& config, std::ostream& log) {
  const auto grammar = read_grammar(config.get_path("grammar"));
  const auto pairs = clip_pairs(grammar, static_cast<std::size_t>(config.get_int("max_overlap", 1, 64)));
  emit(config, "output", log, [&](std::ostream& out) {
    out << "left\tright\toverlap\tleft_slots\tright_slots\n";
    for (const auto& p : pairs)
      out << p.left << '\t' << p.right << '\t' << p.overlap << '\t' << to_notation(*grammar.find(p.left)) << '\t'
          << to_notation(*grammar.find(p.right)) << '\n';
  });
}

void cmd_distribution(const PipelineConfig& config, std::ostream& log) {
  const auto labels = load_labels(config.get_path("labels"));
  std::size_t grammar_size = 0;
  if (!config.get("grammar").empty()) grammar_size = read_grammar(config.get("grammar")).size();
  const auto dist = category_distribution(labels, grammar_size);
  emit(config, "output", log, [&](std::ostream& out) { write_distribution_tsv(dist, out); });
  if (!config.get("svg").empty()) {
    auto out = open_output(config.get("svg"));
    write_distribution_svg(dist, out);
  }
}

void cmd_table(const PipelineConfig& config, std::ostream& log) {
  const auto table = category_profile_table(load_profiles(config), load_labels(config.get_path("labels")));
  emit(config, "output", log, [&](std::ostream& out) { write_category_table_tsv(table, out); });
}

void cmd_run_all(const PipelineConfig& config, std::ostream& log) {
  const fs::path dir = config.get_path("out_dir");
  const fs::path corpus = config.get_path("corpus");
  const auto eval = config.get_list("eval");
  if (eval.size() < 2) throw InputError("run-all needs at least two eval corpora");

  PipelineConfig step = config;
  if (!config.get("embeddings").empty()) {
    step.set("lexicon", (dir / "lexicon.tsv").string());
    cmd_categories(step, log);
  }
  step.set("grammar", (dir / "grammar.jsonl").string());
  step.set("report", (dir / "learn_report.txt").string());
  cmd_learn(step, log);

  step.set("corpus", config.get("exposure").empty() ? corpus.string() : config.get("exposure"));
  step.set("output", (dir / "grammar.pruned.jsonl").string());
  cmd_prune(step, log);

  step.set("grammar", (dir / "grammar.pruned.jsonl").string());
  std::vector<std::string> profiles;
  for (const auto& e : eval) {
    const std::string label = fs::path(e).stem().string();
    step.set("corpus", e);
    step.set("label", label);
    step.set("output", (dir / "matches" / (label + ".jsonl")).string());
    cmd_annotate(step, log);
    step.set("output", (dir / "profiles" / (label + ".tsv")).string());
    cmd_profile(step, log);
    profiles.push_back(step.get("output"));
  }
  std::string joined;
  for (const auto& p : profiles) joined += (joined.empty() ? "" : ",") + p;
  step.set("profiles", joined);
  step.set("output", (dir / "delta.tsv").string());
  cmd_delta(step, log);

  step.set("delta", (dir / "delta.tsv").string());
  step.set("output", (dir / "tree.nwk").string());
  step.set("ascii", (dir / "tree.txt").string());
  cmd_cluster(step, log);
  log << "run-all: outputs in " << dir.string() << '\n';
}

int run_command(std::string_view command, const PipelineConfig& config, std::ostream& log, std::ostream& err) {
  static const std::map<std::string_view, void (*)(const PipelineConfig&, std::ostream&)> dispatch = {
      {"categories", cmd_categories}, {"learn", cmd_learn},     {"prune", cmd_prune},
      {"annotate", cmd_annotate},     {"profile", cmd_profile}, {"delta", cmd_delta},
      {"cluster", cmd_cluster},       {"clip", cmd_clip},       {"distribution", cmd_distribution},
      {"table", cmd_table},           {"run-all", cmd_run_all}};
  try {
    const auto it = dispatch.find(command);
    if (it == dispatch.end()) throw InputError("unknown command '" + std::string(command) + "'");
    config.validate();
    it->second(config, log);
    log.flush();
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construction grammar induction and corpus analytics"};
  app.set_version_flag("--version", "cxg config-schema " + std::to_string(kConfigSchemaVersion));
  app.require_subcommand(1);
  std::string config_path;
  std::string threads_value;
  app.add_option("--config", config_path, "flat key = value configuration file");
  auto* threads_opt = app.add_option("--threads", threads_value, "worker threads (0 = all cores)");

  // option storage must outlive parsing; std::map nodes are stable
  std::map<std::string, std::map<std::string, std::string>> text_values;
  std::map<std::string, std::map<std::string, bool>> flag_values;
  std::map<std::string, std::map<std::string, std::vector<std::string>>> list_values;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  for (const auto& [name, help] : kCommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    for (const auto& k : kKeys) {
      if (!applies(k, name) || std::string_view(k.key) == "threads") continue;
      CLI::Option* opt = nullptr;
      if (std::string_view(k.key) == "drop_punct") {
        opt = sub->add_flag("--drop-punct,!--no-drop-punct", flag_values[name][k.key], k.help);
      } else if (is_list(k.key)) {
        opt = sub->add_option(option_name(k.key), list_values[name][k.key], k.help)->delimiter(',');
      } else {
        opt = sub->add_option(option_name(k.key), text_values[name][k.key], k.help);
      }
      options[name].emplace_back(k.key, opt);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  PipelineConfig config;
  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (threads_opt->count() > 0) config.set("threads", threads_value);
  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  for (const auto& [key, opt] : options[name]) {
    if (opt->count() == 0) continue;
    if (key == "drop_punct") {
      config.set(key, flag_values[name][key] ? "true" : "false");
    } else if (is_list(key)) {
      std::string joined;
      for (const auto& v : list_values[name][key]) joined += (joined.empty() ? "" : ",") + v;
      config.set(key, joined);
    } else {
      config.set(key, text_values[name][key]);
    }
  }
  return run_command(name, config, out, err);
}

}  // namespace cxg::cli
