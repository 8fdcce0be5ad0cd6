#include "cxg/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cxg/errors.hpp"
#include "cxg/text.hpp"

namespace cxg {
namespace {

bool needs_quotes(std::string_view label) {
  return label.find_first_of(" \t()[]':;,") != std::string_view::npos;
}

std::string newick_label(const std::string& label) {
  if (!needs_quotes(label)) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  return std::nullopt;
}

std::vector<CategoryLabel> parse_labels(std::istream& in, const std::string& source) {
  std::vector<CategoryLabel> labels;
  std::unordered_set<ConstructionId> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (text::trim(row).empty() || row.front() == '#') continue;
    const auto f = text::split(row, '\t');
    ConstructionId id = 0;
    const auto* end = f[0].data() + f[0].size();
    const auto res = std::from_chars(f[0].data(), end, id);
    if (f.size() != 2 || res.ec != std::errc() || res.ptr != end)
      throw ParseError(source, line_no, "expected 'cid<TAB>category'");
    const auto category = parse_category(text::trim(f[1]));
    if (!category)
      throw ValidationError(source + ":" + std::to_string(line_no) + ": unknown category " + std::string(f[1]));
    if (!seen.insert(id).second)
      throw ValidationError(source + ":" + std::to_string(line_no) + ": duplicate cid " + std::to_string(id));
    labels.push_back(CategoryLabel{id, *category});
  }
  return labels;
}

std::vector<CategoryLabel> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels " + path.string());
  return parse_labels(in, path.string());
}

CategoryDistribution category_distribution(const std::vector<CategoryLabel>& labels, std::size_t grammar_size) {
  if (labels.empty()) throw std::invalid_argument("category_distribution: no labels");
  CategoryDistribution d;
  for (const auto& l : labels) ++d.counts[static_cast<std::size_t>(l.category)];
  d.labeled = labels.size();
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    d.percent[i] = 100.0 * static_cast<double>(d.counts[i]) / static_cast<double>(d.labeled);
  d.sample_fraction = grammar_size == 0 ? 1.0 : static_cast<double>(d.labeled) / static_cast<double>(grammar_size);
  return d;
}

void write_distribution_tsv(const CategoryDistribution& dist, std::ostream& out) {
  out << "# labeled=" << dist.labeled << " sample_fraction=" << text::format_double(dist.sample_fraction) << '\n';
  out << "category\tcount\tpercent\n";
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    out << kCategoryNames[i] << '\t' << dist.counts[i] << '\t' << text::format_fixed(dist.percent[i], 2) << '\n';
}

void write_distribution_svg(const CategoryDistribution& dist, std::ostream& out) {
  constexpr int kBarHeight = 24, kGap = 8, kLabelWidth = 120, kPlotWidth = 400, kMargin = 10;
  const double max_pct = std::max(1.0, *std::max_element(dist.percent.begin(), dist.percent.end()));
  const int height = kMargin * 2 + static_cast<int>(kCategoryCount) * (kBarHeight + kGap);
  const int width = kMargin * 2 + kLabelWidth + kPlotWidth + 60;

  // bars ordered by share, largest on top
  std::array<std::size_t, kCategoryCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist.percent[a] > dist.percent[b]; });

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t r = 0; r < kCategoryCount; ++r) {
    const auto i = order[r];
    const int y = kMargin + static_cast<int>(r) * (kBarHeight + kGap);
    const double w = kPlotWidth * dist.percent[i] / max_pct;
    out << "  <text x=\"" << kMargin + kLabelWidth - 6 << "\" y=\"" << y + kBarHeight * 2 / 3
        << "\" text-anchor=\"end\">" << xml_escape(kCategoryNames[i]) << "</text>\n";
    out << "  <rect x=\"" << kMargin + kLabelWidth << "\" y=\"" << y << "\" width=\"" << text::format_fixed(w, 2)
        << "\" height=\"" << kBarHeight << "\" fill=\"#4c72b0\"/>\n";
    out << "  <text x=\"" << text::format_fixed(kMargin + kLabelWidth + w + 4, 2) << "\" y=\""
        << y + kBarHeight * 2 / 3 << "\">" << text::format_fixed(dist.percent[i], 1) << "%</text>\n";
  }
  out << "</svg>\n";
}

CategoryTable category_profile_table(const std::vector<FrequencyProfile>& profiles,
                                     const std::vector<CategoryLabel>& labels) {
  CategoryTable table;
  for (const auto& p : profiles) table.corpora.push_back(p.label);
  for (auto& row : table.cells) row.assign(profiles.size(), CategoryCell{});

  for (std::size_t j = 0; j < profiles.size(); ++j) {
    std::unordered_map<ConstructionId, const ProfileEntry*> by_id;
    for (const auto& e : profiles[j].entries) by_id.emplace(e.id, &e);
    for (const auto& l : labels) {
      const auto it = by_id.find(l.id);
      if (it == by_id.end())
        throw ValidationError("label references unknown cid " + std::to_string(l.id) + " in profile '" +
                              profiles[j].label + "'");
      auto& cell = table.cells[static_cast<std::size_t>(l.category)][j];
      ++cell.constructions;
      cell.mean_tokens += static_cast<double>(it->second->tokens);
      cell.mean_types += static_cast<double>(it->second->types);
    }
  }
  for (auto& row : table.cells)
    for (auto& cell : row)
      if (cell.constructions > 0) {
        cell.mean_tokens /= static_cast<double>(cell.constructions);
        cell.mean_types /= static_cast<double>(cell.constructions);
      }
  return table;
}

void write_category_table_tsv(const CategoryTable& table, std::ostream& out) {
  out << "category";
  for (const auto& c : table.corpora) out << '\t' << c << ":freq\t" << c << ":type";
  out << '\n';
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    out << kCategoryNames[i];
    for (const auto& cell : table.cells[i]) {
      if (cell.constructions == 0) out << "\tNA\tNA";
      else out << '\t' << text::format_fixed(cell.mean_tokens, 2) << '\t' << text::format_fixed(cell.mean_types, 2);
    }
    out << '\n';
  }
}

DeltaMatrix burrows_delta(const std::vector<FrequencyProfile>& profiles, std::size_t n_features) {
  if (profiles.size() < 2) throw std::invalid_argument("burrows_delta: need at least two profiles");

  const auto& reference = profiles.front();
  std::vector<ConstructionId> ids;
  for (const auto& e : reference.entries) ids.push_back(e.id);
  const std::set<ConstructionId> id_set(ids.begin(), ids.end());

  const auto corpora = static_cast<Eigen::Index>(profiles.size());
  Eigen::MatrixXd rates(corpora, static_cast<Eigen::Index>(ids.size()));
  std::unordered_map<ConstructionId, Eigen::Index> column;
  for (std::size_t j = 0; j < ids.size(); ++j) column.emplace(ids[j], static_cast<Eigen::Index>(j));

  for (Eigen::Index r = 0; r < corpora; ++r) {
    const auto& p = profiles[static_cast<std::size_t>(r)];
    if (p.grammar_fingerprint != 0 && reference.grammar_fingerprint != 0 &&
        p.grammar_fingerprint != reference.grammar_fingerprint)
      throw ValidationError("profile '" + p.label + "' was computed with a different grammar");
    std::set<ConstructionId> these;
    for (const auto& e : p.entries) {
      these.insert(e.id);
      const auto it = column.find(e.id);
      if (it != column.end()) rates(r, it->second) = e.per_million;
    }
    if (these != id_set) throw ValidationError("profile '" + p.label + "' covers different constructions");
  }

  // most frequent features first; ties by id
  std::vector<Eigen::Index> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  const Eigen::RowVectorXd summed = rates.colwise().sum();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (summed[a] != summed[b]) return summed[a] > summed[b];
    return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
  });
  if (n_features != 0 && n_features < order.size()) order.resize(n_features);

  std::vector<Eigen::Index> kept;
  for (auto j : order) {
    const auto col = rates.col(j);
    if (col.maxCoeff() != col.minCoeff()) kept.push_back(j);
  }
  if (kept.empty()) throw ValidationError("burrows_delta: every feature has zero variance");

  Eigen::MatrixXd selected(corpora, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) selected.col(static_cast<Eigen::Index>(j)) = rates.col(kept[j]);
  const Eigen::MatrixXd z = zscore_columns(selected);

  DeltaMatrix delta;
  delta.n_features = kept.size();
  for (const auto& p : profiles) delta.labels.push_back(p.label);
  delta.distances = Eigen::MatrixXd::Zero(corpora, corpora);
  for (Eigen::Index a = 0; a < corpora; ++a)
    for (Eigen::Index b = a + 1; b < corpora; ++b) {
      const double d = (z.row(a) - z.row(b)).cwiseAbs().mean();
      delta.distances(a, b) = delta.distances(b, a) = d;
    }
  return delta;
}

void write_delta_tsv(const DeltaMatrix& delta, std::ostream& out) {
  out << "# features=" << delta.n_features << '\n';
  for (const auto& l : delta.labels) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < delta.size(); ++i) {
    out << delta.labels[i];
    for (std::size_t j = 0; j < delta.size(); ++j)
      out << '\t' << text::format_double(delta.distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out << '\n';
  }
}

DeltaMatrix parse_delta_tsv(std::istream& in, const std::string& source) {
  DeltaMatrix delta;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    if (row.front() == '#') {
      const auto body = text::trim(row.substr(1));
      if (body.rfind("features=", 0) == 0) delta.n_features = std::stoull(std::string(body.substr(9)));
      continue;
    }
    const auto f = text::split(row, '\t');
    if (!header) {
      if (f.empty() || !f[0].empty()) throw ParseError(source, line_no, "expected header row starting with a tab");
      for (std::size_t i = 1; i < f.size(); ++i) delta.labels.emplace_back(f[i]);
      header = true;
      continue;
    }
    if (f.size() != delta.labels.size() + 1) throw ParseError(source, line_no, "row width does not match header");
    if (f[0] != delta.labels[rows.size()]) throw ParseError(source, line_no, "row label out of order");
    std::vector<double> values;
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = 0.0;
      const auto* end = f[i].data() + f[i].size();
      const auto res = std::from_chars(f[i].data(), end, v);
      if (res.ec != std::errc() || res.ptr != end) throw ParseError(source, line_no, "bad number");
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() != delta.labels.size()) throw ParseError(source, line_no, "matrix is not square");
  const auto n = static_cast<Eigen::Index>(rows.size());
  delta.distances.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) delta.distances(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  for (Eigen::Index i = 0; i < n; ++i) {
    if (delta.distances(i, i) != 0.0) throw ValidationError(source + ": non-zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j)
      if (delta.distances(i, j) != delta.distances(j, i) || delta.distances(i, j) < 0.0)
        throw ValidationError(source + ": matrix must be symmetric and non-negative");
  }
  return delta;
}

Linkage parse_linkage(std::string_view name) {
  if (name == "average" || name == "upgma") return Linkage::Average;
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  throw std::invalid_argument("unknown linkage '" + std::string(name) + "'");
}

std::vector<std::string> Dendrogram::leaves_under(int node) const {
  std::vector<std::string> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (is_leaf(n)) {
      out.push_back(leaves[static_cast<std::size_t>(n)]);
    } else {
      stack.push_back(nodes[static_cast<std::size_t>(n)].right);
      stack.push_back(nodes[static_cast<std::size_t>(n)].left);
    }
  }
  return out;
}

Dendrogram upgma(const DeltaMatrix& delta, Linkage linkage) {
  const std::size_t n = delta.size();
  if (n == 0) throw std::invalid_argument("upgma: empty matrix");

  // leaves in label order so the result does not depend on input order
  std::vector<std::size_t> by_label(n);
  std::iota(by_label.begin(), by_label.end(), 0);
  std::sort(by_label.begin(), by_label.end(), [&](auto a, auto b) { return delta.labels[a] < delta.labels[b]; });

  Dendrogram tree;
  for (auto i : by_label) tree.leaves.push_back(delta.labels[i]);
  tree.nodes.resize(n);
  const auto dist = [&](std::size_t a, std::size_t b) {
    return delta.distances(static_cast<Eigen::Index>(by_label[a]), static_cast<Eigen::Index>(by_label[b]));
  };

  struct Cluster {
    int node;
    std::vector<std::size_t> members;  // sorted leaf positions; members[0] is the smallest label
  };
  std::vector<Cluster> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back(Cluster{static_cast<int>(i), {i}});

  const auto link = [&](const Cluster& a, const Cluster& b) {
    double acc = linkage == Linkage::Single ? std::numeric_limits<double>::infinity() : 0.0;
    for (auto x : a.members)
      for (auto y : b.members) {
        const double d = dist(x, y);
        switch (linkage) {
          case Linkage::Average: acc += d; break;
          case Linkage::Single: acc = std::min(acc, d); break;
          case Linkage::Complete: acc = std::max(acc, d); break;
        }
      }
    if (linkage == Linkage::Average) acc /= static_cast<double>(a.members.size() * b.members.size());
    return acc;
  };

  while (active.size() > 1) {
    // `active` stays sorted by smallest member, so the first minimum found
    // is the label-smallest pair
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = link(active[a], active[b]);
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    Cluster merged;
    merged.node = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(Dendrogram::Node{active[best_a].node, active[best_b].node, best});
    merged.members = active[best_a].members;
    merged.members.insert(merged.members.end(), active[best_b].members.begin(), active[best_b].members.end());
    std::sort(merged.members.begin(), merged.members.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    active[best_a] = std::move(merged);
    std::sort(active.begin(), active.end(),
              [](const Cluster& x, const Cluster& y) { return x.members.front() < y.members.front(); });
  }
  return tree;
}

std::string to_newick(const Dendrogram& tree) {
  const auto height = [&](int node) { return tree.is_leaf(node) ? 0.0 : tree.nodes[static_cast<std::size_t>(node)].height; };
  std::string out;
  const auto emit = [&](auto&& self, int node, double parent_height) -> void {
    if (tree.is_leaf(node)) {
      out += newick_label(tree.leaves[static_cast<std::size_t>(node)]);
    } else {
      const auto& n = tree.nodes[static_cast<std::size_t>(node)];
      out += '(';
      self(self, n.left, n.height);
      out += ',';
      self(self, n.right, n.height);
      out += ')';
    }
    if (parent_height >= 0.0) out += ':' + text::format_double((parent_height - height(node)) / 2.0);
  };
  emit(emit, tree.root(), -1.0);
  return out + ';';
}

std::string render_ascii(const Dendrogram& tree) {
  std::string out;
  const auto emit = [&](auto&& self, int node, const std::string& prefix, bool last, bool top) -> void {
    out += prefix;
    if (!top) out += last ? "`-- " : "|-- ";
    if (tree.is_leaf(node)) {
      out += tree.leaves[static_cast<std::size_t>(node)] + '\n';
      return;
    }
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    out += "[" + text::format_fixed(n.height, 4) + "]\n";
    const std::string child_prefix = top ? prefix : prefix + (last ? "    " : "|   ");
    self(self, n.left, child_prefix, false, false);
    self(self, n.right, child_prefix, true, false);
  };
  emit(emit, tree.root(), "", true, true);
  return out;
}

std::vector<ClipPair> clip_pairs(const Grammar& grammar, std::size_t max_overlap) {
  if (max_overlap < 1) throw std::invalid_argument("clip_pairs: max_overlap must be >= 1");
  std::vector<ClipPair> out;
  for (std::size_t o = 1; o <= max_overlap; ++o) {
    std::unordered_map<SlotSequence, std::vector<ConstructionId>, SlotSequenceHash> by_prefix;
    for (const auto& c : grammar)
      if (c.size() > o) by_prefix[SlotSequence(c.slots.begin(), c.slots.begin() + static_cast<std::ptrdiff_t>(o))].push_back(c.id);
    for (const auto& c : grammar) {
      if (c.size() <= o) continue;
      const SlotSequence suffix(c.slots.end() - static_cast<std::ptrdiff_t>(o), c.slots.end());
      const auto it = by_prefix.find(suffix);
      if (it == by_prefix.end()) continue;
      for (auto right : it->second) out.push_back(ClipPair{c.id, right, o});
    }
  }
  std::sort(out.begin(), out.end(), [](const ClipPair& a, const ClipPair& b) {
    if (a.left != b.left) return a.left < b.left;
    if (a.right != b.right) return a.right < b.right;
    return a.overlap < b.overlap;
  });
  return out;
}

}  // namespace cxg
