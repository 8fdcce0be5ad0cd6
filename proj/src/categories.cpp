#include "cxg/categories.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "cxg/errors.hpp"
#include "cxg/text.hpp"

namespace cxg {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, value);
  return res.ec == std::errc() && res.ptr == end;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Squared distances from every row of `points` to every centroid, computed in
// row blocks through ||x||^2 - 2 x.c + ||c||^2.
template <typename Visit>
void for_each_distance_block(const EmbeddingTable::Matrix& points, const Eigen::MatrixXd& centroids,
                             Visit&& visit) {
  constexpr Eigen::Index kBlock = 2048;
  const Eigen::VectorXd centroid_norms = centroids.rowwise().squaredNorm();
  for (Eigen::Index start = 0; start < points.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, points.rows() - start);
    const auto block = points.middleRows(start, rows);
    Eigen::MatrixXd dist = -2.0 * (block * centroids.transpose());
    dist.colwise() += block.rowwise().squaredNorm();
    dist.rowwise() += centroid_norms.transpose();
    visit(start, dist.cwiseMax(0.0));
  }
}

std::vector<Eigen::Index> nearest_centroids(const EmbeddingTable::Matrix& points,
                                            const Eigen::MatrixXd& centroids) {
  std::vector<Eigen::Index> nearest(static_cast<std::size_t>(points.rows()));
  for_each_distance_block(points, centroids, [&](Eigen::Index start, const Eigen::MatrixXd& dist) {
    for (Eigen::Index r = 0; r < dist.rows(); ++r) {
      Eigen::Index best = 0;
      dist.row(r).minCoeff(&best);  // first minimum: ties go to the lowest index
      nearest[static_cast<std::size_t>(start + r)] = best;
    }
  });
  return nearest;
}

Eigen::MatrixXd plus_plus_init(const EmbeddingTable::Matrix& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  Eigen::VectorXd d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cumulative += d2[i];
        pick = i;
        if (cumulative > target) break;
      }
    }
    if (pick < 0) {
      // every remaining point coincides with a chosen centroid
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centroids.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

// Moves the point farthest from its own centroid into each empty cluster.
void reseed_empty_clusters(const EmbeddingTable::Matrix& points, const Eigen::MatrixXd& centroids,
                           std::vector<Eigen::Index>& assignment, int k) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (auto a : assignment) ++sizes[static_cast<std::size_t>(a)];
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<std::size_t>(c)] != 0) continue;
    Eigen::Index farthest = -1;
    double farthest_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const auto own = assignment[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(own)] < 2) continue;
      const double d = (points.row(i) - centroids.row(own)).squaredNorm();
      if (d > farthest_d) {
        farthest_d = d;
        farthest = i;
      }
    }
    if (farthest < 0) throw std::logic_error("kmeans: cannot fill empty cluster");
    --sizes[static_cast<std::size_t>(assignment[static_cast<std::size_t>(farthest)])];
    assignment[static_cast<std::size_t>(farthest)] = c;
    ++sizes[static_cast<std::size_t>(c)];
  }
}

Eigen::MatrixXd cluster_means(const EmbeddingTable::Matrix& points,
                              const std::vector<Eigen::Index>& assignment, int k) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = assignment[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    counts[c] += 1.0;
  }
  return sums.array().colwise() / counts.array();
}

double inertia(const EmbeddingTable::Matrix& points, const std::vector<Eigen::Index>& assignment,
               const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - centroids.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

}  // namespace

ClusterId SemanticLexicon::lookup(std::string_view form) const {
  const auto it = assignment.find(std::string(form));
  return it == assignment.end() ? kOov : it->second;
}

ClusterId lookup(const SemanticLexicon& lexicon, std::string_view form) {
  return lexicon.lookup(form);
}

EmbeddingTable parse_embedding_table(std::istream& in, std::size_t max_words, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return {};
  ++line_no;
  const auto header = split_ws(text::chomp(line));
  std::size_t count = 0;
  long dim = 0;
  if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) || dim <= 0)
    throw ParseError(source, line_no, "expected header '<count> <dim>'");

  const std::size_t limit = std::min(count, max_words);
  EmbeddingTable table;
  std::vector<double> values;
  values.reserve(limit * static_cast<std::size_t>(dim));
  std::unordered_map<std::string, std::size_t> seen;

  while (table.words.size() < limit && std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(text::chomp(line));
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1));
    std::string word(fields[0]);
    if (!seen.emplace(word, table.words.size()).second)
      throw ParseError(source, line_no, "duplicate word '" + word + "'");
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v))
        throw ParseError(source, line_no, "bad number '" + std::string(fields[j]) + "'");
      values.push_back(v);
    }
    table.words.push_back(std::move(word));
  }

  table.vectors = Eigen::Map<const EmbeddingTable::Matrix>(
      values.data(), static_cast<Eigen::Index>(table.words.size()), dim);
  return table;
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path, std::size_t max_words) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  return parse_embedding_table(in, max_words, path.string());
}

double within_cluster_ss(const EmbeddingTable& table, const std::vector<ClusterId>& assignment,
                         const Eigen::MatrixXd& centroids) {
  std::vector<Eigen::Index> idx(assignment.begin(), assignment.end());
  return inertia(table.vectors, idx, centroids);
}

SemanticLexicon kmeans(const EmbeddingTable& table, const KMeansOptions& options) {
  const int k = options.k;
  const auto n = static_cast<Eigen::Index>(table.size());
  if (k <= 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > n)
    throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " entries");
  if (options.max_iter <= 0) throw std::invalid_argument("kmeans: max_iter must be positive");

  const auto& points = table.vectors;
  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd centroids = plus_plus_init(points, k, rng);

  SemanticLexicon lex;
  auto assignment = nearest_centroids(points, centroids);
  reseed_empty_clusters(points, centroids, assignment, k);
  centroids = cluster_means(points, assignment, k);
  lex.inertia_trace.push_back(inertia(points, assignment, centroids));

  for (int iter = 1; iter < options.max_iter; ++iter) {
    auto next = nearest_centroids(points, centroids);
    reseed_empty_clusters(points, centroids, next, k);
    if (next == assignment) break;
    assignment = std::move(next);
    centroids = cluster_means(points, assignment, k);
    lex.inertia_trace.push_back(inertia(points, assignment, centroids));
  }

  lex.k = k;
  lex.centroids = std::move(centroids);
  lex.assignment.reserve(table.size());
  // keys match corpus forms; of several casings the first (most frequent) wins
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto form = text::to_lower(table.words[i]);
    if (lex.assignment.emplace(form, static_cast<ClusterId>(assignment[i])).second)
      lex.words.push_back(std::move(form));
  }
  return lex;
}

void write_lexicon(const SemanticLexicon& lexicon, std::ostream& out) {
  out << "# k=" << lexicon.k << '\n';
  for (const auto& w : lexicon.words) out << w << '\t' << lexicon.assignment.at(w) << '\n';
}

SemanticLexicon parse_lexicon(std::istream& in, const std::string& source) {
  SemanticLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  int declared_k = 0;
  ClusterId max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    if (row.front() == '#' && row.find('\t') == std::string_view::npos) {
      const auto body = text::trim(row.substr(1));
      if (body.rfind("k=", 0) == 0 && !parse_number(body.substr(2), declared_k))
        throw ParseError(source, line_no, "bad k declaration");
      continue;
    }
    const auto fields = text::split(row, '\t');
    ClusterId id = 0;
    if (fields.size() != 2 || fields[0].empty() || !parse_number(fields[1], id) || id < 0)
      throw ParseError(source, line_no, "expected 'form<TAB>cluster'");
    std::string form = text::to_lower(fields[0]);
    if (!lex.assignment.emplace(form, id).second)
      throw ParseError(source, line_no, "duplicate form '" + form + "'");
    lex.words.push_back(std::move(form));
    max_id = std::max(max_id, id);
  }
  lex.k = std::max(declared_k, max_id + 1);
  if (declared_k != 0 && max_id >= declared_k)
    throw ValidationError(source + ": cluster " + std::to_string(max_id) + " not below k=" + std::to_string(declared_k));
  return lex;
}

SemanticLexicon read_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon " + path.string());
  return parse_lexicon(in, path.string());
}

}  // namespace cxg
