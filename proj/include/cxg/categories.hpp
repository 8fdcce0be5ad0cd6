#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace cxg {

/// Index of a distributional (embedding) cluster.
using ClusterId = std::int32_t;

/// Distinguished value for forms without a cluster. Never satisfies a
/// semantic slot-constraint.
inline constexpr ClusterId kOov = -1;

/// Word embeddings, one row per word, in file order.
template <typename Scalar>
struct BasicEmbeddingTable {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::vector<std::string> words;
  Matrix vectors;

  Eigen::Index dim() const { return vectors.cols(); }
  std::size_t size() const { return words.size(); }
};

using EmbeddingTable = BasicEmbeddingTable<double>;

/// Discretized embedding space: each known form maps to one of `k` clusters.
struct SemanticLexicon {
  int k = 0;
  std::vector<std::string> words;          // lowercased, first-occurrence order
  std::unordered_map<std::string, ClusterId> assignment;
  Eigen::MatrixXd centroids;               // k x dim; empty when loaded from TSV
  std::vector<double> inertia_trace;       // within-cluster SS after each Lloyd step

  ClusterId lookup(std::string_view form) const;
};

/// Reads the textual vector format: header `<count> <dim>`, then
/// `word v1 ... v_dim` per line. At most `max_words` rows are read.
EmbeddingTable read_embedding_table(const std::filesystem::path& path, std::size_t max_words);
EmbeddingTable parse_embedding_table(std::istream& in, std::size_t max_words,
                                     const std::string& source = "<stream>");

struct KMeansOptions {
  int k = 1000;
  std::uint64_t seed = 1;
  int max_iter = 100;
};

/// Lloyd's algorithm with k-means++ seeding on raw Euclidean distance.
/// Deterministic for fixed inputs and seed; no cluster is left empty.
SemanticLexicon kmeans(const EmbeddingTable& table, const KMeansOptions& options);

/// Sum of squared distances of each row to its assigned centroid.
double within_cluster_ss(const EmbeddingTable& table, const std::vector<ClusterId>& assignment,
                         const Eigen::MatrixXd& centroids);

ClusterId lookup(const SemanticLexicon& lexicon, std::string_view form);

/// `form<TAB>cluster` rows preceded by a `# k=<k>` comment.
void write_lexicon(const SemanticLexicon& lexicon, std::ostream& out);
SemanticLexicon read_lexicon(const std::filesystem::path& path);
SemanticLexicon parse_lexicon(std::istream& in, const std::string& source = "<stream>");

}  // namespace cxg
