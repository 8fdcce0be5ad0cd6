#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cxg/grammar.hpp"
#include "cxg/matcher.hpp"

namespace cxg {

enum class Category : std::uint8_t {
  Verbal, Nominal, Adjectival, Adpositional, Transitional, Clausal, Adverbial, Sentential, FixedIdiom
};

inline constexpr std::size_t kCategoryCount = 9;

inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Verbal", "Nominal", "Adjectival", "Adpositional", "Transitional",
    "Clausal", "Adverbial", "Sentential", "FixedIdiom"};

constexpr std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::optional<Category> parse_category(std::string_view name);

struct CategoryLabel {
  ConstructionId id = 0;
  Category category = Category::Verbal;
};

/// TSV `cid<TAB>category`; unknown categories and duplicate ids are errors.
std::vector<CategoryLabel> parse_labels(std::istream& in, const std::string& source = "<stream>");
std::vector<CategoryLabel> load_labels(const std::filesystem::path& path);

struct CategoryDistribution {
  std::array<std::size_t, kCategoryCount> counts{};
  std::array<double, kCategoryCount> percent{};
  std::size_t labeled = 0;
  double sample_fraction = 1.0;  // labeled / grammar size, when known
};

/// Percentages over the labeled sample, which also estimate the whole
/// grammar under simple random sampling.
CategoryDistribution category_distribution(const std::vector<CategoryLabel>& labels, std::size_t grammar_size = 0);

void write_distribution_tsv(const CategoryDistribution& dist, std::ostream& out);
/// Horizontal bar chart, one bar per category.
void write_distribution_svg(const CategoryDistribution& dist, std::ostream& out);

struct CategoryCell {
  std::size_t constructions = 0;
  double mean_tokens = 0.0;
  double mean_types = 0.0;
};

/// Mean token frequency and type count per (category, corpus) over the
/// labeled constructions; unlabeled constructions are ignored.
struct CategoryTable {
  std::vector<std::string> corpora;
  std::array<std::vector<CategoryCell>, kCategoryCount> cells;  // [category][corpus]
};

CategoryTable category_profile_table(const std::vector<FrequencyProfile>& profiles,
                                     const std::vector<CategoryLabel>& labels);
void write_category_table_tsv(const CategoryTable& table, std::ostream& out);

template <typename Scalar>
struct BasicDeltaMatrix {
  std::vector<std::string> labels;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> distances;
  std::size_t n_features = 0;  // features retained after dropping zero variance

  std::size_t size() const { return labels.size(); }
};

using DeltaMatrix = BasicDeltaMatrix<double>;

/// Column-wise z-scores with the population standard deviation.
/// Constant columns are returned as NaN.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> zscore_columns(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto mean = x.colwise().mean();
  const auto centered = (x.rowwise() - mean).eval();
  const auto sd = (centered.colwise().squaredNorm() / static_cast<Scalar>(x.rows())).cwiseSqrt().eval();
  return centered.array().rowwise() / sd.array();
}

/// Classic Delta: mean absolute z-score difference over the `n_features`
/// constructions with the highest summed tokens-per-million (0 = all).
/// Requires at least two profiles over the same grammar.
DeltaMatrix burrows_delta(const std::vector<FrequencyProfile>& profiles, std::size_t n_features = 0);

void write_delta_tsv(const DeltaMatrix& delta, std::ostream& out);
DeltaMatrix parse_delta_tsv(std::istream& in, const std::string& source = "<stream>");

enum class Linkage { Average, Single, Complete };
Linkage parse_linkage(std::string_view name);

/// Binary merge tree. Nodes [0, leaves) are leaves; each later node merges
/// two earlier ones at `height` (the linkage distance).
struct Dendrogram {
  struct Node {
    int left = -1;
    int right = -1;
    double height = 0.0;
  };
  std::vector<std::string> leaves;
  std::vector<Node> nodes;

  int root() const { return static_cast<int>(nodes.size()) - 1; }
  bool is_leaf(int node) const { return node < static_cast<int>(leaves.size()); }
  std::vector<std::string> leaves_under(int node) const;
};

/// Agglomerative clustering, average linkage by default. Ties go to the
/// pair whose smallest labels sort first, so the tree depends only on the
/// labeled distances and not on input order.
Dendrogram upgma(const DeltaMatrix& delta, Linkage linkage = Linkage::Average);

/// Newick with ultrametric branch lengths (a merge at distance d puts its
/// leaves at depth d/2), terminated by ';'.
std::string to_newick(const Dendrogram& tree);
std::string render_ascii(const Dendrogram& tree);

struct ClipPair {
  ConstructionId left = 0;
  ConstructionId right = 0;
  std::size_t overlap = 0;

  friend bool operator==(const ClipPair&, const ClipPair&) = default;
};

/// Ordered pairs whose boundary slots coincide: the last `o` slots of
/// `left` equal the first `o` of `right`, for 1 <= o <= max_overlap. Each
/// side keeps at least one slot of its own.
std::vector<ClipPair> clip_pairs(const Grammar& grammar, std::size_t max_overlap);

}  // namespace cxg
