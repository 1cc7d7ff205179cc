#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/model.hpp"

namespace conman {

struct EmbeddingRecord {
  AccountId account_id;
  std::vector<double> vector;

  bool operator==(const EmbeddingRecord&) const = default;
};

void to_json(nlohmann::json& j, const EmbeddingRecord& r);
void from_json(const nlohmann::json& j, EmbeddingRecord& r);

// Throws ValidationError on non-finite entries, mixed dimensions or
// duplicate account ids.
void validate_embeddings(std::span<const EmbeddingRecord> records);

// Row-major n x d matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

Matrix to_matrix(std::span<const EmbeddingRecord> records, bool unit_norm = false);

struct Reduction {
  Matrix points;       // n x k projected coordinates
  Matrix components;   // k x d principal directions (unit, orthogonal)
  std::vector<double> variances;  // eigenvalue per component
  bool degenerate = false;        // all-identical input
};

// Centres the data and projects onto the top-k principal directions found by
// power iteration with deflation on the covariance matrix (tolerance 1e-9,
// at most 1000 iterations per direction). Start vector for direction i is
// e_0 plus a small index-dependent perturbation; each direction's sign is
// fixed so its largest-magnitude entry is positive. Throws ConfigError when
// k is 0 or exceeds d.
Reduction reduce(const Matrix& x, std::size_t k);

// Leading k columns of an existing reduction.
Matrix take_columns(const Matrix& m, std::size_t k);

struct ClusterAssignment {
  std::vector<AccountId> account_ids;  // input order
  std::vector<int> labels;             // -1 = noise
  std::map<int, std::string> label_names;

  std::size_t cluster_count() const;
  std::size_t noise_count() const;
  bool operator==(const ClusterAssignment&) const = default;
};

// Dense pairwise Euclidean distances, n x n.
Matrix pairwise_distances(const Matrix& points, unsigned threads = 1);

// Components of the graph joining points closer than cutoff. Components
// smaller than min_cluster_size become -1; the rest are labelled 0.. by
// descending size, ties broken by lexicographically smallest account id.
ClusterAssignment single_linkage_cluster(const Matrix& points,
                                         std::span<const AccountId> account_ids, double cutoff,
                                         std::size_t min_cluster_size);
ClusterAssignment single_linkage_cluster(const Matrix& distances, bool precomputed,
                                         std::span<const AccountId> account_ids, double cutoff,
                                         std::size_t min_cluster_size);

// Mean silhouette over non-noise points. A point alone in its cluster
// scores 0. Throws UndefinedScore with fewer than two clusters.
double silhouette(const Matrix& points, std::span<const int> labels);
double silhouette_precomputed(const Matrix& distances, std::span<const int> labels);

struct EmbedConfig {
  std::size_t reduce_to = 2;
  double linkage_cutoff = 1.0;
  std::size_t min_cluster_size = 20;

  bool operator==(const EmbedConfig&) const = default;
};

// Throws ConfigError when reduce_to is outside [2,128], cutoff <= 0, or
// min_cluster_size outside [10,50].
void validate(const EmbedConfig& c);

struct SweepGrid {
  std::vector<std::size_t> reduce_to;
  std::vector<double> linkage_cutoff;
  std::vector<std::size_t> min_cluster_size;

  std::size_t size() const {
    return reduce_to.size() * linkage_cutoff.size() * min_cluster_size.size();
  }
};

struct SweepRow {
  EmbedConfig config;
  std::optional<double> score;  // absent when undefined
  std::size_t clusters = 0;
  std::size_t noise = 0;
};

struct SweepResult {
  EmbedConfig best;
  ClusterAssignment assignment;
  double best_score = 0;
  std::vector<SweepRow> table;  // grid order: reduce_to, cutoff, min size
};

// Evaluates every grid point. Best = highest silhouette, then fewer noise
// points, then smaller cutoff, smaller reduce_to, smaller min size. Throws
// SweepFailed when no grid point yields a defined score, ConfigError on an
// empty or invalid grid.
SweepResult sweep(std::span<const EmbeddingRecord> embeddings, const SweepGrid& grid,
                  unsigned threads = 1, bool unit_norm = false);

inline constexpr std::array<std::string_view, 7> kProfileClusterNames{
    "NFTs", "Male", "Female", "TechSupport", "Wallets", "DefaultImage", "Miscellaneous"};

struct EngagementRow {
  std::string name;  // label name, or "Cluster N"
  int label = 0;
  std::size_t scammers = 0;
  std::size_t followers = 0;   // follower count summed over members
  std::size_t replies = 0;
  std::size_t quoted = 0;
  std::size_t suspended = 0;   // members whose terminal status is Suspended
  double scammer_pct = 0;
  double followers_pct = 0;
  double replies_pct = 0;
  double quoted_pct = 0;
  double suspended_pct = 0;    // suspended / scammers within the cluster
};

// One row per non-noise label. The first four percentages are shares of the
// clustered totals; the suspended percentage is the within-cluster rate.
std::vector<EngagementRow> cluster_engagement_table(const ClusterAssignment& assignment,
                                                    std::span<const ScamAccount> accounts,
                                                    std::span<const Interaction> interactions);

void to_json(nlohmann::json& j, const EmbedConfig& c);
void from_json(const nlohmann::json& j, EmbedConfig& c);

}  // namespace conman
