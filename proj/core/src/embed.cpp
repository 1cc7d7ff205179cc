#include "conman/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "conman/error.hpp"
#include "conman/parallel.hpp"
#include "conman/union_find.hpp"

namespace conman {
namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ClusterAssignment label_components(UnionFind& uf, std::span<const AccountId> ids,
                                   std::size_t min_cluster_size) {
  const std::size_t n = ids.size();
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < n; ++i) comps[uf.find(i)].push_back(i);
  struct Comp {
    std::size_t size;
    AccountId smallest;
    std::vector<std::size_t> members;
  };
  std::vector<Comp> kept;
  for (auto& [_, m] : comps) {
    if (m.size() < min_cluster_size) continue;
    AccountId smallest = ids[m.front()];
    for (auto i : m) smallest = std::min(smallest, ids[i]);
    kept.push_back({m.size(), std::move(smallest), std::move(m)});
  }
  std::sort(kept.begin(), kept.end(), [](const Comp& a, const Comp& b) {
    return std::tie(b.size, a.smallest) < std::tie(a.size, b.smallest);
  });
  ClusterAssignment out;
  out.account_ids.assign(ids.begin(), ids.end());
  out.labels.assign(n, -1);
  for (std::size_t l = 0; l < kept.size(); ++l) {
    for (auto i : kept[l].members) out.labels[i] = static_cast<int>(l);
  }
  return out;
}

template <typename DistFn>
double silhouette_impl(std::size_t n, std::span<const int> labels, DistFn&& d) {
  if (labels.size() != n) throw ValidationError("label count does not match point count");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= 0) members[labels[i]].push_back(i);
  }
  if (members.size() < 2) {
    throw UndefinedScore(fmt::format("silhouette needs at least 2 clusters, got {}", members.size()));
  }
  double total = 0;
  std::size_t counted = 0;
  for (const auto& [label, own] : members) {
    for (auto i : own) {
      ++counted;
      if (own.size() == 1) continue;  // s = 0
      double a = 0;
      for (auto j : own) {
        if (j != i) a += d(i, j);
      }
      a /= static_cast<double>(own.size() - 1);
      double b = std::numeric_limits<double>::infinity();
      for (const auto& [other, pts] : members) {
        if (other == label) continue;
        double s = 0;
        for (auto j : pts) s += d(i, j);
        b = std::min(b, s / static_cast<double>(pts.size()));
      }
      const double m = std::max(a, b);
      if (m > 0) total += (b - a) / m;
    }
  }
  return total / static_cast<double>(counted);
}

}  // namespace

void to_json(nlohmann::json& j, const EmbeddingRecord& r) {
  j = {{"account_id", r.account_id}, {"vector", r.vector}};
}

void from_json(const nlohmann::json& j, EmbeddingRecord& r) {
  j.at("account_id").get_to(r.account_id);
  j.at("vector").get_to(r.vector);
  for (double v : r.vector) {
    if (!std::isfinite(v)) throw ValidationError("non-finite embedding value for " + r.account_id);
  }
}

void validate_embeddings(std::span<const EmbeddingRecord> records) {
  std::set<AccountId> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.account_id).second) {
      throw ValidationError("duplicate embedding for " + r.account_id);
    }
    if (r.vector.size() != records.front().vector.size()) {
      throw ValidationError(fmt::format("embedding for {} has dimension {}, expected {}",
                                        r.account_id, r.vector.size(),
                                        records.front().vector.size()));
    }
    if (r.vector.empty()) throw ValidationError("empty embedding for " + r.account_id);
    for (double v : r.vector) {
      if (!std::isfinite(v)) throw ValidationError("non-finite embedding value for " + r.account_id);
    }
  }
}

Matrix to_matrix(std::span<const EmbeddingRecord> records, bool unit_norm) {
  validate_embeddings(records);
  Matrix m;
  m.rows = records.size();
  m.cols = records.empty() ? 0 : records.front().vector.size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : records) {
    const double n = unit_norm ? norm(r.vector) : 1.0;
    for (double v : r.vector) m.data.push_back(n > 0 ? v / n : v);
  }
  return m;
}

Reduction reduce(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  if (k == 0 || k > d) throw ConfigError(fmt::format("reduce_to {} outside [1, {}]", k, d));

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x.at(i, j);
  }
  for (auto& m : mean) m /= static_cast<double>(std::max<std::size_t>(n, 1));
  Matrix xc = x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xc.at(i, j) -= mean[j];
  }

  // Covariance normalised by n.
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = xc.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      const double ra = r[a];
      if (ra == 0) continue;
      for (std::size_t b = a; b < d; ++b) cov[a * d + b] += ra * r[b];
    }
  }
  double trace = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= static_cast<double>(std::max<std::size_t>(n, 1));
      cov[b * d + a] = cov[a * d + b];
    }
    trace += cov[a * d + a];
  }

  Reduction out;
  out.components.rows = k;
  out.components.cols = d;
  out.components.data.assign(k * d, 0.0);
  out.points.rows = n;
  out.points.cols = k;
  out.points.data.assign(n * k, 0.0);
  if (trace <= 0) {
    out.degenerate = true;
    out.variances.assign(k, 0.0);
    return out;
  }

  std::vector<double> deflated = cov;
  std::vector<std::vector<double>> basis;
  auto orthogonalize = [&](std::vector<double>& v) {
    for (const auto& b : basis) {
      double dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += v[j] * b[j];
      for (std::size_t j = 0; j < d; ++j) v[j] -= dot * b[j];
    }
  };
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = (j == 0 ? 1.0 : 0.0) + 1e-2 * static_cast<double>(j + 1 + c) / static_cast<double>(d);
    }
    orthogonalize(v);
    double nv = norm(v);
    for (auto& e : v) e /= nv;
    std::vector<double> w(d);
    bool null_space = false;
    for (int iter = 0; iter < 1000; ++iter) {
      for (std::size_t a = 0; a < d; ++a) {
        double s = 0;
        for (std::size_t b = 0; b < d; ++b) s += deflated[a * d + b] * v[b];
        w[a] = s;
      }
      orthogonalize(w);
      const double nw = norm(w);
      if (nw <= 1e-14 * trace) {
        null_space = true;
        break;
      }
      double delta = 0;
      for (std::size_t j = 0; j < d; ++j) {
        w[j] /= nw;
        delta = std::max(delta, std::abs(w[j] - v[j]));
      }
      v.swap(w);
      if (delta < 1e-9) break;
    }
    if (null_space) {
      // Remaining variance is zero: complete the basis with any orthogonal unit vector.
      for (std::size_t e = 0; e < d; ++e) {
        std::vector<double> u(d, 0.0);
        u[e] = 1.0;
        orthogonalize(u);
        if (const double nu = norm(u); nu > 1e-6) {
          for (auto& x2 : u) x2 /= nu;
          v = u;
          break;
        }
      }
    }
    // Sign: largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[arg]) + 1e-12) arg = j;
    }
    if (v[arg] < 0) {
      for (auto& e : v) e = -e;
    }
    double lambda = 0;
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < d; ++b) s += cov[a * d + b] * v[b];
      lambda += v[a] * s;
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) deflated[a * d + b] -= lambda * v[a] * v[b];
    }
    out.variances.push_back(std::max(lambda, 0.0));
    for (std::size_t j = 0; j < d; ++j) out.components.at(c, j) = v[j];
    basis.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = xc.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0;
      for (std::size_t j = 0; j < d; ++j) s += r[j] * basis[c][j];
      out.points.at(i, c) = s;
    }
  }
  return out;
}

Matrix take_columns(const Matrix& m, std::size_t k) {
  if (k > m.cols) throw ConfigError(fmt::format("cannot take {} of {} columns", k, m.cols));
  Matrix out;
  out.rows = m.rows;
  out.cols = k;
  out.data.reserve(m.rows * k);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < k; ++j) out.data.push_back(m.at(i, j));
  }
  return out;
}

std::size_t ClusterAssignment::cluster_count() const {
  std::set<int> s;
  for (int l : labels) {
    if (l >= 0) s.insert(l);
  }
  return s.size();
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
}

Matrix pairwise_distances(const Matrix& points, unsigned threads) {
  const std::size_t n = points.rows;
  Matrix d;
  d.rows = d.cols = n;
  d.data.assign(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.at(i, j) = dist(points.row(i), points.row(j));
    }
  });
  return d;
}

ClusterAssignment single_linkage_cluster(const Matrix& points,
                                         std::span<const AccountId> account_ids, double cutoff,
                                         std::size_t min_cluster_size) {
  if (account_ids.size() != points.rows) {
    throw ValidationError("account id count does not match point count");
  }
  UnionFind uf(points.rows);
  for (std::size_t i = 0; i < points.rows; ++i) {
    for (std::size_t j = i + 1; j < points.rows; ++j) {
      if (dist(points.row(i), points.row(j)) < cutoff) uf.unite(i, j);
    }
  }
  return label_components(uf, account_ids, min_cluster_size);
}

ClusterAssignment single_linkage_cluster(const Matrix& distances, bool /*precomputed*/,
                                         std::span<const AccountId> account_ids, double cutoff,
                                         std::size_t min_cluster_size) {
  if (account_ids.size() != distances.rows || distances.rows != distances.cols) {
    throw ValidationError("distance matrix shape does not match account ids");
  }
  UnionFind uf(distances.rows);
  for (std::size_t i = 0; i < distances.rows; ++i) {
    for (std::size_t j = i + 1; j < distances.rows; ++j) {
      if (distances.at(i, j) < cutoff) uf.unite(i, j);
    }
  }
  return label_components(uf, account_ids, min_cluster_size);
}

double silhouette(const Matrix& points, std::span<const int> labels) {
  return silhouette_impl(points.rows, labels, [&](std::size_t i, std::size_t j) {
    return dist(points.row(i), points.row(j));
  });
}

double silhouette_precomputed(const Matrix& distances, std::span<const int> labels) {
  return silhouette_impl(distances.rows, labels,
                         [&](std::size_t i, std::size_t j) { return distances.at(i, j); });
}

void validate(const EmbedConfig& c) {
  if (c.reduce_to < 2 || c.reduce_to > 128) {
    throw ConfigError(fmt::format("reduce_to {} outside [2,128]", c.reduce_to));
  }
  if (!(c.linkage_cutoff > 0) || !std::isfinite(c.linkage_cutoff)) {
    throw ConfigError("linkage_cutoff must be positive");
  }
  if (c.min_cluster_size < 10 || c.min_cluster_size > 50) {
    throw ConfigError(fmt::format("min_cluster_size {} outside [10,50]", c.min_cluster_size));
  }
}

SweepResult sweep(std::span<const EmbeddingRecord> embeddings, const SweepGrid& grid,
                  unsigned threads, bool unit_norm) {
  if (grid.size() == 0) throw ConfigError("sweep grid is empty");
  if (embeddings.empty()) throw ConfigError("sweep needs at least one embedding");
  const Matrix x = to_matrix(embeddings, unit_norm);
  std::vector<EmbedConfig> configs;
  for (auto r : grid.reduce_to) {
    for (auto c : grid.linkage_cutoff) {
      for (auto m : grid.min_cluster_size) {
        EmbedConfig cfg{r, c, m};
        validate(cfg);
        if (r > x.cols) {
          throw ConfigError(fmt::format("reduce_to {} exceeds embedding dimension {}", r, x.cols));
        }
        configs.push_back(cfg);
      }
    }
  }
  const std::size_t max_k = *std::max_element(grid.reduce_to.begin(), grid.reduce_to.end());
  const Reduction red = reduce(x, max_k);

  std::vector<std::size_t> ks(grid.reduce_to.begin(), grid.reduce_to.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::map<std::size_t, Matrix> dists;
  for (auto k : ks) dists.emplace(k, pairwise_distances(take_columns(red.points, k), threads));

  std::vector<AccountId> ids;
  for (const auto& e : embeddings) ids.push_back(e.account_id);

  std::vector<SweepRow> rows(configs.size());
  std::vector<ClusterAssignment> assignments(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) {
    const auto& cfg = configs[i];
    const auto& d = dists.at(cfg.reduce_to);
    auto a = single_linkage_cluster(d, true, ids, cfg.linkage_cutoff, cfg.min_cluster_size);
    rows[i].config = cfg;
    rows[i].clusters = a.cluster_count();
    rows[i].noise = a.noise_count();
    try {
      rows[i].score = silhouette_precomputed(d, a.labels);
    } catch (const UndefinedScore&) {
      rows[i].score.reset();
    }
    assignments[i] = std::move(a);
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].score) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = rows[i];
    const auto& b = rows[*best];
    const auto key_a = std::make_tuple(-*a.score, a.noise, a.config.linkage_cutoff,
                                       a.config.reduce_to, a.config.min_cluster_size);
    const auto key_b = std::make_tuple(-*b.score, b.noise, b.config.linkage_cutoff,
                                       b.config.reduce_to, b.config.min_cluster_size);
    if (key_a < key_b) best = i;
  }
  if (!best) throw SweepFailed("no grid point produced at least two clusters");
  SweepResult out;
  out.best = rows[*best].config;
  out.best_score = *rows[*best].score;
  out.assignment = std::move(assignments[*best]);
  out.table = std::move(rows);
  return out;
}

std::vector<EngagementRow> cluster_engagement_table(const ClusterAssignment& assignment,
                                                    std::span<const ScamAccount> accounts,
                                                    std::span<const Interaction> interactions) {
  std::map<AccountId, const ScamAccount*> by_id;
  for (const auto& a : accounts) by_id.emplace(a.account_id, &a);
  std::map<AccountId, std::pair<std::size_t, std::size_t>> texts;  // replies, quotes
  for (const auto& x : interactions) {
    if (x.kind == InteractionKind::Reply) ++texts[x.actor].first;
    if (x.kind == InteractionKind::QuotedTweet) ++texts[x.actor].second;
  }
  std::map<int, EngagementRow> rows;
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    const int label = assignment.labels[i];
    if (label < 0) continue;
    auto it = by_id.find(assignment.account_ids[i]);
    if (it == by_id.end()) continue;
    auto& row = rows[label];
    row.label = label;
    ++row.scammers;
    row.followers += static_cast<std::size_t>(it->second->followers_count);
    if (auto t = texts.find(it->first); t != texts.end()) {
      row.replies += t->second.first;
      row.quoted += t->second.second;
    }
    const auto term = terminal_status(it->second->status_history);
    if (term && term->status == StatusKind::Suspended) ++row.suspended;
  }
  EngagementRow total;
  for (const auto& [_, r] : rows) {
    total.scammers += r.scammers;
    total.followers += r.followers;
    total.replies += r.replies;
    total.quoted += r.quoted;
  }
  auto pct = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  std::vector<EngagementRow> out;
  for (auto& [label, r] : rows) {
    if (auto n = assignment.label_names.find(label); n != assignment.label_names.end()) {
      r.name = n->second;
    } else {
      r.name = fmt::format("Cluster {}", label);
    }
    r.scammer_pct = pct(r.scammers, total.scammers);
    r.followers_pct = pct(r.followers, total.followers);
    r.replies_pct = pct(r.replies, total.replies);
    r.quoted_pct = pct(r.quoted, total.quoted);
    r.suspended_pct = pct(r.suspended, r.scammers);
    out.push_back(std::move(r));
  }
  return out;
}

void to_json(nlohmann::json& j, const EmbedConfig& c) {
  j = {{"reduce_to", c.reduce_to},
       {"linkage_cutoff", c.linkage_cutoff},
       {"min_cluster_size", c.min_cluster_size}};
}

void from_json(const nlohmann::json& j, EmbedConfig& c) {
  j.at("reduce_to").get_to(c.reduce_to);
  j.at("linkage_cutoff").get_to(c.linkage_cutoff);
  j.at("min_cluster_size").get_to(c.min_cluster_size);
}

}  // namespace conman
