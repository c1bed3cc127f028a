#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "baselines.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "imatgi.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace gsr::recsys {

// ---------------------------------------------------------------------------
// Ratings tables

enum class RatingsFormat {
  /// user<TAB>item<TAB>rating[<TAB>timestamp], MovieLens u.data layout
  MovielensTab,
  /// "user";"item";"rating" with optional quotes and header, BX-Books layout
  CsvSemicolon,
  /// user,item,rating[,...] with optional header
  CsvComma,
};

inline RatingsFormat parse_format(std::string_view s) {
  if (s == "movielens-tab") return RatingsFormat::MovielensTab;
  if (s == "csv-semicolon") return RatingsFormat::CsvSemicolon;
  if (s == "csv-comma") return RatingsFormat::CsvComma;
  throw InputError("unknown ratings format '" + std::string(s) + "'");
}

struct RatingScale {
  double min = 1.0;
  double max = 5.0;
  double width() const noexcept { return max - min; }
  bool contains(double r) const noexcept { return r >= min && r <= max; }
  double clamp(double r) const noexcept { return std::clamp(r, min, max); }
};

struct Rating {
  std::size_t user = 0;
  std::size_t item = 0;
  double value = 0.0;
};

/// (user, item, rating) triples over dense user and item indices. The
/// original identifiers are kept in user_ids / item_ids.
struct RatingsTable {
  std::vector<Rating> ratings;
  RatingScale scale;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  std::size_t size() const noexcept { return ratings.size(); }
  std::size_t num_users() const noexcept { return user_ids.size(); }
  std::size_t num_items() const noexcept { return item_ids.size(); }

  /// Same id spaces, selected rows.
  RatingsTable select(std::span<const std::size_t> rows) const {
    RatingsTable out{{}, scale, user_ids, item_ids};
    out.ratings.reserve(rows.size());
    for (auto r : rows) out.ratings.push_back(ratings[r]);
    return out;
  }
};

struct IngestReport {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::size_t malformed = 0;
  std::size_t out_of_scale = 0;
  std::size_t duplicates = 0;
  std::size_t implicit_dropped = 0;
  bool header_skipped = false;
  std::vector<std::string> warnings;

  std::size_t rejected() const noexcept { return malformed + out_of_scale; }
};

struct IngestResult {
  RatingsTable table;
  IngestReport report;
};

struct IngestOptions {
  /// Drop rows whose rating is exactly 0 (implicit feedback in BX-Books).
  /// Unset: on for csv-semicolon, off otherwise.
  std::optional<bool> drop_zero;
  /// Hard error above this fraction of rejected rows.
  double max_rejected_fraction = 0.10;
};

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses ratings from a stream. Malformed and out-of-scale rows are counted
/// and skipped; duplicate (user, item) pairs keep the last value. Throws
/// DataError when more than max_rejected_fraction of the rows are rejected.
inline IngestResult ingest(std::istream& is, RatingsFormat format, RatingScale scale, const IngestOptions& options = {}) {
  if (!(scale.max > scale.min)) throw InputError("ingest: rating scale must have max > min");
  const bool drop_zero = options.drop_zero.value_or(format == RatingsFormat::CsvSemicolon);
  const char delim = format == RatingsFormat::MovielensTab ? '\t' : format == RatingsFormat::CsvSemicolon ? ';' : ',';

  IngestResult res;
  res.table.scale = scale;
  auto& rep = res.report;
  std::unordered_map<std::string, std::size_t> users, items;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  auto intern = [](std::unordered_map<std::string, std::size_t>& m, std::vector<std::string>& ids, std::string key) {
    auto [it, inserted] = m.try_emplace(key, ids.size());
    if (inserted) ids.push_back(std::move(key));
    return it->second;
  };

  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    ++rep.lines;
    auto fields = detail::split_fields(line, delim);
    if (fields.size() < 3) {
      ++rep.malformed;
      first = false;
      continue;
    }
    const std::string user(detail::trim(fields[0]));
    const std::string item(detail::trim(fields[1]));
    const auto value = detail::parse_number(fields[2]);
    if (!value) {
      if (first && format != RatingsFormat::MovielensTab) {
        rep.header_skipped = true;
        --rep.lines;
      } else {
        ++rep.malformed;
      }
      first = false;
      continue;
    }
    first = false;
    if (user.empty() || item.empty()) {
      ++rep.malformed;
      continue;
    }
    if (drop_zero && *value == 0.0) {
      ++rep.implicit_dropped;
      continue;
    }
    if (!scale.contains(*value)) {
      ++rep.out_of_scale;
      continue;
    }
    const std::size_t u = intern(users, res.table.user_ids, user);
    const std::size_t i = intern(items, res.table.item_ids, item);
    auto [it, inserted] = seen.try_emplace({u, i}, res.table.ratings.size());
    if (inserted) {
      res.table.ratings.push_back({u, i, *value});
    } else {
      ++rep.duplicates;
      res.table.ratings[it->second].value = *value;
    }
    ++rep.parsed;
  }

  if (rep.lines == 0) rep.warnings.push_back("input contains no rating rows");
  if (rep.lines > 0) {
    const double frac = static_cast<double>(rep.rejected()) / static_cast<double>(rep.lines);
    if (frac > options.max_rejected_fraction)
      throw DataError("ingest: " + std::to_string(rep.rejected()) + " of " + std::to_string(rep.lines) +
                      " rows rejected (malformed or out of scale)");
    if (rep.rejected() > 0)
      rep.warnings.push_back(std::to_string(rep.rejected()) + " rows rejected (malformed or out of scale)");
  }
  if (rep.duplicates > 0) rep.warnings.push_back(std::to_string(rep.duplicates) + " duplicate pairs overwritten");
  return res;
}

inline IngestResult ingest(const std::string& path, RatingsFormat format, RatingScale scale,
                           const IngestOptions& options = {}) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open ratings file " + path);
  return ingest(is, format, scale, options);
}

/// Uniform sample of `count` triples without replacement (all of them when
/// the table is smaller), kept in their original order.
inline RatingsTable subsample_triples(const RatingsTable& t, std::uint64_t seed, std::size_t count = 100000) {
  std::vector<std::size_t> rows(t.size());
  std::iota(rows.begin(), rows.end(), 0);
  if (rows.size() > count) {
    Rng rng(derive_seed(seed, {0x5ab}));
    for (std::size_t i = 0; i < count; ++i) std::swap(rows[i], rows[i + rng.below(rows.size() - i)]);
    rows.resize(count);
    std::sort(rows.begin(), rows.end());
  }
  return t.select(rows);
}

inline RatingsTable subsample_100k(const RatingsTable& t, std::uint64_t seed) { return subsample_triples(t, seed, 100000); }

// ---------------------------------------------------------------------------
// Cross-validation

struct CvSplit {
  std::vector<std::uint8_t> fold;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  std::vector<std::size_t> rows_in(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] == f) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> rows_not_in(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) out.push_back(i);
    return out;
  }
};

/// Random partition of n rows into `folds` groups whose sizes differ by at most one.
inline CvSplit make_cv_split(std::size_t n, std::uint64_t seed, std::size_t folds = 5) {
  if (folds < 2 || folds > 255) throw InputError("make_cv_split: folds must lie in [2, 255]");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, {0xcf}));
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  CvSplit s{std::vector<std::uint8_t>(n), folds, seed};
  for (std::size_t j = 0; j < n; ++j) s.fold[perm[j]] = static_cast<std::uint8_t>(j % folds);
  return s;
}

// ---------------------------------------------------------------------------
// User graph and per-item signals

/// What is subtracted from each rating before it becomes a signal value
/// (and added back to predictions).
enum class Centering {
  None,
  /// user training mean
  User,
  /// user training mean plus a damped item offset
  UserItem,
};

struct UserGraphParams {
  /// Neighbours kept per user before symmetrization.
  std::size_t top_m = 10;
  /// Pairs with fewer co-rated items get no edge.
  std::size_t min_common = 2;
  Centering centering = Centering::UserItem;
  /// Item offset = sum of (rating - user mean) / (count + damping).
  double item_damping = 5.0;
};

/// Training-side view used by every interpolator: the user-user similarity
/// graph and one graph signal per item.
struct ItemGraphData {
  Graph graph{1, {}};
  std::vector<double> user_mean;
  std::vector<std::size_t> user_count;
  std::vector<std::size_t> item_count;
  std::vector<double> item_bias;
  double global_mean = 0.0;
  Centering centering = Centering::User;
  /// Per item: (user, signal value) for each training rating.
  std::vector<std::vector<std::pair<std::size_t, double>>> item_entries;

  std::size_t num_users() const noexcept { return graph.size(); }

  GraphSignal signal(std::size_t item) const {
    GraphSignal f = GraphSignal::zeros(num_users());
    for (auto [u, v] : item_entries[item]) f[u] = v;
    return f;
  }
  SamplingMask mask(std::size_t item) const {
    SamplingMask m = SamplingMask::none(num_users());
    for (auto [u, v] : item_entries[item]) m.kept[u] = true;
    return m;
  }
  /// Signal value of a rating and its inverse.
  double baseline(std::size_t user, std::size_t item) const {
    switch (centering) {
      case Centering::None: return 0.0;
      case Centering::User: return user_mean[user];
      case Centering::UserItem: return user_mean[user] + item_bias[item];
    }
    return 0.0;
  }
  double to_rating(std::size_t user, std::size_t item, double signal_value) const {
    return signal_value + baseline(user, item);
  }
};

/// Mean-centered cosine similarity of every user pair over their co-rated
/// items (zero below min_common co-ratings or when a side has no spread).
inline Matrix user_similarity(const RatingsTable& train, const std::vector<double>& user_mean, std::size_t min_common) {
  const std::size_t nu = train.num_users(), ni = train.num_items();
  Matrix c = Matrix::Zero(nu, ni), m = Matrix::Zero(nu, ni);
  for (const auto& r : train.ratings) {
    c(r.user, r.item) = r.value - user_mean[r.user];
    m(r.user, r.item) = 1.0;
  }
  const Matrix c2 = c.cwiseProduct(c);
  const Matrix num = c * c.transpose();
  const Matrix energy = c2 * m.transpose();  // energy(u, v) = sum over items co-rated with v of c_u^2
  const Matrix common = m * m.transpose();
  Matrix sim = Matrix::Zero(nu, nu);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nu; ++v) {
      if (u == v || common(u, v) + 0.5 < static_cast<double>(min_common)) continue;
      const double den = std::sqrt(energy(u, v) * energy(v, u));
      if (den > 0) sim(u, v) = num(u, v) / den;
    }
  }
  // Symmetrize exactly; the two GEMM halves can differ in the last bit.
  return (0.5 * (sim + sim.transpose())).eval();
}

inline ItemGraphData build_item_graph_and_signals(const RatingsTable& train, const UserGraphParams& params = {}) {
  if (params.top_m < 1) throw InputError("UserGraphParams: top_m must be >= 1");
  const std::size_t nu = std::max<std::size_t>(train.num_users(), 1), ni = train.num_items();
  ItemGraphData d;
  d.centering = params.centering;
  d.user_mean.assign(nu, 0.0);
  d.user_count.assign(nu, 0);
  d.item_count.assign(ni, 0);
  double total = 0.0;
  for (const auto& r : train.ratings) {
    d.user_mean[r.user] += r.value;
    ++d.user_count[r.user];
    ++d.item_count[r.item];
    total += r.value;
  }
  d.global_mean = train.size() ? total / static_cast<double>(train.size()) : 0.5 * (train.scale.min + train.scale.max);
  for (std::size_t u = 0; u < nu; ++u) d.user_mean[u] = d.user_count[u] ? d.user_mean[u] / d.user_count[u] : d.global_mean;

  std::vector<Edge> edges;
  if (train.num_users() > 1) {
    const Matrix sim = user_similarity(train, d.user_mean, params.min_common);
    std::vector<std::vector<bool>> linked(nu, std::vector<bool>(nu, false));
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t u = 0; u < nu; ++u) {
      cand.clear();
      for (std::size_t v = 0; v < nu; ++v)
        if (v != u && sim(u, v) > 0) cand.emplace_back(-sim(u, v), v);
      const std::size_t take = std::min(params.top_m, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
      for (std::size_t j = 0; j < take; ++j) {
        const std::size_t v = cand[j].second;
        linked[std::min(u, v)][std::max(u, v)] = true;
      }
    }
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = u + 1; v < nu; ++v)
        if (linked[u][v]) edges.push_back({u, v, sim(u, v)});
  }
  d.graph = Graph(nu, std::move(edges));

  d.item_bias.assign(ni, 0.0);
  if (params.centering == Centering::UserItem) {
    for (const auto& r : train.ratings) d.item_bias[r.item] += r.value - d.user_mean[r.user];
    for (std::size_t i = 0; i < ni; ++i) d.item_bias[i] /= static_cast<double>(d.item_count[i]) + params.item_damping;
  }
  d.item_entries.assign(ni, {});
  for (const auto& r : train.ratings) d.item_entries[r.item].emplace_back(r.user, r.value - d.baseline(r.user, r.item));
  for (auto& e : d.item_entries) std::sort(e.begin(), e.end());
  return d;
}

// ---------------------------------------------------------------------------
// Interpolators and evaluation

struct Query {
  std::size_t user = 0;
  std::size_t item = 0;
};

/// Training state for one fold. The GFT basis and distance matrix are built
/// on first use.
class FoldContext {
public:
  FoldContext(const RatingsTable& train, ItemGraphData data) : train_(train), data_(std::move(data)) {}

  const RatingsTable& train() const noexcept { return train_; }
  const ItemGraphData& data() const noexcept { return data_; }
  const GftBasis& basis() const {
    if (!basis_) basis_ = std::make_unique<GftBasis>(gft_basis(data_.graph));
    return *basis_;
  }
  const Matrix& distances() const {
    if (!distances_) distances_ = std::make_unique<Matrix>(graph_distances(data_.graph));
    return *distances_;
  }

private:
  const RatingsTable& train_;
  ItemGraphData data_;
  mutable std::unique_ptr<GftBasis> basis_;
  mutable std::unique_ptr<Matrix> distances_;
};

/// Predicts ratings (rating units, unclamped) for queries whose user and
/// item both appear in training.
using Interpolator = std::function<std::vector<double>(const FoldContext&, std::span<const Query>)>;

/// Reconstructs all item signals touched by the queries in one batch call
/// and reads predictions off the reconstructed signals.
inline std::vector<double> predict_by_item(
    const FoldContext& ctx, std::span<const Query> queries,
    const std::function<Matrix(const Matrix&, const std::vector<SamplingMask>&)>& reconstruct) {
  const auto& d = ctx.data();
  std::vector<std::size_t> items;
  for (const auto& q : queries) items.push_back(q.item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  std::unordered_map<std::size_t, std::size_t> column;
  Matrix fs = Matrix::Zero(d.num_users(), items.size());
  std::vector<SamplingMask> masks;
  masks.reserve(items.size());
  for (std::size_t c = 0; c < items.size(); ++c) {
    column[items[c]] = c;
    fs.col(c) = d.signal(items[c]).values;
    masks.push_back(d.mask(items[c]));
  }
  const Matrix rec = items.empty() ? Matrix() : reconstruct(fs, masks);
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(d.to_rating(q.user, q.item, rec(q.user, column.at(q.item))));
  return out;
}

/// Short damped run used by the rating benchmark.
inline ImatgiConfig default_imatgi_config() {
  ImatgiConfig c;
  c.lambda = 0.5;
  c.max_iters = 5;
  return c;
}

inline Interpolator make_imatgi_interpolator(ImatgiConfig config = default_imatgi_config()) {
  return [config](const FoldContext& ctx, std::span<const Query> q) {
    return predict_by_item(ctx, q, [&](const Matrix& fs, const std::vector<SamplingMask>& masks) {
      return imatgi_reconstruct_batch(fs, masks, ctx.basis(), config);
    });
  };
}

/// cutoff_fraction picks cutoff = ceil(fraction * n) when config.cutoff is 0.
inline Interpolator make_ilsr_interpolator(IlsrConfig config, double cutoff_fraction = 0.1) {
  return [config, cutoff_fraction](const FoldContext& ctx, std::span<const Query> q) {
    IlsrConfig c = config;
    const std::size_t n = ctx.data().num_users();
    if (c.cutoff == 0)
      c.cutoff = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(cutoff_fraction * static_cast<double>(n))), 1, n);
    return predict_by_item(ctx, q, [&](const Matrix& fs, const std::vector<SamplingMask>& masks) {
      return ilsr_reconstruct_batch(fs, masks, ctx.basis(), c);
    });
  };
}

inline Interpolator make_knn_interpolator(KnnConfig config) {
  return [config](const FoldContext& ctx, std::span<const Query> q) {
    const auto& d = ctx.data();
    const Matrix& dist = ctx.distances();
    std::vector<double> out;
    out.reserve(q.size());
    // One pass per item keeps the per-query work to its kept-vertex list.
    std::vector<std::size_t> order(q.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a].item < q[b].item; });
    out.assign(q.size(), 0.0);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t idx : order) {
      const auto& entries = d.item_entries[q[idx].item];
      const std::size_t v = q[idx].user;
      cand.clear();
      double sum = 0.0;
      double value = 0.0;
      bool direct = false;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        sum += entries[j].second;
        if (entries[j].first == v) {
          value = entries[j].second;
          direct = true;
        }
        const double dv = dist(v, entries[j].first);
        if (std::isfinite(dv)) cand.emplace_back(dv, j);
      }
      if (!direct) {
        if (cand.empty()) {
          value = entries.empty() ? 0.0 : sum / static_cast<double>(entries.size());
        } else {
          const std::size_t take = std::min(config.k, cand.size());
          std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(),
                            [&](const auto& a, const auto& b) {
                              return a.first != b.first ? a.first < b.first : entries[a.second].first < entries[b.second].first;
                            });
          double num = 0.0, den = 0.0;
          for (std::size_t j = 0; j < take; ++j) {
            const double w = knn_weight(cand[j].first, config.weighting);
            num += w * entries[cand[j].second].second;
            den += w;
          }
          value = num / den;
        }
      }
      out[idx] = d.to_rating(v, q[idx].item, value);
    }
    return out;
  };
}

struct RmseReport {
  std::string dataset;
  std::string method;
  std::vector<double> fold_nrmse;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t predictions = 0;
  std::size_t cold_start = 0;
};

struct EvaluateParams {
  UserGraphParams graph;
};

/// K-fold evaluation: train on all other folds, predict each test rating,
/// clamp to the scale, report RMSE / (max - min) per fold. Test pairs whose
/// user or item is absent from training get the training global mean.
inline RmseReport evaluate(const Interpolator& method, std::string method_name, std::string dataset,
                           const RatingsTable& table, const CvSplit& split, const EvaluateParams& params = {}) {
  gsr::detail::require_same_size(table.size(), split.fold.size(), "evaluate");
  RmseReport rep{std::move(dataset), std::move(method_name), {}, 0.0, 0.0, 0, 0};
  for (std::size_t f = 0; f < split.folds; ++f) {
    const auto train_rows = split.rows_not_in(f);
    const auto test_rows = split.rows_in(f);
    const RatingsTable train = table.select(train_rows);
    FoldContext ctx(train, build_item_graph_and_signals(train, params.graph));
    const auto& d = ctx.data();

    std::vector<Query> queries;
    std::vector<std::size_t> query_row;
    std::vector<double> prediction(test_rows.size(), d.global_mean);
    for (std::size_t j = 0; j < test_rows.size(); ++j) {
      const auto& r = table.ratings[test_rows[j]];
      const bool known = r.user < d.user_count.size() && d.user_count[r.user] > 0 && r.item < d.item_count.size() &&
                         d.item_count[r.item] > 0;
      if (known) {
        queries.push_back({r.user, r.item});
        query_row.push_back(j);
      } else {
        ++rep.cold_start;
      }
    }
    const auto pred = method(ctx, queries);
    gsr::detail::require_same_size(queries.size(), pred.size(), "evaluate: interpolator output");
    for (std::size_t j = 0; j < queries.size(); ++j) prediction[query_row[j]] = pred[j];

    double sq = 0.0;
    for (std::size_t j = 0; j < test_rows.size(); ++j) {
      const double e = table.scale.clamp(prediction[j]) - table.ratings[test_rows[j]].value;
      sq += e * e;
    }
    rep.predictions += test_rows.size();
    const double rmse = test_rows.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(test_rows.size()));
    rep.fold_nrmse.push_back(rmse / table.scale.width());
  }
  const double k = static_cast<double>(rep.fold_nrmse.size());
  rep.mean = std::accumulate(rep.fold_nrmse.begin(), rep.fold_nrmse.end(), 0.0) / k;
  double var = 0.0;
  for (double x : rep.fold_nrmse) var += (x - rep.mean) * (x - rep.mean);
  rep.stddev = k > 1 ? std::sqrt(var / (k - 1)) : 0.0;
  return rep;
}

/// "dataset,method,fold,nrmse" rows, then a summary row with fold = mean.
inline void write_rmse_csv(std::ostream& os, std::span<const RmseReport> reports) {
  os << "#schema=v1\n";
  os << "dataset,method,fold,nrmse\n";
  os << std::setprecision(10);
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.fold_nrmse.size(); ++f)
      os << r.dataset << ',' << r.method << ',' << f << ',' << r.fold_nrmse[f] << '\n';
    os << r.dataset << ',' << r.method << ",mean," << r.mean << '\n';
  }
}

}  // namespace gsr::recsys
