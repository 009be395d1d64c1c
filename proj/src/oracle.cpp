#include "cdr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <omp.h>

namespace cdr::oracle {

std::int64_t default_horizon(const Instance& instance) {
  const auto s = stats(instance);
  return s.congestion + s.dilation + s.congestion * s.dilation;
}

namespace {

// Time-expanded search: state = how many edges each packet has crossed after
// slot tau. Failed states are memoised as the earliest failing tau per
// progress vector, since being somewhere later is never better.
class Search {
 public:
  Search(const IndexedPaths& paths, bool dominance) : paths_(paths), dominance_(dominance) {
    need_.assign(paths.edge_count(), {});
    for (std::size_t i = 0; i < paths.paths.size(); ++i) {
      for (std::size_t k = 0; k < paths.paths[i].size(); ++k) {
        need_[paths.paths[i][k]].push_back({static_cast<int>(i), static_cast<int>(k)});
      }
    }
  }

  bool feasible(std::int64_t horizon) {
    horizon_ = horizon;
    failed_.clear();
    std::vector<int> progress(paths_.paths.size(), 0);
    return dfs(progress, 0);
  }

  std::int64_t trivial_bound() {
    std::vector<int> progress(paths_.paths.size(), 0);
    return lower_bound(progress, 0);
  }

 private:
  std::int64_t lower_bound(const std::vector<int>& progress, std::int64_t tau) const {
    std::int64_t lb = tau;
    for (std::size_t i = 0; i < progress.size(); ++i) {
      lb = std::max<std::int64_t>(lb, tau + static_cast<std::int64_t>(paths_.paths[i].size()) - progress[i]);
    }
    // Every packet still needing edge e crosses it in a distinct slot, and the
    // last of them still has its own tail to travel.
    for (const auto& users : need_) {
      std::int64_t count = 0;
      std::int64_t tail = -1;
      for (auto [i, k] : users) {
        if (progress[i] > k) continue;
        ++count;
        const auto after = static_cast<std::int64_t>(paths_.paths[i].size()) - k - 1;
        tail = tail < 0 ? after : std::min(tail, after);
      }
      if (count > 0) lb = std::max(lb, tau + count + tail);
    }
    return lb;
  }

  std::string key(const std::vector<int>& progress) const {
    std::string k;
    k.reserve(progress.size() * 2);
    for (auto p : progress) {
      k.push_back(static_cast<char>(p & 0xff));
      k.push_back(static_cast<char>(p >> 8));
    }
    return k;
  }

  bool dfs(std::vector<int>& progress, std::int64_t tau) {
    bool done = true;
    for (std::size_t i = 0; i < progress.size(); ++i) {
      if (progress[i] < static_cast<int>(paths_.paths[i].size())) done = false;
    }
    if (done) return true;
    if (lower_bound(progress, tau) > horizon_) return false;
    const auto k = key(progress);
    if (auto it = failed_.find(k); it != failed_.end() && it->second <= tau) return false;

    // Group active packets by the edge they want next.
    std::unordered_map<std::int32_t, std::vector<int>> wanting;
    for (std::size_t i = 0; i < progress.size(); ++i) {
      if (progress[i] < static_cast<int>(paths_.paths[i].size())) {
        wanting[paths_.paths[i][progress[i]]].push_back(static_cast<int>(i));
      }
    }
    std::vector<std::vector<int>> groups;
    groups.reserve(wanting.size());
    for (auto& [e, g] : wanting) groups.push_back(std::move(g));
    std::sort(groups.begin(), groups.end());

    // Each group picks one member index to move; index == size means nobody
    // moves (only explored without dominance).
    const auto extra = dominance_ ? 0 : 1;
    std::vector<std::size_t> choice(groups.size(), 0);
    const bool ok = [&] {
      while (true) {
        std::vector<int> next(progress);
        for (std::size_t g = 0; g < groups.size(); ++g) {
          if (choice[g] < groups[g].size()) ++next[groups[g][choice[g]]];
        }
        if (dfs(next, tau + 1)) return true;
        std::size_t g = 0;
        for (; g < groups.size(); ++g) {
          if (++choice[g] < groups[g].size() + extra) break;
          choice[g] = 0;
        }
        if (g == groups.size()) return false;
      }
    }();
    if (!ok) {
      auto [it, fresh] = failed_.emplace(k, tau);
      if (!fresh) it->second = std::min(it->second, tau);
    }
    return ok;
  }

  const IndexedPaths& paths_;
  bool dominance_;
  std::int64_t horizon_ = 0;
  std::vector<std::vector<std::pair<int, int>>> need_;
  std::unordered_map<std::string, std::int64_t> failed_;
};

}  // namespace

std::optional<std::int64_t> optimal_makespan(const Instance& instance, std::optional<std::int64_t> horizon,
                                             const SearchOptions& options) {
  const auto h = horizon.value_or(default_horizon(instance));
  const auto paths = index_paths(instance);
  double states = static_cast<double>(h);
  for (const auto& p : paths.paths) states *= static_cast<double>(p.size() + 2);
  if (states > options.state_cap) throw TooLarge();
  if (paths.paths.empty()) return 0;

  Search search(paths, options.dominance);
  for (auto t = search.trivial_bound(); t <= h; ++t) {
    if (search.feasible(t)) return t;
  }
  return std::nullopt;
}

namespace {

struct Var {
  int level;
  std::int64_t block;
  std::int64_t lo, hi;
};

// Block layout re-derived from the ladder alone.
struct Layout {
  std::int64_t n = 0;
  int depth = 0;
  bool shifted = false;
  std::vector<std::int64_t> len, budget;
  // shifted only: per level, per block, the assigned positions
  std::vector<std::vector<std::vector<std::int64_t>>> assigned;

  std::int64_t blocks(int l) const {
    if (l == 0) return 1;
    return shifted ? n / len[l] + 1 : n / len[l];
  }
};

int level_of(std::int64_t pos, int depth) {
  if (pos == 0) return -1;
  auto a = pos < 0 ? -pos : pos;
  int q = 0;
  while (a % 2 == 0) {
    a /= 2;
    ++q;
  }
  return q < depth ? depth - q : -1;
}

Layout make_layout(const LevelLadder& ladder, bool shifted) {
  Layout lay;
  lay.n = ladder.path_length();
  lay.depth = ladder.depth();
  lay.shifted = shifted;
  for (int l = 0; l <= lay.depth; ++l) {
    lay.len.push_back(ladder.length(l));
    lay.budget.push_back(ladder.budget(l));
  }
  if (shifted) {
    lay.assigned.resize(lay.depth + 1);
    for (int l = 1; l <= lay.depth; ++l) {
      const auto d = lay.len[l];
      for (std::int64_t b = 0; b < lay.blocks(l); ++b) {
        const auto first = 1 - d / 2 + b * d;
        std::vector<std::int64_t> pos;
        for (auto p = first; p < first + d; ++p) {
          if (level_of(p, lay.depth) == l) pos.push_back(p);
        }
        lay.assigned[l].push_back(std::move(pos));
      }
    }
  }
  return lay;
}

// Adds the waits implied by one delay value to per-node wait counts (nodes
// 0..n). A wait taken "before" position p happens at node p - 1, clamped to
// the path.
void apply(const Layout& lay, int l, std::int64_t b, std::int64_t x, std::vector<std::int64_t>& node) {
  const auto n = lay.n;
  const auto w = lay.budget[l];
  if (!lay.shifted || l == 0) {
    const auto first = b * lay.len[l] + 1;
    const auto last = (b + 1) * lay.len[l];
    node[first - 1] += x;
    node[last] += w - x;
    return;
  }
  const auto& pos = lay.assigned[l][b];
  const auto m = static_cast<std::int64_t>(pos.size());
  auto at = [&](std::int64_t p) { node[std::min(std::max<std::int64_t>(p - 1, 0), n)] += 1; };
  for (std::int64_t k = 0; k < x; ++k) at(pos[k]);
  for (std::int64_t k = m - (w - x); k < m; ++k) at(pos[k]);
}

}  // namespace

double delay_space_size(const LevelLadder& ladder, bool shifted) {
  const auto lay = make_layout(ladder, shifted);
  double size = 1;
  for (int l = 0; l <= lay.depth; ++l) size *= std::pow(static_cast<double>(lay.budget[l]), lay.blocks(l));
  return size;
}

std::vector<std::map<std::int64_t, double>> exhaustive_expectation(const Instance& padded,
                                                                   const LevelLadder& ladder,
                                                                   const ExpectationOptions& options,
                                                                   const Pinned& pinned) {
  const auto paths = index_paths(padded);
  const auto lay = make_layout(ladder, options.shifted);
  const auto n = lay.n;
  for (const auto& p : paths.paths) {
    if (static_cast<std::int64_t>(p.size()) != n) throw std::invalid_argument("instance is not padded to the ladder");
  }

  const auto packets = static_cast<std::int64_t>(paths.paths.size());
  std::vector<std::vector<Var>> vars(packets);
  for (std::int64_t i = 0; i < packets; ++i) {
    double space = 1;
    for (int l = 0; l <= lay.depth; ++l) {
      for (std::int64_t b = 0; b < lay.blocks(l); ++b) {
        std::int64_t v = 0;
        if (!pinned.empty()) v = pinned.at(i).at(l).at(b);
        if (v != 0) {
          vars[i].push_back({l, b, v, v});
        } else {
          vars[i].push_back({l, b, 1, lay.budget[l]});
          space *= static_cast<double>(lay.budget[l]);
        }
      }
    }
    if (space > static_cast<double>(options.cap)) throw TooLarge();
  }

  // Every packet waits at most the sum of all budgets, which bounds the slots.
  std::int64_t span = n + 1;
  for (int l = 0; l <= lay.depth; ++l) span += lay.blocks(l) * lay.budget[l];

  // counts[i][k * span + t]: outcomes in which packet i crosses position k at slot t.
  std::vector<std::vector<std::int64_t>> counts(packets);
  std::vector<std::int64_t> totals(packets, 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < packets; ++i) {
    const auto& vs = vars[i];
    std::vector<std::int64_t> x(vs.size());
    for (std::size_t k = 0; k < vs.size(); ++k) x[k] = vs[k].lo;
    auto& table = counts[i];
    table.assign(static_cast<std::size_t>(n * span), 0);
    std::vector<std::int64_t> node(n + 1);
    while (true) {
      std::fill(node.begin(), node.end(), 0);
      for (std::size_t k = 0; k < vs.size(); ++k) apply(lay, vs[k].level, vs[k].block, x[k], node);
      // Walk: the packet sits out node[k] slots at node k, then crosses.
      std::int64_t t = 0;
      for (std::int64_t k = 0; k < n; ++k) {
        t += node[k] + 1;
        ++table[k * span + t];
      }
      ++totals[i];
      std::size_t k = 0;
      for (; k < vs.size(); ++k) {
        if (++x[k] <= vs[k].hi) break;
        x[k] = vs[k].lo;
      }
      if (k == vs.size()) break;
    }
  }

  std::vector<std::map<std::int64_t, double>> out(paths.edge_count());
  for (std::int64_t i = 0; i < packets; ++i) {
    const auto total = static_cast<double>(totals[i]);
    for (std::int64_t k = 0; k < n; ++k) {
      auto& row = out[paths.paths[i][k]];
      for (std::int64_t t = 0; t < span; ++t) {
        const auto c = counts[i][k * span + t];
        if (c != 0) row[t] += static_cast<double>(c) / total;
      }
    }
  }
  return out;
}

}  // namespace cdr::oracle
