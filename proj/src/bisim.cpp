#include "mdpi/bisim.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <unordered_map>

namespace mdpi {

int FilteredLts::intern(const AbstractAction& a) {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == a) return (int)i;
  labels.push_back(a);
  return (int)labels.size() - 1;
}

FilteredLts filtered_lts(const LtsGraph& g, const Filter& f) {
  /* Filter edges first, then prune states unreachable without the dropped
   * edges. */
  struct KeptEdge {
    int src, dst;
    AbstractAction act;
  };
  std::vector<KeptEdge> kept;
  std::vector<std::vector<int>> adj(g.states.size());
  for (const Edge& e : g.edges) {
    std::optional<AbstractAction> img = apply_filter(f, e.act);
    if (!img) continue;
    adj[e.src].push_back((int)kept.size());
    kept.push_back(KeptEdge{e.src, e.dst, std::move(*img)});
  }
  std::vector<int> renum(g.states.size(), -1);
  std::deque<int> q;
  renum[g.initial] = 0;
  q.push_back(g.initial);
  std::vector<int> order{g.initial};
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int ei : adj[s]) {
      int d = kept[ei].dst;
      if (renum[d] >= 0) continue;
      renum[d] = (int)order.size();
      order.push_back(d);
      q.push_back(d);
    }
  }
  FilteredLts out;
  out.n = (int)order.size();
  out.initial = 0;
  out.truncated = g.truncated;
  out.states.reserve(order.size());
  for (int s : order) out.states.push_back(g.states[s]);
  for (const KeptEdge& e : kept) {
    if (renum[e.src] < 0 || renum[e.dst] < 0) continue;
    out.edges.push_back(
        FilteredLts::FEdge{renum[e.src], out.intern(e.act), renum[e.dst]});
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const FilteredLts::FEdge& a, const FilteredLts::FEdge& b) {
              if (a.src != b.src) return a.src < b.src;
              if (a.label != b.label) return a.label < b.label;
              return a.dst < b.dst;
            });
  return out;
}

namespace {

struct Bits {
  std::vector<uint64_t> w;
  explicit Bits(int n = 0) : w((n + 63) / 64, 0) {}
  void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
  bool get(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void or_with(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  template <class F>
  void for_each(F f) const {
    for (size_t i = 0; i < w.size(); ++i) {
      uint64_t x = w[i];
      while (x) {
        int b = std::countr_zero(x);
        f((int)(i * 64 + b));
        x &= x - 1;
      }
    }
  }
  bool any() const {
    for (uint64_t x : w)
      if (x) return true;
    return false;
  }
  friend bool operator==(const Bits&, const Bits&) = default;
};

/* Reflexive-transitive closure over the tau edges, one bitset row per
 * state, built over the SCC condensation so tau cycles stay cheap. */
std::vector<Bits> tau_closure(int n, const std::vector<std::vector<int>>& tau) {
  std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
  std::vector<bool> on(n, false);
  int counter = 0, ncomp = 0;
  /* Iterative Tarjan. */
  struct Frame {
    int v;
    size_t i;
  };
  for (int root = 0; root < n; ++root) {
    if (num[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    on[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.i < tau[f.v].size()) {
        int w = tau[f.v][f.i++];
        if (num[w] < 0) {
          num[w] = low[w] = counter++;
          stk.push_back(w);
          on[w] = true;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], num[w]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == num[v]) {
          while (true) {
            int w = stk.back();
            stk.pop_back();
            on[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
      }
    }
  }
  /* Tarjan emits components in reverse topological order: every tau edge
   * goes from a higher comp id to a lower-or-equal one. */
  std::vector<Bits> cbits(ncomp, Bits(n));
  std::vector<std::vector<int>> csucc(ncomp);
  for (int v = 0; v < n; ++v) {
    cbits[comp[v]].set(v);
    for (int w : tau[v])
      if (comp[w] != comp[v]) csucc[comp[v]].push_back(comp[w]);
  }
  for (int c = 0; c < ncomp; ++c) {
    for (int d : csucc[c]) cbits[c].or_with(cbits[d]);
  }
  std::vector<Bits> out;
  out.reserve(n);
  for (int v = 0; v < n; ++v) out.push_back(cbits[comp[v]]);
  return out;
}

int tau_label(FilteredLts& l) { return l.intern(AbstractAction{}); }

}  // namespace

FilteredLts weak_closure(const FilteredLts& l) {
  FilteredLts out;
  out.n = l.n;
  out.initial = l.initial;
  out.truncated = l.truncated;
  out.states = l.states;
  out.labels = l.labels;
  int tl = tau_label(out);

  std::vector<std::vector<int>> tau(l.n), rtau(l.n);
  for (const auto& e : l.edges) {
    if (e.label == tl) {
      tau[e.src].push_back(e.dst);
      rtau[e.dst].push_back(e.src);
    }
  }
  std::vector<Bits> post = tau_closure(l.n, tau);
  std::vector<Bits> pre = tau_closure(l.n, rtau);

  std::vector<FilteredLts::FEdge> edges;
  /* tau: the reflexive-transitive closure itself. */
  for (int s = 0; s < l.n; ++s)
    post[s].for_each([&](int t) { edges.push_back({s, tl, t}); });
  /* alpha: tau* ; alpha ; tau*. */
  for (const auto& e : l.edges) {
    if (e.label == tl) continue;
    pre[e.src].for_each([&](int u) {
      post[e.dst].for_each(
          [&](int w) { edges.push_back({u, e.label, w}); });
    });
  }
  std::sort(edges.begin(), edges.end(),
            [](const FilteredLts::FEdge& a, const FilteredLts::FEdge& b) {
              if (a.src != b.src) return a.src < b.src;
              if (a.label != b.label) return a.label < b.label;
              return a.dst < b.dst;
            });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const FilteredLts::FEdge& a,
                             const FilteredLts::FEdge& b) {
                            return a.src == b.src && a.label == b.label &&
                                   a.dst == b.dst;
                          }),
              edges.end());
  out.edges = std::move(edges);
  return out;
}

BisimResult check_weak_bisim(const FilteredLts& a, const FilteredLts& b) {
  /* Disjoint union with jointly interned labels. */
  FilteredLts u;
  u.n = a.n + b.n;
  u.truncated = a.truncated || b.truncated;
  std::vector<int> la(a.labels.size()), lb(b.labels.size());
  for (size_t i = 0; i < a.labels.size(); ++i) la[i] = u.intern(a.labels[i]);
  for (size_t i = 0; i < b.labels.size(); ++i) lb[i] = u.intern(b.labels[i]);
  for (const auto& e : a.edges) u.edges.push_back({e.src, la[e.label], e.dst});
  for (const auto& e : b.edges)
    u.edges.push_back({e.src + a.n, lb[e.label], e.dst + a.n});

  FilteredLts w = weak_closure(u);

  /* Partition refinement on the saturated graph: split blocks by their
   * (label, target-block) signatures until stable. */
  std::vector<int> block(w.n, 0);
  std::vector<std::vector<std::pair<int, int>>> adj(w.n);
  for (const auto& e : w.edges) adj[e.src].emplace_back(e.label, e.dst);
  int nblocks = 1;
  while (true) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> groups;
    std::vector<int> next(w.n);
    for (int s = 0; s < w.n; ++s) {
      std::vector<std::pair<int, int>> sig;
      sig.reserve(adj[s].size());
      for (const auto& [lab, dst] : adj[s]) sig.emplace_back(lab, block[dst]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto key = std::make_pair(block[s], std::move(sig));
      auto it = groups.find(key);
      if (it == groups.end())
        it = groups.emplace(std::move(key), (int)groups.size()).first;
      next[s] = it->second;
    }
    int nn = (int)groups.size();
    block.swap(next);
    if (nn == nblocks) break;
    nblocks = nn;
  }

  BisimResult res;
  bool same = block[a.initial] == block[b.initial + a.n];
  if (same) {
    res.verdict = u.truncated ? BisimResult::Verdict::inconclusive
                              : BisimResult::Verdict::bisimilar;
    if (u.truncated)
      res.note = "equivalent up to the explored bound; a bound was hit";
    /* Same-block cross pairs as the witness relation (capped). */
    const size_t cap = 200000;
    for (int i = 0; i < a.n && res.witness.size() < cap; ++i)
      for (int j = 0; j < b.n && res.witness.size() < cap; ++j)
        if (block[i] == block[j + a.n]) res.witness.emplace_back(i, j);
    return res;
  }

  res.verdict = BisimResult::Verdict::distinguished;

  /* Look for a short distinguishing weak-action sequence by determinising
   * both sides (a sequence one side can complete and the other cannot). */
  std::vector<std::vector<std::vector<int>>> step(
      w.labels.size(), std::vector<std::vector<int>>(w.n));
  for (const auto& e : w.edges) step[e.label][e.src].push_back(e.dst);
  int tl = 0;
  for (size_t i = 0; i < w.labels.size(); ++i)
    if (w.labels[i] == AbstractAction{}) tl = (int)i;

  struct Node {
    Bits sa, sb;
    int parent;
    int label;
  };
  auto keyof = [](const Bits& x, const Bits& y) {
    std::string k;
    k.reserve((x.w.size() + y.w.size()) * 8);
    auto app = [&](const std::vector<uint64_t>& v) {
      for (uint64_t q : v) k.append(reinterpret_cast<const char*>(&q), 8);
    };
    app(x.w);
    app(y.w);
    return k;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> seen;
  Bits sa(w.n), sb(w.n);
  sa.set(a.initial);
  sb.set(b.initial + a.n);
  nodes.push_back(Node{sa, sb, -1, -1});
  seen.emplace(keyof(sa, sb), 0);
  const size_t node_cap = 20000;
  int found = -1;
  bool found_on_a = false;
  for (size_t qi = 0; qi < nodes.size() && qi < node_cap && found < 0; ++qi) {
    for (int lab = 0; lab < (int)w.labels.size() && found < 0; ++lab) {
      if (lab == tl) continue;  // weak tau never distinguishes
      Bits na(w.n), nb(w.n);
      nodes[qi].sa.for_each([&](int s) {
        for (int d : step[lab][s]) na.set(d);
      });
      nodes[qi].sb.for_each([&](int s) {
        for (int d : step[lab][s]) nb.set(d);
      });
      bool ea = !na.any(), eb = !nb.any();
      if (ea && eb) continue;
      Node nd{std::move(na), std::move(nb), (int)qi, lab};
      if (ea != eb) {
        nodes.push_back(std::move(nd));
        found = (int)nodes.size() - 1;
        found_on_a = eb;  // b got stuck, so the sequence plays on a
        break;
      }
      std::string k = keyof(nd.sa, nd.sb);
      if (seen.count(k)) continue;
      seen.emplace(std::move(k), (int)nodes.size());
      nodes.push_back(std::move(nd));
    }
  }
  if (found >= 0) {
    std::vector<int> labs;
    for (int cur = found; cur > 0; cur = nodes[cur].parent)
      labs.push_back(nodes[cur].label);
    std::reverse(labs.begin(), labs.end());
    for (int lab : labs) res.sequence.push_back(w.labels[lab]);
    res.sequence_on_a = found_on_a;
  } else {
    res.note =
        "initial states split by refinement; no short distinguishing trace "
        "found (the difference is branching-structural)";
  }
  return res;
}

}  // namespace mdpi
