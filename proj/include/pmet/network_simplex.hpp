#ifndef PMET_NETWORK_SIMPLEX_HPP
#define PMET_NETWORK_SIMPLEX_HPP

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pmet::detail {

/**
 * Primal network simplex for uncapacitated min-cost flow on a small graph.
 *
 * A root node is attached to every node by an artificial arc; phase one
 * drives the artificial flow to zero, phase two optimises the real costs
 * with the artificial arcs frozen. Entering and leaving arcs follow Bland's
 * rule (lowest index), which rules out cycling on degenerate bases.
 */
class NetworkSimplex {
 public:
  enum class Status { optimal, infeasible };

  /// supply[v] > 0 is a source, < 0 a sink. Totals should balance.
  explicit NetworkSimplex(std::vector<double> supply) : supply_(std::move(supply)) {}

  int add_arc(int from, int to, double cost) {
    arcs_.push_back({from, to, cost, 0.0, kInfCap});
    return static_cast<int>(arcs_.size()) - 1;
  }

  Status run() {
    const int n = static_cast<int>(supply_.size());
    root_ = n;
    real_arcs_ = static_cast<int>(arcs_.size());
    std::vector<double> real_cost(arcs_.size());
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
      real_cost[a] = arcs_[a].cost;
      arcs_[a].cost = 0.0;
    }
    in_tree_.assign(arcs_.size() + n, false);
    for (int v = 0; v < n; ++v) {
      int a = supply_[v] >= 0 ? push_arc(v, root_, 1.0, supply_[v]) : push_arc(root_, v, 1.0, -supply_[v]);
      in_tree_[a] = true;
    }

    pivot_until_optimal(true);
    double artificial = 0.0;
    for (std::size_t a = real_arcs_; a < arcs_.size(); ++a) artificial += arcs_[a].flow;
    if (artificial > kFeasTol) return Status::infeasible;

    for (int a = 0; a < real_arcs_; ++a) arcs_[a].cost = real_cost[a];
    for (std::size_t a = real_arcs_; a < arcs_.size(); ++a) {
      arcs_[a].cost = 0.0;
      arcs_[a].cap = arcs_[a].flow;
    }
    pivot_until_optimal(false);
    return Status::optimal;
  }

  double flow(int arc) const { return arcs_[arc].flow; }
  /// Node potentials of the final basis; cost + pi[from] - pi[to] >= 0 on every real arc.
  double potential(int node) const { return pi_[node]; }
  std::size_t pivots() const { return pivots_; }

 private:
  static constexpr double kInfCap = std::numeric_limits<double>::infinity();
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kPriceTol = 1e-12;

  struct Arc {
    int from, to;
    double cost, flow, cap;
  };

  int push_arc(int from, int to, double cost, double flow) {
    arcs_.push_back({from, to, cost, flow, kInfCap});
    return static_cast<int>(arcs_.size()) - 1;
  }

  // Rebuilds parent links and potentials from the current tree.
  void index_tree() {
    const int nodes = root_ + 1;
    std::vector<std::vector<int>> adj(nodes);
    for (std::size_t a = 0; a < arcs_.size(); ++a)
      if (in_tree_[a]) {
        adj[arcs_[a].from].push_back(static_cast<int>(a));
        adj[arcs_[a].to].push_back(static_cast<int>(a));
      }
    parent_arc_.assign(nodes, -1);
    depth_.assign(nodes, 0);
    pi_.assign(nodes, 0.0);
    std::vector<bool> seen(nodes, false);
    std::vector<int> stack{root_};
    seen[root_] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int a : adj[u]) {
        const Arc& arc = arcs_[a];
        int w = arc.from == u ? arc.to : arc.from;
        if (seen[w]) continue;
        seen[w] = true;
        parent_arc_[w] = a;
        depth_[w] = depth_[u] + 1;
        pi_[w] = arc.from == u ? pi_[u] + arc.cost : pi_[u] - arc.cost;
        stack.push_back(w);
      }
    }
  }

  int parent(int v) const {
    const Arc& a = arcs_[parent_arc_[v]];
    return a.from == v ? a.to : a.from;
  }

  void pivot_until_optimal(bool phase_one) {
    for (;;) {
      index_tree();
      int entering = -1;
      const int candidates = phase_one ? static_cast<int>(arcs_.size()) : real_arcs_;
      for (int a = 0; a < candidates; ++a) {
        if (in_tree_[a]) continue;
        const Arc& arc = arcs_[a];
        if (arc.cost + pi_[arc.from] - pi_[arc.to] < -kPriceTol) {
          entering = a;
          break;
        }
      }
      if (entering < 0) return;
      pivot(entering);
      ++pivots_;
    }
  }

  // Pushes flow around the cycle closed by `entering` (from -> to, back along the tree).
  void pivot(int entering) {
    struct Step {
      int arc;
      bool forward;
    };
    std::vector<Step> cycle{{entering, true}};
    int u = arcs_[entering].from, v = arcs_[entering].to;
    std::vector<Step> up_from_v, up_from_u;
    while (u != v) {
      if (depth_[v] >= depth_[u]) {
        int a = parent_arc_[v];
        up_from_v.push_back({a, arcs_[a].from == v});
        v = parent(v);
      } else {
        int a = parent_arc_[u];
        up_from_u.push_back({a, arcs_[a].to == u});
        u = parent(u);
      }
    }
    cycle.insert(cycle.end(), up_from_v.begin(), up_from_v.end());
    cycle.insert(cycle.end(), up_from_u.rbegin(), up_from_u.rend());

    double theta = kInfCap;
    int leaving = -1;
    for (const Step& s : cycle) {
      const Arc& arc = arcs_[s.arc];
      double room = s.forward ? arc.cap - arc.flow : arc.flow;
      if (room < theta || (room == theta && s.arc < leaving)) {
        theta = room;
        leaving = s.arc;
      }
    }
    if (leaving < 0) throw std::logic_error("network simplex: unbounded cycle");
    if (theta < 0.0) theta = 0.0;
    for (const Step& s : cycle) arcs_[s.arc].flow += s.forward ? theta : -theta;
    in_tree_[entering] = true;
    in_tree_[leaving] = false;
  }

  std::vector<double> supply_;
  std::vector<Arc> arcs_;
  std::vector<bool> in_tree_;
  std::vector<int> parent_arc_, depth_;
  std::vector<double> pi_;
  int root_ = 0;
  int real_arcs_ = 0;
  std::size_t pivots_ = 0;
};

}  // namespace pmet::detail

#endif
