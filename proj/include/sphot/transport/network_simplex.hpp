#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sphot/errors.hpp"
#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot::transport_detail {

/// Primal network simplex for the dense transportation problem
///
///   min sum_ij c_ij x_ij  s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0.
///
/// Spanning-tree bookkeeping follows the thread/successor-count scheme of
/// Grigoriadis with a strongly feasible initial tree of artificial arcs to a
/// root node, and block-search pricing.
class NetworkSimplex {
 public:
  struct Result {
    Matrix flow;
    double cost = 0.0;
    long pivots = 0;
  };

  NetworkSimplex(const Matrix& cost, const std::vector<double>& a, const std::vector<double>& b)
      : m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())) {
    if (cost.rows() != m_ || cost.cols() != n_) throw InvalidArgument("NetworkSimplex: cost shape mismatch");
    node_num_ = m_ + n_;
    arc_num_ = m_ * n_;
    const int all_arcs = arc_num_ + node_num_;
    const int all_nodes = node_num_ + 1;
    root_ = node_num_;

    source_.resize(all_arcs);
    target_.resize(all_arcs);
    cost_.resize(all_arcs);
    flow_.assign(all_arcs, 0.0);
    state_.assign(all_arcs, kStateLower);

    double max_cost = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) {
        const int e = i * n_ + j;
        source_[e] = i;
        target_[e] = m_ + j;
        cost_[e] = cost(i, j);
        max_cost = std::max(max_cost, std::abs(cost_[e]));
      }

    supply_.resize(all_nodes);
    for (int i = 0; i < m_; ++i) supply_[i] = a[i];
    for (int j = 0; j < n_; ++j) supply_[m_ + j] = -b[j];
    supply_[root_] = 0.0;
    flow_scale_ = 0.0;
    for (double s : a) flow_scale_ += s;
    flow_scale_ = std::max(flow_scale_, 1e-300);

    parent_.resize(all_nodes);
    pred_.resize(all_nodes);
    pred_dir_.resize(all_nodes);
    thread_.resize(all_nodes);
    rev_thread_.resize(all_nodes);
    succ_num_.resize(all_nodes);
    last_succ_.resize(all_nodes);
    pi_.resize(all_nodes);

    const double art_cost = (max_cost + 1.0) * node_num_;
    // Potentials reach art_cost in magnitude; reduced costs below this are rounding.
    price_tolerance_ = 1e-12 * art_cost;
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_num_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (int u = 0, e = arc_num_; u < node_num_; ++u, ++e) {
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (supply_[u] >= 0.0) {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = supply_[u];
        cost_[e] = 0.0;
      } else {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -supply_[u];
        cost_[e] = art_cost;
      }
    }
    block_size_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(arc_num_))));
  }

  Result solve(long max_pivots = -1) {
    if (max_pivots < 0) max_pivots = 50L * (arc_num_ + node_num_) + 1000;
    long pivots = 0;
    while (find_entering_arc()) {
      if (++pivots > max_pivots) throw SolverNotConverged("network simplex: pivot limit reached");
      find_join_node();
      if (!find_leaving_arc()) throw InfeasibleProblem("network simplex: unbounded cycle");
      change_flow();
      update_tree_structure();
      update_potential();
    }
    for (int e = arc_num_; e < arc_num_ + node_num_; ++e) {
      if (flow_[e] > 1e-9 * flow_scale_) {
        throw InfeasibleProblem("network simplex: marginals are not balanced");
      }
    }
    Result r;
    r.pivots = pivots;
    r.flow = Matrix::Zero(m_, n_);
    numeric::CompensatedSum total;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double f = std::max(0.0, flow_[i * n_ + j]);
        r.flow(i, j) = f;
        total += f * cost_[i * n_ + j];
      }
    r.cost = total.value();
    return r;
  }

 private:
  static constexpr int kStateLower = 1;
  static constexpr int kStateTree = 0;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;

  bool find_entering_arc() {
    double min = -price_tolerance_;
    int cnt = block_size_;
    int e = next_arc_;
    bool found = false;
    for (int k = 0; k < arc_num_; ++k) {
      const double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (++e == arc_num_) e = 0;
      if (--cnt == 0) {
        if (found) break;
        cnt = block_size_;
      }
    }
    next_arc_ = e;
    return found;
  }

  void find_join_node() {
    int u = source_[in_arc_], v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  // Real arcs are uncapacitated and artificial arcs too, so only arcs whose
  // flow decreases around the cycle can block it.
  bool find_leaving_arc() {
    const int first = source_[in_arc_];
    const int second = target_[in_arc_];
    delta_ = std::numeric_limits<double>::infinity();
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirUp) {
        const double d = std::max(0.0, flow_[pred_[u]]);
        if (d < delta_) {
          delta_ = d;
          u_out_ = u;
          result = 1;
        }
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirDown) {
        const double d = std::max(0.0, flow_[pred_[u]]);
        if (d <= delta_) {
          delta_ = d;
          u_out_ = u;
          result = 2;
        }
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow() {
    if (delta_ > 0.0) {
      const double val = delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * val;
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * val;
    }
    state_[in_arc_] = kStateTree;
    flow_[pred_[u_out_]] = 0.0;
    state_[pred_[u_out_]] = kStateLower;
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      // Re-hang the stem between u_in and u_out.
      int stem = u_in_;
      int par_stem = v_in_;
      int next_stem;
      int last = last_succ_[u_in_];
      int before, after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }

      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = last_succ_out;
      }
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int m_, n_, node_num_, arc_num_, root_;
  double price_tolerance_ = 0.0, flow_scale_ = 1.0;
  std::vector<int> source_, target_;
  std::vector<double> cost_, flow_;
  std::vector<signed char> state_;
  std::vector<double> supply_, pi_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, dirty_revs_;
  std::vector<signed char> pred_dir_;

  int block_size_ = 10;
  int next_arc_ = 0;
  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  double delta_ = 0.0;
};

}  // namespace sphot::transport_detail
