#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynkin/arith.hpp"

namespace dynkin {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite filtration tree: nodes at depth t are the atoms of F_t, branch
/// probabilities live on the edge from the parent. Nodes are stored in
/// insertion order with parents before children, so a single reverse pass
/// is a leaf-to-root sweep.
template <class S>
struct FiltrationTree {
    int horizon = 0;
    double tolerance = 1e-9;  // float-mode comparisons only

    std::vector<std::string> name;
    std::vector<int> time;
    std::vector<NodeId> parent;        // kNoNode for the root
    std::vector<S> branch_prob;        // P(node | parent); 1 at the root
    std::vector<std::vector<NodeId>> children;

    NodeId add_root(std::string id) {
        if (!name.empty()) throw std::invalid_argument("tree already has a root");
        return push(std::move(id), 0, kNoNode, Arith<S>::from_int(1));
    }

    NodeId add_child(NodeId p, std::string id, S prob) {
        if (p < 0 || p >= size()) throw std::invalid_argument("unknown parent node");
        NodeId n = push(std::move(id), time[p] + 1, p, std::move(prob));
        children[p].push_back(n);
        return n;
    }

    int size() const { return int(name.size()); }
    bool is_leaf(NodeId n) const { return children[n].empty(); }
    NodeId root() const { return 0; }

    NodeId find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? kNoNode : it->second;
    }

    /// True iff `n` lies in the subtree rooted at `start` (inclusive).
    bool in_subtree(NodeId n, NodeId start) const {
        while (n != kNoNode) {
            if (n == start) return true;
            n = parent[n];
        }
        return false;
    }

    std::vector<NodeId> leaves_under(NodeId start) const {
        std::vector<NodeId> out;
        for (NodeId n = start; n < size(); ++n)
            if (in_subtree(n, start) && is_leaf(n)) out.push_back(n);
        return out;
    }

private:
    std::unordered_map<std::string, NodeId> index_;

    NodeId push(std::string id, int t, NodeId p, S prob) {
        if (index_.count(id)) throw std::invalid_argument("duplicate node id '" + id + "'");
        NodeId n = size();
        index_.emplace(id, n);
        name.push_back(std::move(id));
        time.push_back(t);
        parent.push_back(p);
        branch_prob.push_back(std::move(prob));
        children.emplace_back();
        return n;
    }
};

/// One real value per node; adaptedness is structural.
template <class S>
struct AdaptedProcess {
    std::vector<S> values;

    AdaptedProcess() = default;
    explicit AdaptedProcess(std::vector<S> v) : values(std::move(v)) {}
    template <class T>
    AdaptedProcess(const FiltrationTree<T>& tree, S fill) : values(tree.size(), fill) {}

    S& operator[](NodeId n) { return values[n]; }
    const S& operator[](NodeId n) const { return values[n]; }
    int size() const { return int(values.size()); }
};

template <class S>
AdaptedProcess<S> pointwise_min(const AdaptedProcess<S>& a, const AdaptedProcess<S>& b) {
    AdaptedProcess<S> out;
    out.values.reserve(a.values.size());
    for (size_t i = 0; i < a.values.size(); ++i)
        out.values.push_back(scalar_min(a.values[i], b.values[i]));
    return out;
}

template <class S>
AdaptedProcess<S> pointwise_max(const AdaptedProcess<S>& a, const AdaptedProcess<S>& b) {
    AdaptedProcess<S> out;
    out.values.reserve(a.values.size());
    for (size_t i = 0; i < a.values.size(); ++i)
        out.values.push_back(scalar_max(a.values[i], b.values[i]));
    return out;
}

/// Total stop/continue map with a forced stop at every leaf, so the realized
/// time min{t : stop} exists on every path. Values above a subgame's start
/// node are simply ignored by the operations.
struct StoppingTime {
    std::vector<std::uint8_t> stop;

    bool stops_at(NodeId n) const { return stop[n] != 0; }

    template <class S>
    static StoppingTime make(const FiltrationTree<S>& tree, std::vector<std::uint8_t> stops) {
        if (int(stops.size()) != tree.size())
            throw std::invalid_argument("stopping time size does not match tree");
        for (NodeId n = 0; n < tree.size(); ++n)
            if (tree.is_leaf(n)) stops[n] = 1;
        return StoppingTime{std::move(stops)};
    }

    template <class S>
    static StoppingTime everywhere(const FiltrationTree<S>& tree) {
        return StoppingTime{std::vector<std::uint8_t>(tree.size(), 1)};
    }

    template <class S>
    static StoppingTime at_leaves_only(const FiltrationTree<S>& tree) {
        std::vector<std::uint8_t> s(tree.size(), 0);
        for (NodeId n = 0; n < tree.size(); ++n)
            if (tree.is_leaf(n)) s[n] = 1;
        return StoppingTime{std::move(s)};
    }

    /// First stop on the path start -> leaf.
    template <class S>
    NodeId realized_at(const FiltrationTree<S>& tree, NodeId start, NodeId leaf) const {
        std::vector<NodeId> path;
        for (NodeId n = leaf; n != kNoNode; n = tree.parent[n]) {
            path.push_back(n);
            if (n == start) break;
        }
        for (auto it = path.rbegin(); it != path.rend(); ++it)
            if (stops_at(*it)) return *it;
        throw std::logic_error("stopping time never stops on path");
    }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Structural invariant check, report-style: never throws.
template <class S>
ValidationReport validate_tree(const FiltrationTree<S>& tree) {
    ValidationReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    if (tree.size() == 0) {
        fail("tree has no nodes");
        return rep;
    }
    if (tree.horizon < 0) fail("horizon must be >= 0");
    int roots = 0;
    for (NodeId n = 0; n < tree.size(); ++n) {
        if (tree.parent[n] == kNoNode) {
            ++roots;
            if (tree.time[n] != 0) fail("root '" + tree.name[n] + "' not at time 0");
        } else if (tree.time[n] != tree.time[tree.parent[n]] + 1) {
            fail("node '" + tree.name[n] + "' time is not parent time + 1");
        }
        if (tree.time[n] > tree.horizon)
            fail("node '" + tree.name[n] + "' beyond horizon");
        if (tree.time[n] == tree.horizon && !tree.is_leaf(n))
            fail("node '" + tree.name[n] + "' at horizon has children");
        if (tree.time[n] < tree.horizon && tree.is_leaf(n))
            fail("node '" + tree.name[n] + "' before horizon has no children");
        if (n != tree.root() && !Arith<S>::lt(Arith<S>::zero(), tree.branch_prob[n], tree.tolerance))
            fail("branch probability not positive at node '" + tree.name[n] + "'");
        if (!tree.is_leaf(n)) {
            S sum = Arith<S>::zero();
            for (NodeId c : tree.children[n]) sum = sum + tree.branch_prob[c];
            if (!Arith<S>::eq(sum, Arith<S>::from_int(1), tree.tolerance))
                fail("probabilities sum " + Arith<S>::str(sum) + " != 1 at node '" +
                     tree.name[n] + "'");
        }
    }
    if (roots != 1) fail("tree must have exactly one root");
    return rep;
}

/// One-step conditional expectation E(process_{t+1} | F_t) at an internal node.
template <class S>
S conditional_expectation(const FiltrationTree<S>& tree, const AdaptedProcess<S>& process,
                          NodeId node) {
    if (tree.is_leaf(node)) throw std::invalid_argument("no successors");
    S sum = Arith<S>::zero();
    for (NodeId c : tree.children[node]) sum = sum + tree.branch_prob[c] * process[c];
    return sum;
}

/// Internal (non-leaf) nodes of the subtree, ascending id order. Bit i of an
/// enumeration mask is the stop decision at the i-th of these nodes.
template <class S>
std::vector<NodeId> internal_nodes_under(const FiltrationTree<S>& tree, NodeId start) {
    std::vector<NodeId> out;
    for (NodeId n = start; n < tree.size(); ++n)
        if (tree.in_subtree(n, start) && !tree.is_leaf(n)) out.push_back(n);
    return out;
}

template <class S>
std::uint64_t count_stopping_times(const FiltrationTree<S>& tree, NodeId start,
                                   std::uint64_t cap = kDefaultEnumerationCap) {
    auto internals = internal_nodes_under(tree, start);
    if (internals.size() >= 63 || (std::uint64_t(1) << internals.size()) > cap)
        throw CapExceeded("stopping-time count 2^" + std::to_string(internals.size()) +
                          " exceeds enumeration cap " + std::to_string(cap));
    return std::uint64_t(1) << internals.size();
}

/// Visits every stop/continue map on the subtree exactly once, in mask order.
/// Nodes outside the subtree are set to "stop" canonically.
template <class S>
void for_each_stopping_time(const FiltrationTree<S>& tree, NodeId start,
                            const std::function<void(std::uint64_t, const StoppingTime&)>& fn,
                            std::uint64_t cap = kDefaultEnumerationCap) {
    auto internals = internal_nodes_under(tree, start);
    std::uint64_t total = count_stopping_times(tree, start, cap);
    StoppingTime st = StoppingTime::everywhere(tree);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (size_t i = 0; i < internals.size(); ++i)
            st.stop[internals[i]] = std::uint8_t((mask >> i) & 1);
        fn(mask, st);
    }
}

template <class S>
StoppingTime stopping_time_from_mask(const FiltrationTree<S>& tree, NodeId start,
                                     std::uint64_t mask) {
    auto internals = internal_nodes_under(tree, start);
    StoppingTime st = StoppingTime::everywhere(tree);
    for (size_t i = 0; i < internals.size(); ++i)
        st.stop[internals[i]] = std::uint8_t((mask >> i) & 1);
    return st;
}

}  // namespace dynkin
