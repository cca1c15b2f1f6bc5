#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spacing/core.hpp"

namespace spacing {

/// Bipartite graph over node sets U (left) and V (right).
struct BipartiteGraph {
    int nu = 0;
    int nv = 0;
    std::vector<std::vector<int>> adj;  // adj[u] = neighbours in V

    BipartiteGraph() = default;
    BipartiteGraph(int nu_, int nv_) : nu(nu_), nv(nv_), adj(nu_) {}

    /// Clears the edges, keeping allocated capacity for reuse.
    void reset(int nu_, int nv_) {
        nu = nu_;
        nv = nv_;
        if (static_cast<int>(adj.size()) < nu)
            adj.resize(nu);
        for (int u = 0; u < nu; ++u)
            adj[u].clear();
    }

    void add_edge(int u, int v) { adj[u].push_back(v); }

    bool has_edge(int u, int v) const {
        for (int w : adj[u])
            if (w == v)
                return true;
        return false;
    }
};

/// Pairing kept across propagator invocations as a warm start.
struct Matching {
    std::vector<int> of_u;  // matched V node per U node, -1 if free
    std::vector<int> of_v;  // matched U node per V node, -1 if free

    void reset(int nu, int nv) {
        of_u.assign(nu, -1);
        of_v.assign(nv, -1);
    }

    int size() const {
        int s = 0;
        for (int v : of_u)
            s += v >= 0;
        return s;
    }
};

/// Hopcroft-Karp style augmentation. Starts from whatever pairs already
/// sit in `m` after dropping those whose edge no longer exists, and
/// augments until the matching has maximum cardinality. Returns its size.
inline int maximum_matching(const BipartiteGraph& g, Matching& m) {
    if (static_cast<int>(m.of_u.size()) != g.nu ||
        static_cast<int>(m.of_v.size()) != g.nv)
        m.reset(g.nu, g.nv);
    // drop stale pairs
    for (int u = 0; u < g.nu; ++u) {
        int v = m.of_u[u];
        if (v >= 0 && (m.of_v[v] != u || !g.has_edge(u, v))) {
            m.of_u[u] = -1;
            if (v >= 0 && m.of_v[v] == u)
                m.of_v[v] = -1;
        }
    }
    for (int v = 0; v < g.nv; ++v) {
        int u = m.of_v[v];
        if (u >= 0 && m.of_u[u] != v)
            m.of_v[v] = -1;
    }

    const int inf = 1 << 30;
    std::vector<int> dist(g.nu);
    std::vector<int> queue;
    queue.reserve(g.nu);

    auto bfs = [&]() {
        queue.clear();
        for (int u = 0; u < g.nu; ++u) {
            if (m.of_u[u] < 0) {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = inf;
            }
        }
        bool reachable_free_v = false;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (int v : g.adj[u]) {
                int u2 = m.of_v[v];
                if (u2 < 0) {
                    reachable_free_v = true;
                } else if (dist[u2] == inf) {
                    dist[u2] = dist[u] + 1;
                    queue.push_back(u2);
                }
            }
        }
        return reachable_free_v;
    };

    std::vector<char> visited(g.nu);
    auto dfs = [&](auto&& self, int u) -> bool {
        visited[u] = 1;
        for (int v : g.adj[u]) {
            int u2 = m.of_v[v];
            if (u2 < 0 ||
                (!visited[u2] && dist[u2] == dist[u] + 1 && self(self, u2))) {
                m.of_u[u] = v;
                m.of_v[v] = u;
                return true;
            }
        }
        return false;
    };

    int size = m.size();
    while (bfs()) {
        std::fill(visited.begin(), visited.end(), 0);
        for (int u = 0; u < g.nu; ++u)
            if (m.of_u[u] < 0 && dfs(dfs, u))
                ++size;
    }
    return size;
}

/// Edges of `g` that belong to no maximum matching, given a maximum
/// matching that covers U. Orientation: matched edges run U -> V,
/// unmatched edges V -> U; an unmatched edge survives iff its endpoints
/// share a strongly connected component or its V endpoint lies on a
/// directed path from a free V node.
inline std::vector<std::pair<int, int>> unsupported_edges(
    const BipartiteGraph& g, const Matching& m) {
    const int n = g.nu + g.nv;  // node id: u -> u, v -> nu + v

    // reverse adjacency of unmatched edges, used for V -> U arcs
    std::vector<std::vector<int>> arcs(n);
    for (int u = 0; u < g.nu; ++u) {
        for (int v : g.adj[u]) {
            if (m.of_u[u] == v)
                arcs[u].push_back(g.nu + v);
            else
                arcs[g.nu + v].push_back(u);
        }
    }

    // iterative Tarjan
    std::vector<int> scc(n, -1), low(n), num(n, -1);
    std::vector<int> stack, call_node, call_edge;
    std::vector<char> on_stack(n, 0);
    int counter = 0, scc_count = 0;
    for (int root = 0; root < n; ++root) {
        if (num[root] >= 0)
            continue;
        call_node.assign(1, root);
        call_edge.assign(1, 0);
        num[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call_node.empty()) {
            int x = call_node.back();
            int& ei = call_edge.back();
            if (ei < static_cast<int>(arcs[x].size())) {
                int y = arcs[x][ei++];
                if (num[y] < 0) {
                    num[y] = low[y] = counter++;
                    stack.push_back(y);
                    on_stack[y] = 1;
                    call_node.push_back(y);
                    call_edge.push_back(0);
                } else if (on_stack[y]) {
                    low[x] = std::min(low[x], num[y]);
                }
            } else {
                if (low[x] == num[x]) {
                    while (true) {
                        int y = stack.back();
                        stack.pop_back();
                        on_stack[y] = 0;
                        scc[y] = scc_count;
                        if (y == x)
                            break;
                    }
                    ++scc_count;
                }
                call_node.pop_back();
                call_edge.pop_back();
                if (!call_node.empty())
                    low[call_node.back()] =
                        std::min(low[call_node.back()], low[x]);
            }
        }
    }

    // alternating paths from free V nodes
    std::vector<char> reached(n, 0);
    std::vector<int> queue;
    for (int v = 0; v < g.nv; ++v) {
        if (m.of_v[v] < 0) {
            reached[g.nu + v] = 1;
            queue.push_back(g.nu + v);
        }
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        for (int y : arcs[queue[qi]]) {
            if (!reached[y]) {
                reached[y] = 1;
                queue.push_back(y);
            }
        }
    }

    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < g.nu; ++u) {
        for (int v : g.adj[u]) {
            if (m.of_u[u] == v)
                continue;
            if (scc[u] != scc[g.nu + v] && !reached[g.nu + v])
                out.emplace_back(u, v);
        }
    }
    return out;
}

}  // namespace spacing
