#include "handoff/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "handoff/geometry.hpp"

namespace handoff {

double match_cost(const Hypothesis& h, const GroundTruthElement& g, const HandoffConfig& cfg) {
    const double cls = 1.0 - h.class_probs.at(g.class_id);
    const double l1 = std::abs(h.box.x1 - g.box.x1) + std::abs(h.box.y1 - g.box.y1) +
                      std::abs(h.box.x2 - g.box.x2) + std::abs(h.box.y2 - g.box.y2);
    return cfg.lambda_cls * cls + cfg.lambda_l1 * l1 + cfg.lambda_giou * (1.0 - giou(h.box, g.box));
}

namespace {

// Potentials-based Hungarian on an n x m matrix with n <= m; returns for
// each row the matched column. O(n^2 m).
std::vector<int> solve_rows(const std::vector<std::vector<double>>& a, int n, int m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

Assignment hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n ? static_cast<int>(cost[0].size()) : 0;
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != m)
            throw ValidationError("cost matrix rows have inconsistent lengths");
        for (double c : row)
            if (!std::isfinite(c)) throw ValidationError("cost matrix must be finite");
    }

    Assignment out;
    if (n == 0 || m == 0) {
        for (int i = 0; i < n; ++i) out.unmatched_hypotheses.push_back(i);
        for (int j = 0; j < m; ++j) out.unmatched_gt.push_back(j);
        return out;
    }

    std::vector<int> row_to_col;
    if (n <= m) {
        row_to_col = solve_rows(cost, n, m);
    } else {
        std::vector<std::vector<double>> t(m, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) t[j][i] = cost[i][j];
        const std::vector<int> col_to_row = solve_rows(t, m, n);
        row_to_col.assign(n, -1);
        for (int j = 0; j < m; ++j) row_to_col[col_to_row[j]] = j;
    }

    std::set<int> used_cols;
    for (int i = 0; i < n; ++i) {
        if (row_to_col[i] >= 0) {
            out.pairs.emplace_back(i, row_to_col[i]);
            out.total_cost += cost[i][row_to_col[i]];
            used_cols.insert(row_to_col[i]);
        } else {
            out.unmatched_hypotheses.push_back(i);
        }
    }
    for (int j = 0; j < m; ++j)
        if (!used_cols.count(j)) out.unmatched_gt.push_back(j);
    return out;
}

Assignment match_pool(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const HandoffConfig& cfg) {
    const int n = static_cast<int>(pool.hypotheses.size());
    const int m = static_cast<int>(gt.elements.size());
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            cost[i][j] = match_cost(pool.hypotheses[i], gt.elements[j], cfg);
    Assignment a = hungarian(cost);
    // Rewrite matrix indices as stable ids.
    for (auto& [hi, gj] : a.pairs) {
        hi = pool.hypotheses[hi].id;
        gj = gt.elements[gj].id;
    }
    for (int& hi : a.unmatched_hypotheses) hi = pool.hypotheses[hi].id;
    for (int& gj : a.unmatched_gt) gj = gt.elements[gj].id;
    return a;
}

Targets derive_targets(const Assignment& a, const GroundTruthPage& gt,
                       const HypothesisPool& pool) {
    std::map<int, int> gt_rank;
    for (const GroundTruthElement& e : gt.elements) gt_rank[e.id] = e.order_rank;
    std::map<int, int> hyp_index;
    for (size_t i = 0; i < pool.hypotheses.size(); ++i) hyp_index[pool.hypotheses[i].id] = i;

    Targets t;
    t.retention.assign(pool.hypotheses.size(), 0);
    std::map<int, int> matched_rank;  // hypothesis id -> gt rank
    for (const auto& [hid, gid] : a.pairs) {
        auto hi = hyp_index.find(hid);
        auto gr = gt_rank.find(gid);
        if (hi == hyp_index.end() || gr == gt_rank.end())
            throw ValidationError("assignment references unknown ids");
        t.retention[hi->second] = 1;
        matched_rank[hid] = gr->second;
    }
    for (const auto& [i, ri] : matched_rank)
        for (const auto& [j, rj] : matched_rank)
            if (i != j) t.precedence[{i, j}] = ri < rj ? 1 : 0;
    return t;
}

}  // namespace handoff
