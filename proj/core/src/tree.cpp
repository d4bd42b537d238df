#include "eventflow/tree.hpp"

#include "eventflow/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace eventflow {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw PreconditionError("forecast_models", "uniform_index over an empty range");
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % n;
}

double RegressionTree::predict(std::span<const double> x) const {
    return nodes[static_cast<std::size_t>(leaf_index(x))].value;
}

int RegressionTree::leaf_index(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return i;
}

int RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {  // children always follow their parent
        const TreeNode& n = nodes[i];
        if (n.is_leaf()) continue;
        d[static_cast<std::size_t>(n.left)] = d[i] + 1;
        d[static_cast<std::size_t>(n.right)] = d[i] + 1;
        best = std::max(best, d[i] + 1);
    }
    return best;
}

double RegressionTree::expected_value() const {
    double num = 0.0;
    double den = 0.0;
    for (const auto& n : nodes) {
        if (!n.is_leaf()) continue;
        num += n.cover * n.value;
        den += n.cover;
    }
    return den > 0.0 ? num / den : 0.0;
}

int RegressionTree::max_feature() const {
    int best = -1;
    for (const auto& n : nodes) best = std::max(best, n.feature);
    return best;
}

TreeBuilder::TreeBuilder(const Matrix& x) : x_(x) {
    const auto n = static_cast<std::size_t>(x.rows());
    order_.resize(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        auto& ord = order_[static_cast<std::size_t>(f)];
        ord.resize(n);
        std::iota(ord.begin(), ord.end(), 0u);
        std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
}

namespace {

struct NodeStats {
    double w = 0.0;
    double s = 0.0;
    int count = 0;
};

struct ScanState {
    NodeStats left;
    double last = 0.0;
    bool has_last = false;
};

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    NodeStats left;
};

}  // namespace

RegressionTree TreeBuilder::fit(std::span<const double> target, std::span<const double> weight,
                                const TreeParams& params, std::mt19937_64* rng) {
    const auto n = static_cast<std::size_t>(x_.rows());
    const int n_features = static_cast<int>(x_.cols());
    if (target.size() != n || weight.size() != n) {
        throw DimensionMismatch("target and weight length must equal the row count");
    }
    if (params.max_depth < 0 || params.min_samples_leaf < 1) {
        throw PreconditionError("forecast_models", "invalid tree parameters");
    }
    const int min_leaf = params.min_samples_leaf;
    const bool subsample = params.max_features > 0 && params.max_features < n_features;
    if (subsample && rng == nullptr) throw PreconditionError("forecast_models", "feature subsampling needs a generator");

    RegressionTree tree;
    std::vector<NodeStats> stats(1);
    node_of_.assign(n, -1);
    for (std::size_t r = 0; r < n; ++r) {
        if (weight[r] <= 0.0) continue;
        node_of_[r] = 0;
        stats[0].w += weight[r];
        stats[0].s += weight[r] * target[r];
        stats[0].count += 1;
    }
    if (stats[0].w <= 0.0) throw PreconditionError("forecast_models", "all sample weights are zero");
    tree.nodes.push_back(TreeNode{});

    std::vector<int> frontier{0};
    std::vector<int> slot;     // node -> position in frontier, -1 if not splittable
    std::vector<ScanState> scan;
    std::vector<BestSplit> best;
    std::vector<std::vector<char>> allowed;  // per frontier slot, when subsampling
    std::vector<int> pool(static_cast<std::size_t>(n_features));

    for (int level = 0; level < params.max_depth && !frontier.empty(); ++level) {
        slot.assign(tree.nodes.size(), -1);
        std::vector<int> candidates;
        for (int node : frontier) {
            if (stats[static_cast<std::size_t>(node)].count >= 2 * min_leaf) {
                slot[static_cast<std::size_t>(node)] = static_cast<int>(candidates.size());
                candidates.push_back(node);
            }
        }
        if (candidates.empty()) break;
        best.assign(candidates.size(), BestSplit{});
        if (subsample) {
            allowed.assign(candidates.size(), std::vector<char>(static_cast<std::size_t>(n_features), 0));
            for (auto& mask : allowed) {
                std::iota(pool.begin(), pool.end(), 0);
                for (int k = 0; k < params.max_features; ++k) {
                    const auto pick = k + static_cast<int>(uniform_index(*rng, static_cast<std::uint64_t>(n_features - k)));
                    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
                    mask[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])] = 1;
                }
            }
        }

        for (int f = 0; f < n_features; ++f) {
            scan.assign(candidates.size(), ScanState{});
            for (std::uint32_t r : order_[static_cast<std::size_t>(f)]) {
                const int node = node_of_[r];
                if (node < 0) continue;
                const int s = slot[static_cast<std::size_t>(node)];
                if (s < 0) continue;
                if (subsample && !allowed[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)]) continue;
                ScanState& st = scan[static_cast<std::size_t>(s)];
                const double v = x_(r, f);
                const NodeStats& total = stats[static_cast<std::size_t>(node)];
                if (st.has_last && v > st.last && st.left.count >= min_leaf && total.count - st.left.count >= min_leaf) {
                    const double wl = st.left.w;
                    const double wr = total.w - wl;
                    if (wl > 0.0 && wr > 0.0) {
                        const double sr = total.s - st.left.s;
                        const double gain =
                            st.left.s * st.left.s / wl + sr * sr / wr - total.s * total.s / total.w;
                        BestSplit& b = best[static_cast<std::size_t>(s)];
                        if (gain > b.gain) {
                            double thr = 0.5 * (st.last + v);
                            if (!(st.last < thr && thr <= v)) thr = v;
                            b = BestSplit{gain, f, thr, st.left};
                        }
                    }
                }
                st.left.w += weight[r];
                st.left.s += weight[r] * target[r];
                st.left.count += 1;
                st.last = v;
                st.has_last = true;
            }
        }

        std::vector<int> next;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const BestSplit& b = best[c];
            if (b.feature < 0) continue;
            const int node = candidates[c];
            const NodeStats total = stats[static_cast<std::size_t>(node)];
            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
            stats.push_back(b.left);
            stats.push_back(NodeStats{total.w - b.left.w, total.s - b.left.s, total.count - b.left.count});
            TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
            nd.feature = b.feature;
            nd.threshold = b.threshold;
            nd.left = left;
            nd.right = left + 1;
            next.push_back(left);
            next.push_back(left + 1);
        }
        if (next.empty()) break;
        for (std::size_t r = 0; r < n; ++r) {
            const int node = node_of_[r];
            if (node < 0) continue;
            const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
            if (nd.is_leaf()) continue;
            node_of_[r] = x_(static_cast<Eigen::Index>(r), nd.feature) < nd.threshold ? nd.left : nd.right;
        }
        frontier = std::move(next);
    }

    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        tree.nodes[i].cover = stats[i].w;
        tree.nodes[i].value = stats[i].s / stats[i].w;
    }
    return tree;
}

}  // namespace eventflow
