#include "bannerscope/kmeans.hpp"

#include "bannerscope/error.hpp"
#include "bannerscope/random.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

namespace bannerscope::ml {

namespace {

std::size_t nearest(std::span<const double> point, const std::vector<DenseVector>& centroids, double& dist) {
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(point, centroids[c]);
        if (d < dist) {
            dist = d;
            best = c;
        }
    }
    return best;
}

std::vector<DenseVector> plus_plus_init(std::span<const DenseVector> points, std::size_t k, SeededRng& rng) {
    std::vector<DenseVector> centroids;
    centroids.push_back(points[rng.below(points.size())]);
    std::vector<double> d2(points.size());
    while (centroids.size() < k) {
        double total = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = 0;
            nearest(points[i], centroids, d);
            d2[i] = d;
            total += d;
        }
        double target = rng.uniform() * total;
        std::size_t pick = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (d2[i] <= 0) continue;
            if (target < d2[i]) {
                pick = i;
                break;
            }
            target -= d2[i];
        }
        // Rounding can leave `pick` on an existing centroid; fall back to the farthest point.
        if (d2[pick] <= 0) pick = static_cast<std::size_t>(std::max_element(d2.begin(), d2.end()) - d2.begin());
        centroids.push_back(points[pick]);
    }
    return centroids;
}

/// Assigns points, then gives every empty cluster the point farthest from
/// its own centroid (taken from a cluster with more than one member).
double assign(std::span<const DenseVector> points, std::vector<DenseVector>& centroids,
              std::vector<std::size_t>& assignments) {
    const std::size_t k = centroids.size();
    std::vector<double> dist(points.size());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        assignments[i] = nearest(points[i], centroids, dist[i]);
        ++sizes[assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t far = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (sizes[assignments[i]] > 1 && (far == points.size() || dist[i] > dist[far])) far = i;
        }
        if (far == points.size()) continue;
        --sizes[assignments[far]];
        assignments[far] = c;
        ++sizes[c];
        centroids[c] = points[far];
        dist[far] = 0;
    }
    double inertia = 0;
    for (double d : dist) inertia += d;
    return inertia;
}

void update_centroids(std::span<const DenseVector> points, const std::vector<std::size_t>& assignments,
                      std::vector<DenseVector>& centroids) {
    const std::size_t dim = points.front().size();
    std::vector<DenseVector> sums(centroids.size(), DenseVector(dim, 0.0));
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[assignments[i]];
        for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
}

/// Hartigan refinement: moves single points between clusters while a move
/// lowers the inertia. Lloyd fixed points can still be improved this way.
bool hartigan_pass(std::span<const DenseVector> points, std::vector<DenseVector>& centroids,
                   std::vector<std::size_t>& assignments) {
    const std::size_t k = centroids.size();
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assignments) ++sizes[a];
    bool moved = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t from = assignments[i];
        if (sizes[from] < 2) continue;
        const double n_from = static_cast<double>(sizes[from]);
        const double gain = n_from / (n_from - 1.0) * squared_distance(points[i], centroids[from]);
        std::size_t to = from;
        double best_cost = gain;
        for (std::size_t c = 0; c < k; ++c) {
            if (c == from) continue;
            const double n_to = static_cast<double>(sizes[c]);
            const double cost = n_to / (n_to + 1.0) * squared_distance(points[i], centroids[c]);
            if (cost < best_cost * (1.0 - 1e-12)) {
                best_cost = cost;
                to = c;
            }
        }
        if (to == from) continue;
        assignments[i] = to;
        --sizes[from];
        ++sizes[to];
        update_centroids(points, assignments, centroids);
        moved = true;
    }
    return moved;
}

double inertia_of(std::span<const DenseVector> points, const std::vector<DenseVector>& centroids,
                  const std::vector<std::size_t>& assignments) {
    double s = 0;
    for (std::size_t i = 0; i < points.size(); ++i) s += squared_distance(points[i], centroids[assignments[i]]);
    return s;
}

CentroidSet lloyd(std::span<const DenseVector> points, std::size_t k, SeededRng& rng, int max_iterations) {
    CentroidSet result;
    result.centroids = plus_plus_init(points, k, rng);
    result.assignments.assign(points.size(), 0);
    result.inertia = assign(points, result.centroids, result.assignments);
    result.inertia_history.push_back(result.inertia);
    for (int it = 1; it <= max_iterations; ++it) {
        update_centroids(points, result.assignments, result.centroids);
        auto next = result.assignments;
        const double inertia = assign(points, result.centroids, next);
        result.iterations = it;
        const bool stable = next == result.assignments;
        result.assignments = std::move(next);
        result.inertia = inertia;
        result.inertia_history.push_back(inertia);
        if (stable) break;
    }
    for (int pass = 0; pass < max_iterations; ++pass) {
        update_centroids(points, result.assignments, result.centroids);
        if (!hartigan_pass(points, result.centroids, result.assignments)) break;
        result.inertia = inertia_of(points, result.centroids, result.assignments);
        result.inertia_history.push_back(result.inertia);
    }
    update_centroids(points, result.assignments, result.centroids);
    result.inertia = inertia_of(points, result.centroids, result.assignments);
    return result;
}

} // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

CentroidSet kmeans(std::span<const DenseVector> vectors, std::size_t k, std::uint64_t seed,
                   const KMeansOptions& options) {
    if (vectors.empty() || k == 0) throw InvalidK("k must be at least 1 and the input non-empty");
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw PreconditionError("kmeans: vectors differ in dimension");
    }
    const std::set<DenseVector> distinct(vectors.begin(), vectors.end());
    if (k > distinct.size()) {
        throw InvalidK("k=" + std::to_string(k) + " exceeds the " + std::to_string(distinct.size()) +
                       " distinct vectors");
    }
    SeededRng rng(seed);
    std::optional<CentroidSet> best;
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        CentroidSet run = lloyd(vectors, k, rng, options.max_iterations);
        if (!best || run.inertia < best->inertia) best = std::move(run);
    }
    return std::move(*best);
}

} // namespace bannerscope::ml
