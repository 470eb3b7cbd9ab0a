#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bannerscope::ml {

using DenseVector = std::vector<double>;

struct KMeansOptions {
    int max_iterations = 100;
    /// Independent k-means++ starts drawn from the same seeded stream; the
    /// run with the lowest final inertia is kept.
    int restarts = 10;
};

struct CentroidSet {
    std::vector<DenseVector> centroids;
    std::vector<std::size_t> assignments; // item -> cluster
    double inertia = 0.0;                 // sum of squared distances to assigned centroids
    /// Inertia after every assignment step of the kept run.
    std::vector<double> inertia_history;
    int iterations = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// k-means++ seeding followed by Lloyd iterations until the assignment is
/// stable. Throws InvalidK unless 1 <= k <= number of distinct vectors.
CentroidSet kmeans(std::span<const DenseVector> vectors, std::size_t k, std::uint64_t seed,
                   const KMeansOptions& options = {});

} // namespace bannerscope::ml
