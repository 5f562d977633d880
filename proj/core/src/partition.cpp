#include "levcode/partition.hpp"

#include <cmath>
#include <string>

namespace levcode {

PartitionPlan make_partition(std::size_t N, std::size_t K, std::span<const double> pi) {
    if (N == 0 || K == 0) throw InvalidInputError("make_partition: N and K must be positive");
    if (N % K != 0) {
        throw DivisibilityError("make_partition: K = " + std::to_string(K) +
                                " does not divide N = " + std::to_string(N));
    }
    if (pi.size() != N) throw ArityError("make_partition: pi length != N");
    double total = 0.0;
    for (double v : pi) {
        if (v < 0.0 || !std::isfinite(v))
            throw InvalidDistributionError("make_partition: pi has a negative or non-finite entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidDistributionError("make_partition: pi sums to " + std::to_string(total));

    PartitionPlan plan;
    plan.N = N;
    plan.K = K;
    plan.part_size = N / K;
    plan.Pi.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        const auto [b, e] = plan.part_range(i);
        double s = 0.0;
        for (std::size_t j = b; j < e; ++j) s += pi[j];
        plan.Pi[i] = s;
    }
    return plan;
}

}  // namespace levcode
