#ifndef TESTS_SUPPORT_RNG_HPP
#define TESTS_SUPPORT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "menuforge/geometry.hpp"

namespace testsupport {

// splitmix64: tiny, seedable, and identical on every platform, unlike the
// distributions in <random>.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int pick(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

// Dirichlet(1)-ish draw with every coordinate at least min_mass.
inline menuforge::Belief random_belief(Rng& rng, std::size_t n, double min_mass = 0.0) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) {
        x = -std::log(1.0 - rng.uniform());
        sum += x;
    }
    double slack = 1.0 - static_cast<double>(n) * min_mass;
    for (double& x : w) x = min_mass + slack * (x / sum);
    return menuforge::Belief(std::move(w));
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t n, double min_mass = 0.0) {
    return random_belief(rng, n, min_mass).weights();
}

}  // namespace testsupport

#endif
