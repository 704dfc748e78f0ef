#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qmetric {

// Seeded random source for sampling.  Gaussians come from an explicit
// Box-Muller transform over mt19937_64 words so that a given seed produces
// the same stream on every standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return (gen_() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return gen_() % n;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qmetric
