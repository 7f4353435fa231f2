#include "heavytails/rng.hpp"

#include <cmath>

namespace heavytails {

double GaussianSource::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * rng_->uniform() - 1.0;
        v = 2.0 * rng_->uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64::at(seed ^ 0xD1B54A32D192ED03ULL, stream);
}

}  // namespace heavytails
