#include "driftlab/rng.hpp"

#include <cmath>

namespace driftlab::rng {

uint64_t fnv1a_bytes(const void* data, size_t n, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

double Stream::gauss(uint64_t counter) const {
    const double u1 = uniform(counter, 1);  // (0,1], safe under log
    const double u2 = static_cast<double>(word(counter, 2) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace driftlab::rng
