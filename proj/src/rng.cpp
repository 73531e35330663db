#include "flarekit/rng.hpp"

#include "flarekit/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace flarekit {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw ParameterError("uniform_index over an empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(theta);
    has_cached_ = true;
    return radius * std::cos(theta);
}

double Rng::chi_square(int dof) {
    if (dof < 1) throw ParameterError("chi-square needs at least 1 degree of freedom");
    double sum = 0.0;
    for (int i = 0; i < dof; ++i) {
        const double z = normal();
        sum += z * z;
    }
    return sum;
}

} // namespace flarekit
