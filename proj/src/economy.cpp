#include "ebl/economy.hpp"

#include "ebl/error.hpp"

#include <cmath>

namespace ebl {

void EconomyParams::validate(bool allow_zero_sigma) const {
    if (q < 1) throw ValidationError("q must be >= 1");
    if (!(R > 1.0) || !std::isfinite(R)) throw ValidationError("R must be > 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be > 0");
    const bool sigma_ok = allow_zero_sigma ? sigma >= 0.0 : sigma > 0.0;
    if (!sigma_ok || !std::isfinite(sigma)) throw ValidationError("sigma must be > 0");
    if (!std::isfinite(theta)) throw ValidationError("theta must be finite");
    if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
}

} // namespace ebl
