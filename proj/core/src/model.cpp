#include "lmg/model.hpp"

#include <cmath>
#include <string>

#include "lmg/errors.hpp"

namespace lmg {

void validate(const ModelParams& params) {
    if (params.n_spins < 1) {
        throw invalid_argument("model: n_spins must be >= 1, got " +
                               std::to_string(params.n_spins));
    }
    if (params.h == 0.0 || !std::isfinite(params.h)) {
        throw invalid_argument("model: h must be nonzero and finite, got " +
                               std::to_string(params.h));
    }
    if (params.kappa < 0.0 || !std::isfinite(params.kappa)) {
        throw invalid_argument("model: kappa must be >= 0 and finite, got " +
                               std::to_string(params.kappa));
    }
    if (!std::isfinite(params.gamma_x)) {
        throw invalid_argument("model: gamma_x must be finite");
    }
    if (!std::isfinite(params.theta_x) || !std::isfinite(params.theta_y) ||
        !std::isfinite(params.theta_z)) {
        throw invalid_argument("model: feedback angles must be finite");
    }
}

}  // namespace lmg
