#pragma once

namespace lmg {

// Physical parameters of the dissipative collective-spin model with
// jump-conditioned feedback. Energies are in units of the field h and time
// in units of 1/h; theta_* are dimensionless control angles.
struct ModelParams {
    int n_spins = 2;
    double h = 1.0;
    double gamma_x = 0.0;
    double kappa = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double theta_z = 0.0;
};

// Throws invalid_argument unless n_spins >= 1, kappa >= 0, h != 0 and all
// fields are finite.
void validate(const ModelParams& params);

}  // namespace lmg
