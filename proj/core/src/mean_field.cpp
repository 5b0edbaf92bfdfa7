#include "lmg/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "lmg/errors.hpp"

namespace lmg {

namespace {

constexpr double kStabilityTol = 1e-10;
constexpr double kRootResidualTol = 1e-10;
constexpr double kRootDedupeTol = 1e-6;

Eigen::Vector3d to_vec(const MeanFieldState& s) {
    return Eigen::Vector3d(s.x, s.y, s.z);
}

MeanFieldState from_vec(const Eigen::Vector3d& v) {
    return MeanFieldState{v(0), v(1), v(2)};
}

Stability stability_from_pair(
    const std::array<std::complex<double>, 2>& tangent) {
    const double re0 = tangent[0].real();
    const double re1 = tangent[1].real();
    if (re0 > kStabilityTol || re1 > kStabilityTol) return Stability::unstable;
    if (re0 < -kStabilityTol && re1 < -kStabilityTol) return Stability::stable;
    return Stability::marginal;
}

// Deterministic quasi-uniform seed lattice on the unit sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(int count) {
    std::vector<Eigen::Vector3d> points;
    points.reserve(static_cast<size_t>(count));
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * M_PI * (i / golden - std::floor(i / golden));
        points.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return points;
}

}  // namespace

MeanFieldState mf_rhs(const MeanFieldState& s, const ModelParams& params) {
    const double h = params.h;
    const double g = params.gamma_x;
    const double k2 = 0.5 * params.kappa;
    return MeanFieldState{
        h * s.y - k2 * s.z * s.x,
        -h * s.x + g * s.z * s.x - k2 * s.z * s.y,
        -g * s.x * s.y + k2 * (s.x * s.x + s.y * s.y)};
}

Eigen::Matrix3d mf_jacobian(const MeanFieldState& s,
                            const ModelParams& params) {
    const double h = params.h;
    const double g = params.gamma_x;
    const double k2 = 0.5 * params.kappa;
    Eigen::Matrix3d jac;
    jac << -k2 * s.z, h, -k2 * s.x,
           -h + g * s.z, -k2 * s.z, g * s.x - k2 * s.y,
           -g * s.y + 2.0 * k2 * s.x, -g * s.x + 2.0 * k2 * s.y, 0.0;
    return jac;
}

std::array<std::complex<double>, 2> mf_tangent_eigenvalues(
    const MeanFieldState& s, const ModelParams& params) {
    const Eigen::Vector3d v = to_vec(s);
    const double norm = v.norm();
    if (norm < 1e-12) {
        throw invalid_argument(
            "mf_tangent_eigenvalues: state is at the origin, no tangent "
            "plane");
    }
    const Eigen::Vector3d radial = v / norm;

    Eigen::Vector3d helper = std::abs(radial.z()) < 0.9
                                 ? Eigen::Vector3d::UnitZ()
                                 : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d t1 = radial.cross(helper).normalized();
    const Eigen::Vector3d t2 = radial.cross(t1);

    const Eigen::Matrix3d jac = mf_jacobian(s, params);
    Eigen::Matrix2d projected;
    projected << t1.dot(jac * t1), t1.dot(jac * t2),
                 t2.dot(jac * t1), t2.dot(jac * t2);

    const double tr = projected.trace();
    const double det = projected.determinant();
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

FixedPoint classify_fixed_point(const MeanFieldState& s,
                                const ModelParams& params) {
    FixedPoint fp;
    fp.state = s;

    const Eigen::Matrix3d jac = mf_jacobian(s, params);
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(jac);
    for (int i = 0; i < 3; ++i) {
        fp.eigenvalues[static_cast<size_t>(i)] = solver.eigenvalues()(i);
    }

    const auto tangent = mf_tangent_eigenvalues(s, params);
    fp.re_lambda_max = std::max(tangent[0].real(), tangent[1].real());
    fp.stability = stability_from_pair(tangent);
    return fp;
}

std::vector<FixedPoint> mf_fixed_points(const ModelParams& params) {
    validate(params);
    if (params.gamma_x < 0.0) {
        throw invalid_argument("mf_fixed_points: requires gamma_x >= 0");
    }
    const double h = params.h;
    const double g = params.gamma_x;
    const double kappa = params.kappa;

    std::vector<FixedPoint> points;
    points.push_back(classify_fixed_point(MeanFieldState{0.0, 0.0, 1.0},
                                          params));

    if (kappa == 0.0) {
        if (g > h) {
            const double z = h / g;
            const double x = std::sqrt(1.0 - z * z);
            points.push_back(
                classify_fixed_point(MeanFieldState{x, 0.0, z}, params));
            points.push_back(
                classify_fixed_point(MeanFieldState{-x, 0.0, z}, params));
        }
        return points;
    }

    if (g < kappa) return points;
    const double b = std::sqrt(g * g - kappa * kappa);
    const double a_plus = kappa * kappa + 4.0 * h * h;
    const double a_minus = kappa * kappa - 4.0 * h * h;
    const double arg = a_minus + (b / g) * a_plus;
    if (arg <= 0.0) return points;

    const double x = std::sqrt(arg) / (std::sqrt(2.0) * kappa);
    const double z = (2.0 * h / (kappa * kappa)) * (g - b);
    const double y = (kappa / (2.0 * h)) * x * z;
    for (double sign : {1.0, -1.0}) {
        const MeanFieldState s{sign * x, sign * y, z};
        const Eigen::Vector3d v = to_vec(s);
        // The closed form lands on the unit sphere identically; anything off
        // it would not be a Bloch state and signals a parameter corner where
        // the expressions lose meaning.
        if (std::abs(v.norm() - 1.0) > 1e-8) continue;
        points.push_back(classify_fixed_point(s, params));
    }
    return points;
}

double mf_critical_coupling(const ModelParams& params) {
    if (!(params.h > 0.0)) {
        throw invalid_argument("mf_critical_coupling: requires h > 0");
    }
    return params.h + params.kappa * params.kappa / (4.0 * params.h);
}

double mf_bisect_critical(const ModelParams& params, double gamma_lo,
                          double gamma_hi, int iterations) {
    if (!(gamma_lo < gamma_hi)) {
        throw invalid_argument("mf_bisect_critical: need gamma_lo < gamma_hi");
    }
    const MeanFieldState north{0.0, 0.0, 1.0};
    const auto rate = [&](double gamma) {
        ModelParams p = params;
        p.gamma_x = gamma;
        const auto tangent = mf_tangent_eigenvalues(north, p);
        return std::max(tangent[0].real(), tangent[1].real());
    };
    double f_lo = rate(gamma_lo);
    double f_hi = rate(gamma_hi);
    if (f_lo >= 0.0 || f_hi <= 0.0) {
        throw invalid_argument(
            "mf_bisect_critical: bracket does not straddle the instability "
            "onset");
    }
    double lo = gamma_lo;
    double hi = gamma_hi;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (rate(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<MeanFieldState> mf_integrate(const MeanFieldState& s0,
                                         const ModelParams& params,
                                         double t_final, double dt,
                                         int max_samples) {
    validate(params);
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw invalid_argument("mf_integrate: t_final must be >= 0");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw invalid_argument("mf_integrate: dt must be positive");
    }
    if (max_samples < 2) {
        throw invalid_argument("mf_integrate: max_samples must be >= 2");
    }
    if (std::abs(to_vec(s0).norm() - 1.0) > 1e-8) {
        throw invalid_argument(
            "mf_integrate: start state must lie on the unit sphere");
    }

    const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
    const long stride =
        std::max<long>(1, (n_steps + max_samples - 1) / max_samples);

    const double norm0 = to_vec(s0).norm();
    std::vector<MeanFieldState> samples;
    samples.push_back(s0);

    const auto rhs = [&](const Eigen::Vector3d& v) {
        return to_vec(mf_rhs(from_vec(v), params));
    };

    Eigen::Vector3d s = to_vec(s0);
    for (long i = 1; i <= n_steps; ++i) {
        const double step_dt =
            (i == n_steps) ? t_final - double(n_steps - 1) * dt : dt;
        const Eigen::Vector3d k1 = rhs(s);
        const Eigen::Vector3d k2 = rhs(s + (0.5 * step_dt) * k1);
        const Eigen::Vector3d k3 = rhs(s + (0.5 * step_dt) * k2);
        const Eigen::Vector3d k4 = rhs(s + step_dt * k3);
        s += (step_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (std::abs(s.norm() - norm0) > 1e-6) {
            throw step_size_error(
                "mf_integrate: Bloch-vector norm drifted beyond 1e-6; the "
                "step size is too large");
        }
        if (i % stride == 0 && i != n_steps) {
            samples.push_back(from_vec(s));
        }
    }
    if (n_steps > 0) samples.push_back(from_vec(s));
    return samples;
}

std::vector<BranchPoint> mf_bifurcation_scan(
    const ModelParams& params, const std::vector<double>& gamma_grid) {
    validate(params);
    if (gamma_grid.empty()) {
        throw invalid_argument("mf_bifurcation_scan: empty grid");
    }
    for (size_t i = 1; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > gamma_grid[i - 1])) {
            throw invalid_argument("mf_bifurcation_scan: grid must ascend");
        }
    }

    const auto seeds = fibonacci_sphere(32);
    std::vector<BranchPoint> out;

    for (double gamma : gamma_grid) {
        ModelParams p = params;
        p.gamma_x = gamma;

        std::vector<MeanFieldState> roots;
        std::vector<int> ids;
        for (const FixedPoint& fp : mf_fixed_points(p)) {
            roots.push_back(fp.state);
            ids.push_back(static_cast<int>(ids.size()));  // 0, then 1, 2
        }
        int next_id = 3;

        for (const Eigen::Vector3d& seed : seeds) {
            // Newton on the augmented system [F(s); |s|^2 - 1]: the flow
            // Jacobian alone is singular along the radius on the invariant
            // sphere, the norm row restores full rank.
            Eigen::Vector3d s = seed;
            bool converged = false;
            for (int iter = 0; iter < 60; ++iter) {
                const Eigen::Vector3d f = to_vec(mf_rhs(from_vec(s), p));
                if (f.lpNorm<Eigen::Infinity>() < 1e-13) {
                    converged = true;
                    break;
                }
                Eigen::Matrix<double, 4, 3> a;
                a.topRows<3>() = mf_jacobian(from_vec(s), p);
                a.bottomRows<1>() = 2.0 * s.transpose();
                Eigen::Vector4d b;
                b << -f, 1.0 - s.squaredNorm();
                const Eigen::Vector3d delta =
                    a.colPivHouseholderQr().solve(b);
                s += delta;
                if (!s.allFinite()) break;
            }
            if (!converged) continue;
            if (to_vec(mf_rhs(from_vec(s), p)).lpNorm<Eigen::Infinity>() >
                kRootResidualTol) {
                continue;
            }
            bool known = false;
            for (const MeanFieldState& r : roots) {
                if ((to_vec(r) - s).norm() < kRootDedupeTol) {
                    known = true;
                    break;
                }
            }
            if (known) continue;
            roots.push_back(from_vec(s));
            ids.push_back(next_id++);
        }

        for (size_t i = 0; i < roots.size(); ++i) {
            const FixedPoint fp = classify_fixed_point(roots[i], p);
            out.push_back(BranchPoint{gamma, ids[i], fp.state, fp.stability,
                                      fp.re_lambda_max});
        }
    }
    return out;
}

}  // namespace lmg
