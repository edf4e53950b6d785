#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quadcurv/metric_space.hpp"
#include "quadcurv/model_geometry.hpp"

namespace quadcurv {

/// Outcome of an isometric-embedding attempt for a 4-point metric:
/// coordinates in the plane or on a sphere of some radius, or a structured
/// certificate of failure.
struct EmbeddingResult {
    enum class Target { None, Plane, Sphere };

    struct Certificate {
        enum class Kind {
            None,
            NegativeEigenvalue,       // Gram/cosine matrix not PSD
            RankExcess,               // PSD but needs more dimensions
            DistanceExceedsDiameter,  // some distance > pi*R
            NoAdmissibleRadius,       // radius scan found no PSD rank<=3 point
        };
        Kind kind = Kind::None;
        double eigenvalue = 0.0;  // offending eigenvalue where applicable
        int rank = 0;
        double radius = 0.0;  // sphere radius probed, when applicable
        double bracket_lo = 0.0, bracket_hi = 0.0;
        std::vector<std::pair<double, double>> eigen_profile;  // (R, lambda_min) probes
        std::string message;
    };

    Target target = Target::None;
    double sphere_radius = 0.0;
    std::vector<ModelPoint> coordinates;  // 4 points when target != None
    double max_distance_error = std::numeric_limits<double>::infinity();
    Certificate certificate;

    bool success() const { return target != Target::None; }
};

namespace detail {

// PSD and rank thresholds are relative to the matrix max-norm so behavior
// does not depend on the unit of length.
inline constexpr double kPsdTolFactor = 1e-10;
inline constexpr double kRankTolFactor = 1e-8;
inline constexpr double kMaxRealizationError = 1e-8;

inline void require_four_points(const FiniteMetricSpace& s) {
    if (s.size() != 4)
        throw std::invalid_argument("embedding is defined for 4-point spaces, got n=" +
                                    std::to_string(s.size()));
}

inline double max_abs(const Eigen::Matrix4d& m) {
    return std::max(m.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace detail

/// Plane embedding via the centered Gram matrix G = -1/2 J D^2 J: the
/// metric embeds in the Euclidean plane iff G is positive semidefinite of
/// rank at most 2; coordinates come from the top two eigenpairs.
inline EmbeddingResult embed_plane(const FiniteMetricSpace& space) {
    detail::require_four_points(space);
    Eigen::Matrix4d d2;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double d = space.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            d2(i, j) = d * d;
        }
    const Eigen::Matrix4d j = Eigen::Matrix4d::Identity() - Eigen::Matrix4d::Constant(0.25);
    const Eigen::Matrix4d gram = -0.5 * j * d2 * j;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(gram);
    const auto& vals = eig.eigenvalues();  // ascending
    const double norm = detail::max_abs(gram);

    EmbeddingResult res;
    if (vals(0) < -detail::kPsdTolFactor * norm) {
        res.certificate = {EmbeddingResult::Certificate::Kind::NegativeEigenvalue, vals(0), 0, 0.0,
                           0.0, 0.0, {},
                           "centered Gram matrix has negative eigenvalue " +
                               format_significant(vals(0))};
        return res;
    }
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (vals(i) > detail::kRankTolFactor * norm) ++rank;
    if (rank > 2) {
        res.certificate = {EmbeddingResult::Certificate::Kind::RankExcess, vals(1), rank, 0.0,
                           0.0, 0.0, {},
                           "metric needs rank " + std::to_string(rank) + " > 2"};
        return res;
    }

    std::vector<ModelPoint> pts;
    const double l1 = std::sqrt(std::max(0.0, vals(3)));
    const double l2 = std::sqrt(std::max(0.0, vals(2)));
    for (int i = 0; i < 4; ++i)
        pts.push_back(EuclideanPoint{{l1 * eig.eigenvectors()(i, 3), l2 * eig.eigenvectors()(i, 2)}});

    double max_err = 0.0;
    const ModelSpace plane = ModelSpace::euclidean(2);
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k)
            max_err = std::max(max_err,
                               std::abs(distance(plane, pts[static_cast<std::size_t>(i)],
                                                 pts[static_cast<std::size_t>(k)]) -
                                        space.distance(static_cast<std::size_t>(i),
                                                       static_cast<std::size_t>(k))));
    if (max_err > detail::kMaxRealizationError) {
        res.certificate = {EmbeddingResult::Certificate::Kind::RankExcess, vals(0), rank, 0.0, 0.0,
                           0.0, {},
                           "coordinates realize distances only to " + format_significant(max_err)};
        return res;
    }
    res.target = EmbeddingResult::Target::Plane;
    res.coordinates = std::move(pts);
    res.max_distance_error = max_err;
    return res;
}

namespace detail {

inline Eigen::Matrix4d sphere_cos_matrix(const FiniteMetricSpace& space, double radius) {
    Eigen::Matrix4d c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            c(i, j) = std::cos(space.distance(static_cast<std::size_t>(i),
                                              static_cast<std::size_t>(j)) /
                               radius);
    return c;
}

inline double sphere_min_eigenvalue(const FiniteMetricSpace& space, double radius) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sphere_cos_matrix(space, radius),
                                                       Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

}  // namespace detail

/// Sphere embedding at a fixed radius: the metric embeds in S^2(R) iff the
/// matrix C_ij = cos(d_ij / R) is positive semidefinite of rank at most 3;
/// coordinates come from the top three eigenpairs, rescaled to radius R.
inline EmbeddingResult embed_sphere(const FiniteMetricSpace& space, double radius) {
    detail::require_four_points(space);
    if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");

    EmbeddingResult res;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (space.distance(i, j) > std::numbers::pi * radius) {
                res.certificate = {EmbeddingResult::Certificate::Kind::DistanceExceedsDiameter,
                                   0.0, 0, radius, 0.0, 0.0, {},
                                   "d(" + space.label(i) + "," + space.label(j) + ") = " +
                                       format_significant(space.distance(i, j)) +
                                       " exceeds pi*R = " +
                                       format_significant(std::numbers::pi * radius)};
                return res;
            }

    const Eigen::Matrix4d c = detail::sphere_cos_matrix(space, radius);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(c);
    const auto& vals = eig.eigenvalues();
    const double norm = detail::max_abs(c);

    if (vals(0) < -detail::kPsdTolFactor * norm) {
        res.certificate = {EmbeddingResult::Certificate::Kind::NegativeEigenvalue, vals(0), 0,
                           radius, 0.0, 0.0, {},
                           "cosine matrix at R = " + format_significant(radius) +
                               " has negative eigenvalue " + format_significant(vals(0))};
        return res;
    }
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (vals(i) > detail::kRankTolFactor * norm) ++rank;
    if (rank > 3) {
        res.certificate = {EmbeddingResult::Certificate::Kind::RankExcess, vals(0), rank, radius,
                           0.0, 0.0, {},
                           "cosine matrix at R = " + format_significant(radius) + " has rank 4"};
        return res;
    }

    std::vector<ModelPoint> pts;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 3> v{};
        for (int k = 0; k < 3; ++k) {
            const double l = std::sqrt(std::max(0.0, vals(3 - k)));
            v[static_cast<std::size_t>(k)] = l * eig.eigenvectors()(i, 3 - k);
        }
        const double n = detail::norm3(v);
        if (n <= 0.0) {
            res.certificate = {EmbeddingResult::Certificate::Kind::RankExcess, vals(0), rank,
                               radius, 0.0, 0.0, {}, "degenerate eigenvector row"};
            return res;
        }
        pts.push_back(SpherePoint{detail::scale3(v, radius / n)});
    }

    double max_err = 0.0;
    const ModelSpace sph = ModelSpace::sphere(radius);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            max_err = std::max(max_err, std::abs(distance(sph, pts[i], pts[j]) -
                                                 space.distance(i, j)));
    if (max_err > detail::kMaxRealizationError) {
        res.certificate = {EmbeddingResult::Certificate::Kind::RankExcess, vals(0), rank, radius,
                           0.0, 0.0, {},
                           "coordinates realize distances only to " + format_significant(max_err)};
        return res;
    }
    res.target = EmbeddingResult::Target::Sphere;
    res.sphere_radius = radius;
    res.coordinates = std::move(pts);
    res.max_distance_error = max_err;
    return res;
}

namespace detail {

/// Root of lambda_min between radii of opposite sign.
inline double bisect_eigen_root(const FiniteMetricSpace& space, double a, double fa, double b) {
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = sphere_min_eigenvalue(space, mid);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

/// Golden-section extremum of lambda_min on [a, b]; maximize = false
/// searches for a minimum. Returns (argext, fext).
inline std::pair<double, double> golden_eigen_extremum(const FiniteMetricSpace& space, double a,
                                                       double b, bool maximize) {
    constexpr double kGolden = 0.6180339887498949;
    const double sign = maximize ? 1.0 : -1.0;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = sign * sphere_min_eigenvalue(space, x1);
    double f2 = sign * sphere_min_eigenvalue(space, x2);
    for (int it = 0; it < 120 && (b - a) > 1e-14 * b; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = sign * sphere_min_eigenvalue(space, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = sign * sphere_min_eigenvalue(space, x1);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, sphere_min_eigenvalue(space, x)};
}

}  // namespace detail

/// Tries the plane, then scans sphere radii R in [max_d/pi, 1000*max_d]:
/// 64 log-spaced probes of the smallest eigenvalue of the cosine matrix,
/// bisection on sign changes, and a golden-section search inside
/// sign-constant intervals (the admissible radius can sit in a narrow bump
/// or dip that the probe grid straddles). Intervals are processed in
/// ascending order and the first radius that passes the full PSD/rank/
/// realization test wins, so the result is deterministic.
inline EmbeddingResult embed_any(const FiniteMetricSpace& space) {
    detail::require_four_points(space);
    EmbeddingResult planar = embed_plane(space);
    if (planar.success()) return planar;

    const double max_d = space.max_distance();
    const double lo = max_d / std::numbers::pi;
    const double hi = 1000.0 * max_d;
    constexpr int kProbes = 64;

    std::vector<std::pair<double, double>> profile;  // (R, lambda_min)
    profile.reserve(kProbes);
    const double step = std::log(hi / lo) / (kProbes - 1);
    for (int k = 0; k < kProbes; ++k) {
        const double r = lo * std::exp(step * k);
        profile.emplace_back(r, detail::sphere_min_eigenvalue(space, r));
    }

    EmbeddingResult attempt;
    auto admissible = [&](double r) {
        attempt = embed_sphere(space, r);
        return attempt.success();
    };

    for (int k = 0; k < kProbes; ++k) {
        const auto [rk, fk] = profile[static_cast<std::size_t>(k)];
        // near-boundary probe: validate directly
        if (fk >= -detail::kPsdTolFactor && fk <= detail::kRankTolFactor && admissible(rk))
            return attempt;
        if (k + 1 == kProbes) break;
        const auto [rk1, fk1] = profile[static_cast<std::size_t>(k + 1)];
        if ((fk < 0.0) != (fk1 < 0.0)) {
            if (admissible(detail::bisect_eigen_root(space, rk, fk, rk1))) return attempt;
        } else if (fk < 0.0) {
            // hidden positive bump: maximize, then bisect both flanks
            const auto [xm, fm] = detail::golden_eigen_extremum(space, rk, rk1, true);
            if (fm >= -detail::kPsdTolFactor) {
                if (admissible(xm)) return attempt;
                if (fm > 0.0) {
                    if (admissible(detail::bisect_eigen_root(space, rk, fk, xm))) return attempt;
                    if (admissible(detail::bisect_eigen_root(space, xm, fm, rk1))) return attempt;
                }
            }
        } else {
            // hidden dip toward a rank drop
            const auto [xm, fm] = detail::golden_eigen_extremum(space, rk, rk1, false);
            if (fm <= detail::kRankTolFactor) {
                if (fm < 0.0) {
                    if (admissible(detail::bisect_eigen_root(space, rk, fk, xm))) return attempt;
                    if (admissible(detail::bisect_eigen_root(space, xm, fm, rk1))) return attempt;
                } else if (admissible(xm)) {
                    return attempt;
                }
            }
        }
    }

    EmbeddingResult res;
    res.certificate = {EmbeddingResult::Certificate::Kind::NoAdmissibleRadius,
                       planar.certificate.eigenvalue,
                       0,
                       0.0,
                       lo,
                       hi,
                       std::move(profile),
                       "no admissible sphere radius in [" + format_significant(lo) + ", " +
                           format_significant(hi) + "] (" + std::to_string(kProbes) + " probes); " +
                           "plane: " + planar.certificate.message};
    return res;
}

}  // namespace quadcurv
