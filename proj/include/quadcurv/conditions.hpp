#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quadcurv/metric_space.hpp"
#include "quadcurv/model_geometry.hpp"

namespace quadcurv {

/// Signed slack of a condition, normalized so that the condition holds
/// iff value >= 0 (every condition below follows this convention).
struct Residual {
    double value = 0.0;
    bool holds(double tol = 0.0) const { return value >= -tol; }
};

struct Tolerance {
    double eps_pass = 1e-9;
};

struct AngleDomainError : std::domain_error {
    /// which base pair failed: 0 -> (x,y), 1 -> (y,z), 2 -> (z,x)
    int pair_index;
    AngleDomainError(int pair, const std::string& why)
        : std::domain_error("model angle for base pair " + std::to_string(pair) + ": " + why),
          pair_index(pair) {}
};

namespace detail {

/// Sum of three values in sorted order. Keeps every residual exactly
/// invariant under permutations of the base points (plain left-to-right
/// summation differs in the last ulp between orderings).
inline double sym_sum3(double a, double b, double c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a + b) + c;
}

}  // namespace detail

/// Squared-distance quadruple residual:
///   |px|^2 + |py|^2 + |pz|^2 - (|xy|^2 + |yz|^2 + |zx|^2) / 3.
/// Nonnegative for every quadruple of a nonnegatively curved space; equals
/// 3*|p - centroid(x,y,z)|^2 in Euclidean space.
inline Residual star_residual(const LabeledQuadruple& q) {
    const auto& a = q.apex_to;
    const auto& b = q.base;
    const double apex = detail::sym_sum3(a[0] * a[0], a[1] * a[1], a[2] * a[2]);
    const double base = detail::sym_sum3(b[0] * b[0], b[1] * b[1], b[2] * b[2]);
    return Residual{apex - base / 3.0};
}

/// Model-angle quadruple residual:
///   2*pi - (ang(p;x,y) + ang(p;y,z) + ang(p;z,x))
/// with comparison angles taken in the model plane of curvature kappa.
/// Throws AngleDomainError naming the base pair whose triangle cannot be
/// realized in that model plane.
inline Residual one_plus_three_residual(const LabeledQuadruple& q, Kappa kappa) {
    const auto& a = q.apex_to;
    const auto& b = q.base;
    std::array<double, 3> ang;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        try {
            ang[static_cast<std::size_t>(i)] = comparison_angle(a[static_cast<std::size_t>(i)],
                                                                a[static_cast<std::size_t>(j)],
                                                                b[static_cast<std::size_t>(i)], kappa);
        } catch (const std::domain_error& e) {
            throw AngleDomainError(i, e.what());
        }
    }
    return Residual{2.0 * std::numbers::pi - detail::sym_sum3(ang[0], ang[1], ang[2])};
}

/// Curvature >= 1 quadruple residual, from the model-plane inequality
///   (sum_i cos|px^i|)^2 <= sum_{i,j} cos|x^i x^j|
/// (nine-term double sum, three diagonal cos 0 = 1 terms). The returned
/// residual is the gap divided by 3, which makes it agree with
/// star_residual to fourth order for small quadruples; the sign is
/// unchanged. Requires all six distances <= pi.
inline Residual star_plus_residual(const LabeledQuadruple& q) {
    for (double d : q.apex_to)
        if (d > std::numbers::pi) throw ModelDomainError("distance exceeds pi");
    for (double d : q.base)
        if (d > std::numbers::pi) throw ModelDomainError("distance exceeds pi");
    const auto& a = q.apex_to;
    const auto& b = q.base;
    const double apex = detail::sym_sum3(std::cos(a[0]), std::cos(a[1]), std::cos(a[2]));
    const double base =
        3.0 + 2.0 * detail::sym_sum3(std::cos(b[0]), std::cos(b[1]), std::cos(b[2]));
    return Residual{(base - apex * apex) / 3.0};
}

/// Curvature >= -1 quadruple residual, from
///   (sum_i cosh|px^i|)^2 >= sum_{i,j} cosh|x^i x^j|,
/// same nine-term reading and the same 1/3 normalization as
/// star_plus_residual.
inline Residual star_minus_residual(const LabeledQuadruple& q) {
    const auto& a = q.apex_to;
    const auto& b = q.base;
    const double apex = detail::sym_sum3(std::cosh(a[0]), std::cosh(a[1]), std::cosh(a[2]));
    const double base =
        3.0 + 2.0 * detail::sym_sum3(std::cosh(b[0]), std::cosh(b[1]), std::cosh(b[2]));
    return Residual{(apex * apex - base) / 3.0};
}

/// Midpoint estimates for z the midpoint of [pq]: the pair
///   ( 2|xz|^2 - (|xp|^2 + |xq|^2 - |pq|^2/2),
///     3|xz|^2 - (|xp|^2 + |xq|^2 - |pq|^2/2) ).
/// The first is the median bound (equality in Euclidean space), the second
/// is the weaker bound that follows from one application of star_residual.
inline std::pair<Residual, Residual> midpoint_residuals(double xp, double xq, double pq,
                                                        double xz) {
    const double rhs = xp * xp + xq * xq - 0.5 * pq * pq;
    const double xz2 = xz * xz;
    return {Residual{2.0 * xz2 - rhs}, Residual{3.0 * xz2 - rhs}};
}

// ---------------------------------------------------------------------------
// all-labelings sweep
// ---------------------------------------------------------------------------

enum class Verdict { Pass, Fail, NotApplicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::NotApplicable: return "NOT APPLICABLE";
    }
    return "?";
}

enum class Condition { Star, OnePlusThree, StarPlus, StarMinus };

inline const char* to_string(Condition c) {
    switch (c) {
        case Condition::Star: return "star";
        case Condition::OnePlusThree: return "one_plus_three";
        case Condition::StarPlus: return "star_plus";
        case Condition::StarMinus: return "star_minus";
    }
    return "?";
}

inline Condition condition_from_string(const std::string& name) {
    if (name == "star") return Condition::Star;
    if (name == "one_plus_three") return Condition::OnePlusThree;
    if (name == "star_plus") return Condition::StarPlus;
    if (name == "star_minus") return Condition::StarMinus;
    throw std::invalid_argument("unknown condition: " + name);
}

struct ConditionStat {
    Condition condition;
    bool applicable = true;
    std::size_t labelings = 0;        // labelings evaluated
    std::size_t domain_failures = 0;  // labelings skipped on angle-domain errors
    double min_residual = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 4> worst_labeling{};  // indices, apex first
    Verdict verdict = Verdict::NotApplicable;
};

struct ConditionReport {
    Kappa angle_kappa;
    double tolerance = 1e-9;
    std::vector<ConditionStat> conditions;

    const ConditionStat& stat(Condition c) const {
        for (const auto& s : conditions)
            if (s.condition == c) return s;
        throw std::logic_error("condition missing from report");
    }

    bool all_pass() const {
        for (const auto& s : conditions)
            if (s.applicable && s.verdict == Verdict::Fail) return false;
        return true;
    }
};

enum class LabelingMode { ApexOnly, Exhaustive };

/// Minimum residual over every apex labeling of every 4-subset, for each
/// condition. Angle-domain failures are counted per labeling, not fatal.
/// star_plus is reported NOT APPLICABLE on spaces with a distance > pi.
/// Exhaustive mode sweeps all 24 labelings per subset instead of 4; the
/// residuals are base-permutation invariant, so the reports must agree
/// (asserted in tests).
inline ConditionReport check_all_labelings(const FiniteMetricSpace& space, Kappa angle_kappa,
                                           Tolerance tol = {},
                                           LabelingMode mode = LabelingMode::ApexOnly) {
    const auto labelings =
        (mode == LabelingMode::ApexOnly) ? quadruples(space) : all_labelings(space);
    const bool plus_applicable = space.max_distance() <= std::numbers::pi;

    ConditionReport report;
    report.angle_kappa = angle_kappa;
    report.tolerance = tol.eps_pass;
    report.conditions = {ConditionStat{Condition::Star}, ConditionStat{Condition::OnePlusThree},
                         ConditionStat{Condition::StarPlus, plus_applicable},
                         ConditionStat{Condition::StarMinus}};
    auto& star = report.conditions[0];
    auto& angles = report.conditions[1];
    auto& plus = report.conditions[2];
    auto& minus = report.conditions[3];

    auto record = [](ConditionStat& s, double value, const std::array<std::size_t, 4>& idx) {
        ++s.labelings;
        if (value < s.min_residual) {
            s.min_residual = value;
            s.worst_labeling = idx;
        }
    };

    for (const auto& l : labelings) {
        record(star, star_residual(l.quad).value, l.indices);
        try {
            record(angles, one_plus_three_residual(l.quad, angle_kappa).value, l.indices);
        } catch (const AngleDomainError&) {
            ++angles.domain_failures;
        }
        if (plus_applicable) record(plus, star_plus_residual(l.quad).value, l.indices);
        record(minus, star_minus_residual(l.quad).value, l.indices);
    }

    for (auto& s : report.conditions) {
        if (!s.applicable || s.labelings == 0) {
            s.verdict = Verdict::NotApplicable;
            continue;
        }
        s.verdict = (s.min_residual >= -tol.eps_pass) ? Verdict::Pass : Verdict::Fail;
    }
    return report;
}

}  // namespace quadcurv
