#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quadcurv {

/// First metric axiom violated by an input matrix, with the offending
/// indices. TriangleViolation{i,j,k} means dist(i,j) > dist(i,k) + dist(k,j).
struct MetricViolation {
    enum class Kind {
        NonzeroDiagonal,
        NegativeDistance,
        Asymmetric,
        ZeroOffDiagonal,
        TriangleViolation,
    };
    Kind kind;
    std::size_t i = 0, j = 0, k = 0;

    std::string describe() const {
        switch (kind) {
            case Kind::NonzeroDiagonal:
                return "NonzeroDiagonal(" + std::to_string(i) + ")";
            case Kind::NegativeDistance:
                return "NegativeDistance(" + std::to_string(i) + "," + std::to_string(j) + ")";
            case Kind::Asymmetric:
                return "Asymmetric(" + std::to_string(i) + "," + std::to_string(j) + ")";
            case Kind::ZeroOffDiagonal:
                return "ZeroOffDiagonal(" + std::to_string(i) + "," + std::to_string(j) + ")";
            case Kind::TriangleViolation:
                return "TriangleViolation(" + std::to_string(i) + "," + std::to_string(j) + "," +
                       std::to_string(k) + ")";
        }
        return "UnknownViolation";
    }
};

struct MetricValidationError : std::invalid_argument {
    MetricViolation violation;
    explicit MetricValidationError(MetricViolation v)
        : std::invalid_argument(v.describe()), violation(v) {}
};

struct TooFewPointsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidEpsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Six distances of a quadruple with a distinguished apex p and base points
/// x, y, z. apex_to = {|px|, |py|, |pz|}, base = {|xy|, |yz|, |zx|}.
struct LabeledQuadruple {
    std::array<double, 3> apex_to;
    std::array<double, 3> base;

    double max_distance() const {
        double m = 0.0;
        for (double d : apex_to) m = std::max(m, d);
        for (double d : base) m = std::max(m, d);
        return m;
    }

    /// Same quadruple with the base points permuted; perm is a permutation
    /// of {0,1,2} giving the new (x,y,z) in terms of the old.
    LabeledQuadruple permuted_base(const std::array<int, 3>& perm) const {
        // base pair lookup: distance between old base points a and b
        auto between = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            if (a == 0 && b == 1) return base[0];
            if (a == 1 && b == 2) return base[1];
            return base[2];  // (0,2)
        };
        return LabeledQuadruple{
            {apex_to[static_cast<std::size_t>(perm[0])],
             apex_to[static_cast<std::size_t>(perm[1])],
             apex_to[static_cast<std::size_t>(perm[2])]},
            {between(perm[0], perm[1]), between(perm[1], perm[2]), between(perm[2], perm[0])}};
    }

    /// The induced 4x4 distance matrix, rows/cols ordered p,x,y,z.
    std::vector<std::vector<double>> as_matrix() const {
        const double px = apex_to[0], py = apex_to[1], pz = apex_to[2];
        const double xy = base[0], yz = base[1], zx = base[2];
        return {{0.0, px, py, pz}, {px, 0.0, xy, zx}, {py, xy, 0.0, yz}, {pz, zx, yz, 0.0}};
    }
};

/// An immutable, validated finite metric space: point labels plus a
/// symmetric distance matrix satisfying all metric axioms exactly
/// (no tolerance; inputs are user-provided constants).
class FiniteMetricSpace {
public:
    /// Scans axioms in a fixed order (diagonal, negativity, symmetry,
    /// zero off-diagonal, triangle inequalities), indices row-major, and
    /// reports the first violation found, or nullopt if the matrix is a
    /// valid metric.
    static std::optional<MetricViolation> check(const std::vector<std::vector<double>>& m) {
        const std::size_t n = m.size();
        using K = MetricViolation::Kind;
        for (std::size_t i = 0; i < n; ++i)
            if (m[i][i] != 0.0) return MetricViolation{K::NonzeroDiagonal, i};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (m[i][j] < 0.0) return MetricViolation{K::NegativeDistance, i, j};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (m[i][j] != m[j][i]) return MetricViolation{K::Asymmetric, i, j};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (m[i][j] == 0.0) return MetricViolation{K::ZeroOffDiagonal, i, j};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    if (m[i][j] > m[i][k] + m[k][j])
                        return MetricViolation{K::TriangleViolation, i, j, k};
                }
        return std::nullopt;
    }

    /// Validates and takes ownership; throws MetricValidationError naming the
    /// first violated axiom. Labels default to P0, P1, ... when empty.
    static FiniteMetricSpace validate(std::vector<std::vector<double>> m,
                                      std::vector<std::string> labels = {}) {
        const std::size_t n = m.size();
        if (n == 0) throw std::invalid_argument("empty distance matrix");
        for (const auto& row : m)
            if (row.size() != n) throw std::invalid_argument("distance matrix is not square");
        if (labels.empty()) {
            labels.reserve(n);
            for (std::size_t i = 0; i < n; ++i) labels.push_back("P" + std::to_string(i));
        }
        if (labels.size() != n)
            throw std::invalid_argument("label count does not match matrix size");
        if (auto v = check(m)) throw MetricValidationError(*v);
        return FiniteMetricSpace(std::move(m), std::move(labels));
    }

    std::size_t size() const { return dist_.size(); }
    double distance(std::size_t i, std::size_t j) const { return dist_[i][j]; }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::vector<double>>& matrix() const { return dist_; }

    double max_distance() const {
        double m = 0.0;
        for (const auto& row : dist_)
            for (double d : row) m = std::max(m, d);
        return m;
    }

    /// The quadruple with apex p and base x,y,z at the given indices.
    LabeledQuadruple quadruple(std::size_t p, std::size_t x, std::size_t y, std::size_t z) const {
        return LabeledQuadruple{{dist_[p][x], dist_[p][y], dist_[p][z]},
                                {dist_[x][y], dist_[y][z], dist_[z][x]}};
    }

private:
    FiniteMetricSpace(std::vector<std::vector<double>> m, std::vector<std::string> labels)
        : dist_(std::move(m)), labels_(std::move(labels)) {}

    std::vector<std::vector<double>> dist_;
    std::vector<std::string> labels_;
};

/// One labeling of a 4-subset: indices into the parent space, apex first.
struct QuadrupleLabeling {
    std::array<std::size_t, 4> indices;  // {p, x, y, z}
    LabeledQuadruple quad;
};

/// Every apex choice over every unordered 4-subset: C(n,4) * 4 labelings.
/// Base order is the remaining indices ascending; the conditions evaluated
/// on these are symmetric in the base points, so apex choice is the only
/// labeling degree of freedom that matters (all_labelings enumerates the
/// full 24 per subset for the debug cross-check).
inline std::vector<QuadrupleLabeling> quadruples(const FiniteMetricSpace& s) {
    const std::size_t n = s.size();
    if (n < 4) throw TooFewPointsError("need at least 4 points, have " + std::to_string(n));
    std::vector<QuadrupleLabeling> out;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    const std::array<std::size_t, 4> sub{a, b, c, d};
                    for (std::size_t ap = 0; ap < 4; ++ap) {
                        std::array<std::size_t, 4> idx;
                        idx[0] = sub[ap];
                        std::size_t w = 1;
                        for (std::size_t r = 0; r < 4; ++r)
                            if (r != ap) idx[w++] = sub[r];
                        out.push_back({idx, s.quadruple(idx[0], idx[1], idx[2], idx[3])});
                    }
                }
    return out;
}

/// All 24 ordered labelings per 4-subset (debug mode).
inline std::vector<QuadrupleLabeling> all_labelings(const FiniteMetricSpace& s) {
    const std::size_t n = s.size();
    if (n < 4) throw TooFewPointsError("need at least 4 points, have " + std::to_string(n));
    std::vector<QuadrupleLabeling> out;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    std::array<std::size_t, 4> idx{a, b, c, d};
                    std::sort(idx.begin(), idx.end());
                    do {
                        out.push_back({idx, s.quadruple(idx[0], idx[1], idx[2], idx[3])});
                    } while (std::next_permutation(idx.begin(), idx.end()));
                }
    return out;
}

/// The 4-point space {p,x,y,z} with |px|=|py|=|pz|=1, |xy|=|xz|=2, |yz|=eps.
/// A valid metric for eps in (0,2]. Its apex-p squared-distance residual is
/// (1-eps^2)/3 (the binding labeling; the others give (25-eps^2)/3 and
/// 3+eps^2), so the residual stays nonnegative for every labeling exactly
/// when eps <= 1, while the apex-p model-angle sum exceeds 2*pi by
/// 2*arcsin(eps/2) for every eps in range.
inline FiniteMetricSpace counterexample_f(double eps) {
    if (!(eps > 0.0) || eps > 2.0)
        throw InvalidEpsError("eps must lie in (0,2], got " + std::to_string(eps));
    std::vector<std::vector<double>> m{{0.0, 1.0, 1.0, 1.0},
                                       {1.0, 0.0, 2.0, 2.0},
                                       {1.0, 2.0, 0.0, eps},
                                       {1.0, 2.0, eps, 0.0}};
    return FiniteMetricSpace::validate(std::move(m), {"p", "x", "y", "z"});
}

/// Largest eps for which counterexample_f satisfies the squared-distance
/// condition under every relabeling.
inline constexpr double kCounterexampleFMaxEps = 1.0;

/// Smallest eps at which the no-embedding part of the pattern is asserted.
/// The embedding obstruction of this construction scales like eps^2, so
/// below roughly 1e-3 a perturbation within the 1e-8 realization tolerance
/// genuinely embeds and the numerical verdict flips; 1e-2 keeps an order
/// of magnitude of margin.
inline constexpr double kCounterexampleFMinAssertedEps = 1e-2;

}  // namespace quadcurv
