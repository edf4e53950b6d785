// quadcurv: four-point curvature-condition toolkit, command-line front end.
//
// Exit codes, stable across subcommands:
//   0  all requested checks pass
//   1  a condition, embedding, or campaign assertion failed
//   2  input or parameter error

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "quadcurv/quadcurv.hpp"

namespace {

using namespace quadcurv;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInputError = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QUADCURV_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            std::cerr << "warning: ignoring unparseable QUADCURV_SEED\n";
        }
    }
    return 0;
}

struct SpaceSpec {
    std::string name = "euclidean";
    std::size_t dim = 2;
    double radius = 1.0;  // sphere radius, or sampling radius bound elsewhere
    double kappa = -1.0;
    double theta = 1.5 * std::numbers::pi;

    ModelSpace build() const {
        if (name == "euclidean") return ModelSpace::euclidean(dim);
        if (name == "sphere") return ModelSpace::sphere(radius);
        if (name == "hyperbolic") return ModelSpace::hyperbolic(kappa);
        if (name == "cone") return ModelSpace::cone(theta);
        throw std::invalid_argument("unknown space: " + name);
    }

    double sampling_bound() const { return radius; }
};

void add_space_flags(CLI::App* cmd, SpaceSpec& spec) {
    cmd->add_option("--space", spec.name, "euclidean | sphere | hyperbolic | cone | random-metric")
        ->default_val("euclidean");
    cmd->add_option("--dim", spec.dim, "dimension (euclidean)")->default_val(2);
    cmd->add_option("--radius", spec.radius,
                    "sphere radius; sampling radius bound for the other spaces")
        ->default_val(1.0);
    cmd->add_option("--kappa", spec.kappa, "curvature (hyperbolic, < 0)")->default_val(-1.0);
    cmd->add_option("--theta", spec.theta, "cone total angle")->default_val(1.5 * std::numbers::pi);
}

ModelPoint parse_point(const ModelSpace& space, const std::vector<double>& coords) {
    if (const auto* e = space.get_if<Euclidean>()) {
        if (coords.size() != e->dim)
            throw std::invalid_argument("expected " + std::to_string(e->dim) + " coordinates");
        return EuclideanPoint{coords};
    }
    if (const auto* s = space.get_if<Sphere>()) {
        if (coords.size() != 3) throw std::invalid_argument("sphere points need 3 coordinates");
        std::array<double, 3> v{coords[0], coords[1], coords[2]};
        const double n = detail::norm3(v);
        if (n <= 0.0) throw std::invalid_argument("zero vector cannot be projected to the sphere");
        return SpherePoint{detail::scale3(v, s->radius / n)};
    }
    if (const auto* h = space.get_if<Hyperbolic>()) {
        // user gives the space-like part (x1, x2); x0 follows from the sheet
        if (coords.size() != 2)
            throw std::invalid_argument("hyperbolic points need 2 coordinates (x1, x2)");
        const double s2 = -1.0 / h->kappa;
        const double x0 = std::sqrt(s2 + coords[0] * coords[0] + coords[1] * coords[1]);
        return HyperbolicPoint{{x0, coords[0], coords[1]}};
    }
    throw std::invalid_argument("iterate supports euclidean, sphere and hyperbolic spaces");
}

int cmd_check(const std::string& path, double kappa, double tol, bool as_json) {
    const FiniteMetricSpace space = io::read_metric_file(path);
    const ConditionReport report = check_all_labelings(space, Kappa{kappa}, Tolerance{tol});
    if (as_json)
        std::cout << io::to_json(report, space.labels()).dump(2) << "\n";
    else
        std::cout << io::render_text(report, space.labels());
    return report.all_pass() ? kExitPass : kExitFail;
}

int cmd_embed(const std::string& path, bool as_json) {
    const FiniteMetricSpace space = io::read_metric_file(path);
    const EmbeddingResult res = embed_any(space);
    if (as_json)
        std::cout << io::to_json(res, space.labels()).dump(2) << "\n";
    else
        std::cout << io::render_text(res, space.labels());
    return res.success() ? kExitPass : kExitFail;
}

int cmd_sample(const SpaceSpec& spec, std::size_t count, std::uint64_t seed, double tol,
               const std::vector<std::string>& condition_names, const std::string& csv_path,
               bool as_json) {
    std::vector<Condition> which = all_conditions();
    if (!condition_names.empty()) {
        which.clear();
        for (const auto& name : condition_names) which.push_back(condition_from_string(name));
    }
    Campaign campaign;
    if (spec.name == "random-metric") {
        campaign = run_implication_test(count, seed, Tolerance{tol});
    } else {
        const ModelSpace space = spec.build();
        if (space.nonnegatively_curved())
            campaign = run_positivity(space, count, seed, spec.sampling_bound(), Tolerance{tol},
                                      Kappa{0.0}, which);
        else if (space.get_if<Hyperbolic>())
            campaign = run_violation_search(space, count, seed, spec.sampling_bound(),
                                            Tolerance{tol});
        else
            throw std::invalid_argument(space.describe() +
                                        " is not nonnegatively curved; no campaign applies");
    }
    if (as_json)
        std::cout << io::to_json(campaign).dump(2) << "\n";
    else
        std::cout << io::render_text(campaign);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) {
            std::cerr << "error: cannot write " << csv_path << "\n";
            return kExitInputError;
        }
        out << io::histogram_csv(campaign);
    }
    return campaign.falsifying ? kExitFail : kExitPass;
}

int cmd_iterate(const SpaceSpec& spec, const std::vector<double>& p, const std::vector<double>& q,
                const std::vector<double>& x, std::size_t n_max, double tol, bool as_json) {
    const ModelSpace space = spec.build();
    const ModelPoint pp = parse_point(space, p);
    const ModelPoint qq = parse_point(space, q);
    const ModelPoint xx = parse_point(space, x);
    const IterationTrace trace = run_iteration(space, pp, qq, xx, n_max);
    if (as_json)
        std::cout << io::to_json(trace).dump(2) << "\n";
    else
        std::cout << io::render_text(trace);
    const auto ok = verify_recursion(trace, tol);
    for (bool b : ok)
        if (!b) return kExitFail;
    return kExitPass;
}

int cmd_counterexample(std::vector<double> eps_list, double tol, bool as_json) {
    if (eps_list.empty()) eps_list = {0.01, 0.1};
    const CounterexampleReport rep = reproduce_counterexample(eps_list, Tolerance{tol});
    if (as_json)
        std::cout << io::to_json(rep).dump(2) << "\n";
    else
        std::cout << io::render_text(rep);
    return rep.all_hold() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadcurv: four-point curvature-bound condition toolkit"};
    app.require_subcommand(1);

    double tol = 1e-9;
    app.add_option("--tol", tol, "pass tolerance for residuals")->default_val(1e-9);
    bool as_json = false;
    app.add_flag("--json", as_json, "emit reports as JSON");

    auto* check = app.add_subcommand("check", "evaluate every condition on a metric file");
    std::string check_path;
    double check_kappa = 0.0;
    check->add_option("file", check_path, "metric file (JSON, format 1)")->required();
    check->add_option("--kappa", check_kappa, "model-plane curvature for the angle condition")
        ->default_val(0.0);

    auto* embed = app.add_subcommand("embed", "embed a 4-point metric into the plane or a sphere");
    std::string embed_path;
    embed->add_option("file", embed_path, "metric file (JSON, format 1)")->required();

    auto* sampled = app.add_subcommand("sample", "Monte Carlo campaign on a model space");
    SpaceSpec sample_spec;
    add_space_flags(sampled, sample_spec);
    std::size_t count = 10000;
    std::uint64_t seed = default_seed();
    std::string csv_path;
    std::vector<std::string> condition_names;
    sampled->add_option("--count", count, "number of sampled quadruples")->default_val(10000);
    sampled->add_option("--seed", seed, "random seed (default: QUADCURV_SEED or 0)");
    sampled->add_option("--csv", csv_path, "write residual histograms as CSV");
    sampled
        ->add_option("--conditions", condition_names,
                     "conditions to evaluate in positivity campaigns "
                     "(star, one_plus_three, star_plus, star_minus; default all)")
        ->delimiter(',');

    auto* iterate = app.add_subcommand("iterate", "run the midpoint iteration trace");
    SpaceSpec iter_spec;
    add_space_flags(iterate, iter_spec);
    std::vector<double> pt_p, pt_q, pt_x;
    std::size_t n_max = 12;
    iterate->add_option("--p", pt_p, "coordinates of p")->required()->delimiter(',');
    iterate->add_option("--q", pt_q, "coordinates of q")->required()->delimiter(',');
    iterate->add_option("--x", pt_x, "coordinates of x")->required()->delimiter(',');
    iterate->add_option("--n-max", n_max, "number of contraction steps")->default_val(12);

    auto* counter = app.add_subcommand("counterexample",
                                       "reproduce the four-point counterexample pattern");
    std::vector<double> eps_list;
    counter->add_option("--eps", eps_list, "eps values (repeatable; default 0.01 and 0.1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check) return cmd_check(check_path, check_kappa, tol, as_json);
        if (*embed) return cmd_embed(embed_path, as_json);
        if (*sampled)
            return cmd_sample(sample_spec, count, seed, tol, condition_names, csv_path, as_json);
        if (*iterate) return cmd_iterate(iter_spec, pt_p, pt_q, pt_x, n_max, tol, as_json);
        if (*counter) return cmd_counterexample(eps_list, tol, as_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
