// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "freqlab/caloric.hpp"
#include "freqlab/error.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/harness/config.hpp"
#include "freqlab/harness/json_text.hpp"
#include "freqlab/harness/registry.hpp"
#include "freqlab/harness/scenario.hpp"
#include "freqlab/harness/sweep.hpp"
#include "freqlab/norms.hpp"
#include "freqlab/uc_bounds.hpp"

using namespace freqlab;
using namespace freqlab::harness;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!pass) return;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Field random_field(const Grid& g, std::uint64_t seed, int modes = 6) {
    InitialData d;
    d.kind = InitialData::Kind::FourierRandom;
    d.seed = seed;
    d.random_modes = modes;
    return make_initial_field(g, d);
}

SolutionTrajectory solve(const Grid& g, double T, std::size_t steps, const CoefficientField& c, const Field& u0) {
    return solve_trajectory(g, TimeGrid::make(T, steps), c, u0);
}

Grid interval(std::size_t n) { return build_grid(Domain::interval(0.0, 1.0), {n}); }

// ---------------------------------------------------------------------------

Verdict caloric() {
    Verdict v;
    std::mt19937_64 gen(101);
    double worst = 0.0;
    int bad_ratio = 0;
    double rmin = 1e300, rmax = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const std::size_t n = 1 + s % 2;
        const double T = uniform(gen, 0.05, 1.0);
        const auto w = CaloricWeight::make(std::pow(10.0, uniform(gen, -3, 0)), {uniform(gen), uniform(gen)}, T, n);
        const Point x{uniform(gen), uniform(gen)};
        const double t = uniform(gen, 0.0, T);
        const auto r = check_heat_identity(w, x, t);
        worst = std::max(worst, std::abs(r.residual) / r.scale);

        if (s % 10 != 0) continue;
        // Finite-difference oracle: steps scaled to the weight's own width.
        const double tc = uniform(gen, 0.2, 0.8) * T;
        const double tau = w.tau(tc);
        Point xc{w.x0[0] + uniform(gen, -1, 1) * std::sqrt(tau), w.x0[1] + uniform(gen, -1, 1) * std::sqrt(tau)};
        auto fd = [&](double e) {
            const double dt = e * std::min(tau, tc) * 0.5, dx = e * std::sqrt(tau);
            double r_ = (eval_weight(w, xc, tc + dt) - eval_weight(w, xc, tc - dt)) / (2 * dt);
            for (std::size_t a = 0; a < n; ++a) {
                Point p = xc, m = xc;
                p[a] += dx;
                m[a] -= dx;
                r_ += (eval_weight(w, p, tc) - 2 * eval_weight(w, xc, tc) + eval_weight(w, m, tc)) / (dx * dx);
            }
            return std::abs(r_);
        };
        const double ratio = fd(0.1) / fd(0.05);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
        if (ratio < 3.4 || ratio > 4.6) ++bad_ratio;
    }
    v.require(worst <= 1e-12, "analytic residual " + fmt(worst));
    v.require(bad_ratio == 0, std::to_string(bad_ratio) + " FD ratios outside [3.4, 4.6]");
    v.note("max relative residual " + fmt(worst) + ", FD halving ratio in [" + fmt(rmin) + ", " + fmt(rmax) + "]");
    return v;
}

Verdict dH_identity() {
    Verdict v;
    const double T = 0.05;
    std::vector<double> res;
    for (std::size_t l = 0; l < 3; ++l) {
        const Grid g = interval((128u << l) + 1);
        const auto tr = solve(g, T, 500u << l, CoefficientField::zero(1), make_initial_field(g, InitialData::eigenfunction(1)));
        const auto w = CaloricWeight::make(0.01, {0.3, 0.0}, T, 1);
        double worst = 0.0;
        for (std::size_t k = 1; k < tr.time.steps; ++k) worst = std::max(worst, check_dH_identity(tr, w, k).residual);
        res.push_back(worst);
    }
    v.require(res.back() <= 1e-2, "residual at 513x2000 " + fmt(res.back()));
    for (std::size_t i = 1; i < res.size(); ++i) {
        const double order = std::log2(res[i - 1] / res[i]);
        v.require(order >= 1.0, "order " + fmt(order));
    }
    v.note("max residual 129/257/513: " + fmt(res[0]) + " " + fmt(res[1]) + " " + fmt(res[2]));
    return v;
}

Verdict theta_sign() {
    Verdict v;
    struct Case {
        Grid g;
        CoefficientField c;
        Field u0;
        Point x0;
    };
    std::vector<Case> cases;
    const double T = 0.05;
    const TimeGrid tg = TimeGrid::make(T, 100);
    {
        const Grid g = interval(257);
        cases.push_back({g, CoefficientField::zero(1), make_initial_field(g, InitialData::eigenfunction(1)), {0.5, 0}});
        cases.push_back({g, CoefficientField::zero(1), random_field(g, 3), {0.2, 0}});
        cases.push_back({g, CoefficientField::fourier_random(g, tg, 4, 3.0), random_field(g, 5), {0.7, 0}});
    }
    {
        const Grid g = build_grid(Domain::rectangle({0, 1}, {0, 2}), {65, 129});
        cases.push_back({g, CoefficientField::zero(2), random_field(g, 6), {0.5, 1.0}});
        cases.push_back({g, CoefficientField::fourier_random(g, tg, 7, 2.0), random_field(g, 8), {0.3, 0.4}});
        InitialData bump;
        bump.kind = InitialData::Kind::Bump;
        bump.bump_center = {0.5, 1.2};
        bump.bump_width = 0.3;
        cases.push_back({g, CoefficientField::constant({1.0, -0.5}, 0.3), make_initial_field(g, bump), {0.6, 0.9}});
    }
    double tmin = 1e300, gap = 0.0;
    std::size_t levels = 0;
    for (const auto& c : cases) {
        const auto tr = solve_trajectory(c.g, tg, c.c, c.u0);
        const auto f = compute_trace(tr, CaloricWeight::make(0.01, c.x0, T, c.g.dim()), c.c.M());
        for (std::size_t k = 0; k < f.theta.size(); ++k, ++levels) {
            if (f.theta_scale[k] == 0.0) continue;
            tmin = std::min(tmin, f.theta[k] / f.theta_scale[k]);
            gap = std::max(gap, std::abs(f.theta[k] - f.theta_reduced[k]) / f.theta_scale[k]);
        }
    }
    v.require(tmin >= -1e-8, "min theta/scale " + fmt(tmin));
    v.require(gap <= 1e-10, "reduced-form gap " + fmt(gap));
    v.note(std::to_string(cases.size()) + " scenarios, " + std::to_string(levels) + " levels, min theta/scale " +
           fmt(tmin) + ", reduced gap " + fmt(gap));
    return v;
}

Verdict monotonicity() {
    Verdict v;
    // M = 0: random smooth data, two resolutions.
    {
        const double T = 0.05, lambda = 0.01;
        std::vector<double> inc;
        for (std::size_t l = 0; l < 2; ++l) {
            const Grid g = interval((128u << l) + 1);
            const auto tr = solve(g, T, 400u << l, CoefficientField::zero(1), random_field(g, 11));
            const auto f = compute_trace(tr, CaloricWeight::make(lambda, {0.37, 0}, T, 1), 0.0);
            inc.push_back(fit_monotonicity_constant(f, 0.0, lambda, T).relative_increment);
        }
        v.require(inc[1] <= 1e-3, "M=0 relative increment " + fmt(inc[1]));
        v.require(inc[1] <= inc[0] || inc[1] <= 1e-12, "M=0 increment not shrinking");
        v.note("M=0 increments " + fmt(inc[0]) + " -> " + fmt(inc[1]));
    }
    // M > 0: random coefficients of amplitude 10, rate c0 = 0 in the integrating factor.
    {
        const double T = 0.1, lambda = 0.05, M = 10.0;
        std::vector<double> C;
        for (std::size_t l = 0; l < 2; ++l) {
            const Grid g = interval((128u << l) + 1);
            const TimeGrid tg = TimeGrid::make(T, 400u << l);
            const auto coef = CoefficientField::fourier_random(g, tg, 1, M);
            const auto tr = solve_trajectory(g, tg, coef, random_field(g, 11));
            const auto f = compute_trace(tr, CaloricWeight::make(lambda, {0.2, 0}, T, 1), M, 0.0);
            C.push_back(fit_monotonicity_constant(f, M, lambda, T).constant);
        }
        const double ratio = std::max(C[0], C[1]) / std::min(C[0], C[1]);
        v.require(std::isfinite(C[1]) && C[1] > 0.0 && ratio <= 2.0, "M>0 C* " + fmt(C[0]) + " / " + fmt(C[1]));
        v.note("M=10 C* " + fmt(C[0]) + " -> " + fmt(C[1]));
    }
    return v;
}

const char* kRandomTemplate = R"(
name: family
domain: {kind: interval}
grid: {points: 129, refinements: 1}
time: {T: 0.1, steps: 200}
coefficients: {kind: fourier_random, seed: 1, amplitude: 1.0}
initial: {kind: fourier_random, seed: 1}
ball: {center: [0.3], radius: 0.1}
weight: {policy: lambda_star}
rates: {c0: 0}
tolerances: {multiplier_samples: 4}
)";

const char* kHeatTemplate = R"(
name: heat_family
domain: {kind: interval}
grid: {points: 129, refinements: 2}
time: {T: 0.05, steps: 200}
coefficients: {kind: zero}
initial: {kind: fourier_random, seed: 1}
ball: {center: [0.5], radius: 0.05}
tolerances: {multiplier_samples: 4}
)";

const char* kForcedTemplate = R"(
name: forced_family
domain: {kind: interval}
grid: {points: 129, refinements: 2}
time: {T: 0.05, steps: 200}
coefficients: {kind: fourier_random, seed: 1, amplitude: 2.0}
initial: {kind: fourier_random, seed: 1}
ball: {center: [0.5], radius: 0.05}
rates: {c0: 0}
tolerances: {multiplier_samples: 4}
)";

struct Families {
    std::vector<ResultRecord> random;  // M in {0.5, 1, 2} x seed 1..4, one halving
    std::vector<ResultRecord> heat;    // pure heat, 10 seeds, two halvings
    std::vector<ResultRecord> forced;  // M = 2, 10 seeds, two halvings
};

const Families& families() {
    static const Families f = [] {
        Families out;
        out.random = sweep(parse_config(kRandomTemplate), {parse_axis("M=0.5,1,2"), parse_axis("seed=1,2,3,4")});
        out.heat = sweep(parse_config(kHeatTemplate), {parse_axis("seed=1,2,3,4,5,6,7,8,9,10")});
        out.forced = sweep(parse_config(kForcedTemplate), {parse_axis("seed=1,2,3,4,5,6,7,8,9,10")});
        return out;
    }();
    return f;
}

// Counts hold-out records whose check is not a pass.
std::string hold_out_failures(const std::vector<ResultRecord>& recs, const char* check, std::size_t& bad,
                              std::size_t& total) {
    std::string first;
    for (const auto& r : recs) {
        if (r.role != "hold-out") continue;
        ++total;
        const auto* c = r.find(check);
        if (!c || c->status != Status::Pass) {
            ++bad;
            if (first.empty()) first = r.name + ": " + (c ? c->detail : r.error);
        }
    }
    return first;
}

Verdict terminal_bound() {
    Verdict v;
    std::size_t bad = 0, total = 0;
    double worst = 1e300;
    for (const auto* fam : {&families().random, &families().forced}) {
        const std::string first = hold_out_failures(*fam, "terminal_frequency_bound", bad, total);
        if (!first.empty()) v.require(false, first);
        for (const auto& r : *fam)
            if (r.role == "hold-out") worst = std::min(worst, r.find("terminal_frequency_bound")->margin);
    }
    v.require(bad == 0, std::to_string(bad) + "/" + std::to_string(total) + " hold-out runs fail");
    v.note(std::to_string(total) + " hold-out runs, fitted kt rate " +
           fmt(families().random.front().constants["kt_rate"].get<double>()) + ", min margin " + fmt(worst));
    return v;
}

Verdict hardy() {
    Verdict v;
    std::size_t pairs = 0, bad = 0;
    double worst = 1e300;
    const Grid g1 = interval(513);
    const Grid g2 = build_grid(Domain::rectangle({0, 1}, {0, 1}), {129, 129});
    std::mt19937_64 gen(77);
    for (int s = 0; s < 100; ++s) {
        const Grid& g = s % 2 ? g2 : g1;
        const Field f = random_field(g, 500 + s, 3 + s % 6);
        const Point x0{uniform(gen, 0.1, 0.9), uniform(gen, 0.1, 0.9)};
        for (int e = -4; e <= 2; ++e) {
            const auto r = check_hardy(g, f, std::pow(10.0, e), x0);
            ++pairs;
            if (r.lhs > r.rhs) ++bad;
            if (r.rhs > 0) worst = std::min(worst, (r.rhs - r.lhs) / r.rhs);
        }
    }
    v.require(bad == 0, std::to_string(bad) + " violations");
    v.note(std::to_string(pairs) + " (field, lambda) pairs, lambda 1e-4..1e2, min relative margin " + fmt(worst));
    return v;
}

Verdict ball_estimate() {
    Verdict v;
    double gap = 0.0;
    std::mt19937_64 gen(5);
    for (int s = 0; s < 200; ++s) {
        KTConstant K;
        K.value = std::pow(10.0, uniform(gen, -0.3, 3));
        const double r = std::pow(10.0, uniform(gen, -3, -0.5));
        const auto c = compute_constants(1.0, r, uniform(gen, 0, 3), uniform(gen, 0.01, 1), K);
        gap = std::max(gap, std::abs(c.backsubstitution - 0.5));
    }
    v.require(gap <= 1e-10, "back-substitution gap " + fmt(gap));
    std::size_t bad = 0, total = 0;
    for (const auto* fam : {&families().random, &families().forced, &families().heat}) {
        const std::string first = hold_out_failures(*fam, "ball_estimate", bad, total);
        if (!first.empty()) v.require(false, first);
    }
    v.require(bad == 0, std::to_string(bad) + "/" + std::to_string(total) + " hold-out ball estimates fail");
    v.note("prefactor gap " + fmt(gap) + ", " + std::to_string(total) + " hold-out runs");
    return v;
}

Verdict theorem(const char* check) {
    Verdict v;
    const bool is_11 = std::string(check) == "theorem_1_1";
    std::size_t bad = 0, total = 0;
    double spread = 0.0;
    for (const auto* fam : {&families().heat, &families().forced}) {
        for (const auto& r : *fam) {
            const auto& lv = r.constants["levels"];
            std::vector<double> Cs;
            for (const auto& l : lv) Cs.push_back(l[is_11 ? "theorem_1_1_C" : "theorem_1_3_C"].is_null()
                                                      ? std::nan("")
                                                      : l[is_11 ? "theorem_1_1_C" : "theorem_1_3_C"].get<double>());
            if (r.role == "calibration") {
                for (double c : Cs) v.require(std::isfinite(c), r.name + ": calibration fit not finite");
            }
            if (lv.size() != 3) v.require(false, r.name + ": expected three levels");
            bool finite = true;
            for (double c : Cs) finite = finite && std::isfinite(c) && c > 0;
            if (finite) spread = std::max(spread, refinement_spread(Cs));
        }
        const std::string first = hold_out_failures(*fam, check, bad, total);
        if (!first.empty()) v.require(false, first);
        if (is_11) {
            std::size_t sb = 0, st = 0;
            const std::string sf = hold_out_failures(*fam, "scale_invariance", sb, st);
            for (const auto& r : *fam)
                if (r.find("scale_invariance")->status != Status::Pass) v.require(false, r.name + ": scale invariance");
        }
    }
    v.require(spread < 10.0, "refinement spread " + fmt(spread));
    v.require(bad == 0, std::to_string(bad) + "/" + std::to_string(total) + " hold-out runs fail");
    const double C = families().heat.front().constants[is_11 ? "theorem_1_1_C" : "theorem_1_3_C"].get<double>();
    v.note(std::to_string(total) + " hold-out runs closed with C_ref = 10 x C_cal (pure heat C_cal " + fmt(C) +
           "), max refinement spread " + fmt(spread));
    if (!is_11) {
        // Near-equality: an eigenfunction under pure heat flow.
        const double T = 0.05;
        const Grid g = interval(513);
        const auto tr = solve(g, T, 400, CoefficientField::zero(1), make_initial_field(g, InitialData::eigenfunction(1)));
        const auto nt = compute_norm_trace(tr, DirichletLaplacian(g));
        const auto b = check_backward_estimate(nt, 0.0, T, 0.0, 0.0);
        v.require(std::abs(b.relative_slack()) <= 1e-3, "eigenfunction backward slack " + fmt(b.relative_slack()));
        v.note("eigenfunction backward relative slack " + fmt(b.relative_slack()));
    }
    return v;
}

Verdict energy_zeta() {
    Verdict v;
    const double T = 0.05;
    std::vector<double> res;
    for (std::size_t l = 0; l < 3; ++l) {
        const Grid g = interval((128u << l) + 1);
        const TimeGrid tg = TimeGrid::make(T, 500u << l);
        const auto tr = solve_trajectory(g, tg, CoefficientField::fourier_random(g, tg, 2, 2.0), random_field(g, 4));
        const DirichletLaplacian lap(g);
        double worst = 0.0;
        for (std::size_t k = 1; k < tg.steps; ++k) {
            const auto e = check_energy_identities(tr, k, lap);
            worst = std::max({worst, e.residual1, e.residual2});
        }
        res.push_back(worst);
    }
    v.require(res[0] <= 1e-2, "base residual " + fmt(res[0]));
    for (std::size_t i = 1; i < res.size(); ++i) v.require(std::log2(res[i - 1] / res[i]) >= 1.0, "order below 1");
    v.note("energy residuals " + fmt(res[0]) + " " + fmt(res[1]) + " " + fmt(res[2]));

    const Grid g = interval(257);
    const auto heat = solve(g, T, 400, CoefficientField::zero(1), random_field(g, 9));
    const auto nt = compute_norm_trace(heat, DirichletLaplacian(g));
    const double inc = check_zeta_growth(nt, 0.0, T);
    v.require(inc <= 1e-6, "pure heat zeta increment " + fmt(inc));
    const auto eig = solve(g, T, 400, CoefficientField::zero(1), make_initial_field(g, InitialData::eigenfunction(2)));
    const auto ne = compute_norm_trace(eig, DirichletLaplacian(g));
    double dev = 0.0;
    for (double z : ne.zeta) dev = std::max(dev, std::abs(z / ne.zeta.front() - 1.0));
    v.require(dev <= 1e-6, "eigenfunction zeta deviation " + fmt(dev));
    v.note("pure heat zeta increment " + fmt(inc) + ", eigenfunction deviation " + fmt(dev));
    return v;
}

Verdict hminus1_oracle() {
    Verdict v;
    const Grid g = interval(1025);
    const double h = g.spacing(0);
    const DirichletLaplacian lap(g);
    double dgap = 0.0, cgap = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const Field s = g.sample_dirichlet([k](const Point& x) { return std::sin(k * pi * x[0]); });
        const double hm = std::pow(hminus1_norm(lap, s), 2);
        const double mu = (2.0 / (h * h)) * (1.0 - std::cos(k * pi * h));
        dgap = std::max(dgap, std::abs(hm / (weighted_inner_product(g, s, s) / mu) - 1.0));
        cgap = std::max(cgap, std::abs(hm / (0.5 / (k * k * pi * pi)) - 1.0));
    }
    v.require(dgap <= 1e-10, "discrete gap " + fmt(dgap));
    v.require(cgap <= 1e-3, "continuum gap " + fmt(cgap));
    v.note("discrete gap " + fmt(dgap) + ", continuum gap " + fmt(cgap));
    return v;
}

Verdict multiplier() {
    Verdict v;
    auto family_max = [](const Grid& g) {
        const DirichletLaplacian lap(g);
        std::mt19937_64 gen(31);
        double worst = 0.0;
        for (int s = 0; s < 100; ++s) {
            const double a = uniform(gen, 0, 2 * pi), k0 = std::floor(uniform(gen, 0, 5)), k1 = std::floor(uniform(gen, 0, 5));
            const Field hf = g.sample([&](const Point& x) { return std::cos(a + pi * (k0 * x[0] + k1 * x[1])); });
            const Field gf = random_field(g, 900 + s);
            for (std::size_t ax = 0; ax < g.dim(); ++ax) worst = std::max(worst, check_multiplier_bound(lap, hf, gf, ax));
        }
        return worst;
    };
    const double a1 = family_max(interval(129)), b1 = family_max(interval(257));
    const double a2 = family_max(build_grid(Domain::rectangle({0, 1}, {0, 1}), {65, 65}));
    const double b2 = family_max(build_grid(Domain::rectangle({0, 1}, {0, 1}), {129, 129}));
    const double r1 = std::max(a1, b1) / std::min(a1, b1), r2 = std::max(a2, b2) / std::min(a2, b2);
    v.require(std::isfinite(b1) && std::isfinite(b2), "ratio not finite");
    v.require(r1 <= 2.0 && r2 <= 2.0, "refinement ratio " + fmt(r1) + " / " + fmt(r2));
    v.note("1-D max " + fmt(a1) + " -> " + fmt(b1) + ", 2-D max " + fmt(a2) + " -> " + fmt(b2));
    return v;
}

Verdict assumptions() {
    Verdict v;
    double worst_rho = 0.0, worst_c = 0.0;
    std::size_t runs = 0;
    for (const auto* fam : {&families().random, &families().forced}) {
        for (const auto& r : *fam) {
            ++runs;
            const auto* a2 = r.find("assumption2_growth");
            const auto* a3 = r.find("assumption3_hminus1");
            v.require(a2->status == Status::Pass && std::isfinite(a2->fitted_constant), r.name + ": growth rate");
            v.require(a3->status == Status::Pass, r.name + ": " + a3->detail);
            worst_c = std::max(worst_c, a2->fitted_constant);
            worst_rho = std::max(worst_rho, a3->fitted_constant);
        }
    }
    // f = -b u_x - c u: the multiplier constant plus 1/sqrt(mu_1) bounds rho on the unit interval.
    const Grid g = interval(129);
    const double bound = multiplier_reference_bound(g, 0) + 1.0 / std::sqrt(first_dirichlet_eigenvalue(g));
    v.require(worst_rho <= bound, "rho " + fmt(worst_rho) + " above " + fmt(bound));
    v.note(std::to_string(runs) + " runs, max growth rate " + fmt(worst_c) + ", max rho " + fmt(worst_rho) +
           " <= " + fmt(bound));
    return v;
}

#ifndef FREQLAB_CLI
#define FREQLAB_CLI "freqlab"
#endif

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FREQLAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Verdict determinism() {
    Verdict v;
    const auto cfg = parse_config(kRandomTemplate);
    const std::string a = dump_json(to_json(run_scenario(cfg), false));
    const std::string b = dump_json(to_json(run_scenario(cfg), false));
    v.require(a == b, "repeated run differs");
    const auto s1 = sweep(cfg, {parse_axis("seed=1,2,3")});
    const auto s2 = sweep(cfg, {parse_axis("seed=1,2,3")});
    for (std::size_t i = 0; i < s1.size(); ++i)
        v.require(dump_json(to_json(s1[i], false)) == dump_json(to_json(s2[i], false)), "sweep record differs");

    auto registry_complete = [&](const std::vector<ResultRecord>& recs) {
        for (const auto& r : recs) {
            v.require(r.checks.size() == check_registry().size(), r.name + ": check count");
            for (const auto& c : check_registry()) v.require(r.find(c.name) != nullptr, r.name + ": missing check");
        }
    };
    registry_complete(s1);
    registry_complete(families().random);
    registry_complete(families().heat);
    registry_complete(families().forced);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "freqlab_acceptance";
    fs::create_directories(dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const std::string base =
        "domain: {kind: interval}\ngrid: {points: 65}\ntime: {T: 0.05, steps: 100}\ninitial: {kind: eigenfunction}\n";
    const std::string ok = write("ok.yaml", base);
    const std::string failing = write("fail.yaml", base + "tolerances: {energy: 1.0e-30}\n");
    const std::string invalid = write("invalid.yaml", base + "ball: {center: [0.99], radius: 0.1}\n");
    const std::string blowup = write("blowup.yaml", "domain: {kind: interval}\ngrid: {points: 65}\ntime: {T: 0.05, steps: 100}\n"
                                                    "initial: {kind: eigenfunction}\ncoefficients: {kind: constant, c: -1000}\n");
    const std::string out = "FREQLAB_OUT=" + (dir / "out").string() + " ";
    const int e0 = run_cli(ok.empty() ? "" : "run " + ok + " --quiet");
    const int e1 = run_cli("run " + failing + " --quiet");
    const int e2 = run_cli("run " + invalid + " --quiet");
    const int e3 = run_cli("run " + blowup + " --quiet");
    (void)out;
    v.require(e0 == 0 && e1 == 1 && e2 == 2 && e3 == 3,
              "exit codes " + std::to_string(e0) + std::to_string(e1) + std::to_string(e2) + std::to_string(e3));
    fs::remove_all(dir);
    v.note("repeated runs and sweeps byte-identical, exit codes 0/1/2/3 as specified, " +
           std::to_string(check_registry().size()) + " checks in every record");
    return v;
}

}  // namespace

int main() {
    setenv("FREQLAB_OUT", (std::filesystem::temp_directory_path() / "freqlab_acceptance_out").c_str(), 1);
    struct Criterion {
        int id;
        const char* title;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "caloric identities", caloric},
        {2, "dH/dt identity", dH_identity},
        {3, "convexity sign of theta", theta_sign},
        {4, "frequency almost-monotonicity", monotonicity},
        {5, "terminal frequency bound on hold-out", terminal_bound},
        {6, "Hardy-type inequality", hardy},
        {7, "ball estimate at lambda*", ball_estimate},
        {8, "Theorem 1.1 calibration/hold-out", [] { return theorem("theorem_1_1"); }},
        {9, "Theorem 1.3 calibration/hold-out", [] { return theorem("theorem_1_3"); }},
        {10, "energy identities and zeta growth", energy_zeta},
        {11, "H^-1 oracle", hminus1_oracle},
        {12, "multiplier lemma", multiplier},
        {13, "assumption audits", assumptions},
        {14, "harness determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
