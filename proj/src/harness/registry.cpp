#include "freqlab/harness/registry.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "freqlab/error.hpp"

namespace freqlab::harness {

namespace {

constexpr std::array kRegistry{
    CheckInfo{"caloric_identities", "dt G + lap G = 0 from the closed forms on 1000 random (x,t)"},
    CheckInfo{"dH_identity", "dH/dt = -2D + 2<u f, G> at every interior level"},
    CheckInfo{"theta_sign", "theta >= 0 on convex domains and equals the Dirichlet-reduced form"},
    CheckInfo{"frequency_monotonicity", "(T-t+lambda) e^{-c0 M^2 t} N grows at most C M^2 (T+lambda)"},
    CheckInfo{"KT_constant", "K_T equals the sum of its terms and is at least n/2"},
    CheckInfo{"terminal_frequency_bound", "lambda e^{-M^2T} N(T) + n/2 <= (lambda/T + 1) K_T"},
    CheckInfo{"hardy_inequality", "weighted Hardy inequality for u(T) over six decades of lambda"},
    CheckInfo{"lambda_star_backsubstitution", "lambda* makes the ball-estimate prefactor 1/2"},
    CheckInfo{"ball_estimate", "int |x-x0|^2 u(T)^2 e <= r^2 int_B u(T)^2 e at lambda*"},
    CheckInfo{"energy_identities", "L2 and H^-1 energy identities at every interior level"},
    CheckInfo{"zeta_growth", "zeta(t) <= exp(c M^2 t) zeta(0)"},
    CheckInfo{"backward_estimate", "|u(0)|_{H^-1}^2 bounded by the terminal H^-1 norm"},
    CheckInfo{"assumption1_dirichlet", "finite levels with zero boundary values"},
    CheckInfo{"assumption2_growth", "|u(T)|^2 <= exp(c M (T-t)) |u(t)|^2 with finite c"},
    CheckInfo{"assumption3_hminus1", "|u_t - lap u|_{H^-1} <= C M |u|_2 uniformly"},
    CheckInfo{"inequality_slack", "|u_t - lap u| <= M (|grad u| + |u|) pointwise"},
    CheckInfo{"multiplier_bound", "|h d_i g|_{H^-1} <= C |h|_inf |g|_2 on a seeded family"},
    CheckInfo{"scale_invariance", "u -> alpha u leaves N, theta/H and fitted constants unchanged"},
    CheckInfo{"theorem_1_1", "global-from-local interpolation estimate"},
    CheckInfo{"theorem_1_3", "initial data bounded by the terminal observation"},
};

constexpr std::array<std::string_view, 20> kRequired{
    "caloric_identities", "dH_identity",       "theta_sign",          "frequency_monotonicity",
    "KT_constant",        "terminal_frequency_bound", "hardy_inequality", "lambda_star_backsubstitution",
    "ball_estimate",      "energy_identities", "zeta_growth",         "backward_estimate",
    "assumption1_dirichlet", "assumption2_growth", "assumption3_hminus1", "inequality_slack",
    "multiplier_bound",   "scale_invariance",  "theorem_1_1",         "theorem_1_3",
};

}  // namespace

std::span<const CheckInfo> check_registry() { return kRegistry; }

bool is_registered(std::string_view name) {
    return std::any_of(kRegistry.begin(), kRegistry.end(), [&](const CheckInfo& c) { return c.name == name; });
}

std::span<const std::string_view> required_checks() { return kRequired; }

void audit_registry() {
    std::set<std::string_view> seen;
    for (const auto& c : kRegistry) {
        require(seen.insert(c.name).second, ErrorCode::ValidationError,
                "check registered twice: " + std::string(c.name));
    }
    for (auto name : kRequired) {
        require(seen.count(name) == 1, ErrorCode::ValidationError, "check missing from registry: " + std::string(name));
    }
    require(seen.size() == kRequired.size(), ErrorCode::ValidationError, "registry holds unlisted checks");
}

}  // namespace freqlab::harness
