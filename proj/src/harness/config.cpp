#include "freqlab/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "freqlab/error.hpp"
#include "freqlab/harness/json_text.hpp"

namespace freqlab::harness {

namespace {

std::string where(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    return m.line >= 0 ? "line " + std::to_string(m.line + 1) + ": " : "";
}

[[noreturn]] void invalid(const YAML::Node& n, const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ValidationError, where(n) + "field '" + path + "': " + what);
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path, const char* expected) {
    if (!n.IsScalar()) invalid(n, path, std::string("expected ") + expected);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        invalid(n, path, std::string("expected ") + expected);
    }
}

double real(const YAML::Node& n, const std::string& path) {
    const double v = scalar<double>(n, path, "a number");
    if (!std::isfinite(v)) invalid(n, path, "must be finite");
    return v;
}

std::size_t count(const YAML::Node& n, const std::string& path) {
    const long long v = scalar<long long>(n, path, "an integer");
    if (v < 0) invalid(n, path, "must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::vector<double> reals(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) return {real(n, path)};
    if (!n.IsSequence()) invalid(n, path, "expected a number or a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < n.size(); ++k) out.push_back(real(n[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

class Section {
public:
    Section(const YAML::Node& node, std::string path, std::set<std::string> keys)
        : node_(node), path_(std::move(path)) {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) invalid(node_, path_, "expected a mapping");
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!keys.count(key)) invalid(kv.first, join(key), "unknown key");
        }
    }

    bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull(); }
    YAML::Node at(const std::string& key) const { return node_[key]; }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double real(const std::string& key, double def) const { return has(key) ? harness::real(at(key), join(key)) : def; }
    std::optional<double> optional_real(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return harness::real(at(key), join(key));
    }
    std::size_t count(const std::string& key, std::size_t def) const {
        return has(key) ? harness::count(at(key), join(key)) : def;
    }
    std::string text(const std::string& key, const std::string& def) const {
        return has(key) ? scalar<std::string>(at(key), join(key), "a string") : def;
    }
    YAML::Node node() const { return node_; }

private:
    YAML::Node node_;
    std::string path_;
};

template <class E>
E choose(const Section& s, const std::string& key, const std::vector<std::pair<std::string, E>>& options, E def) {
    if (!s.has(key)) return def;
    const auto v = scalar<std::string>(s.at(key), s.join(key), "a string");
    std::string names;
    for (const auto& [name, value] : options) {
        if (name == v) return value;
        names += (names.empty() ? "" : " | ") + name;
    }
    invalid(s.at(key), s.join(key), "expected one of " + names);
}

const std::vector<std::pair<std::string, DomainKind>> kDomainKinds{{"interval", DomainKind::Interval},
                                                                   {"rectangle", DomainKind::Rectangle}};
const std::vector<std::pair<std::string, CoefficientField::Kind>> kCoefficientKinds{
    {"zero", CoefficientField::Kind::Zero},
    {"constant", CoefficientField::Kind::Constant},
    {"fourier_random", CoefficientField::Kind::FourierRandom}};
const std::vector<std::pair<std::string, InitialKind>> kInitialKinds{{"eigenfunction", InitialKind::Eigenfunction},
                                                                     {"sine_series", InitialKind::SineSeries},
                                                                     {"bump", InitialKind::Bump},
                                                                     {"fourier_random", InitialKind::FourierRandom},
                                                                     {"zero", InitialKind::Zero}};
const std::vector<std::pair<std::string, LambdaPolicy>> kPolicies{{"fixed", LambdaPolicy::Fixed},
                                                                  {"lambda_star", LambdaPolicy::LambdaStar}};

template <class E>
std::string name_of(const std::vector<std::pair<std::string, E>>& options, E value) {
    for (const auto& [name, v] : options) {
        if (v == value) return name;
    }
    return "?";
}

std::vector<double> midpoint(const DomainSpec& d) {
    std::vector<double> c;
    for (const auto& b : d.bounds) c.push_back(0.5 * (b.lower + b.upper));
    return c;
}

Point to_point(const std::vector<double>& v) {
    Point p{0.0, 0.0};
    for (std::size_t a = 0; a < v.size() && a < kMaxDim; ++a) p[a] = v[a];
    return p;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
    ExperimentConfig cfg;
    const Section top(root, "",
                      {"name", "domain", "grid", "time", "coefficients", "initial", "ball", "weight", "rates",
                       "tolerances", "output"});
    cfg.name = top.text("name", cfg.name);

    const Section dom(top.at("domain"), "domain", {"kind", "bounds"});
    cfg.domain.kind = choose(dom, "kind", kDomainKinds, DomainKind::Interval);
    const std::size_t dim = cfg.domain.kind == DomainKind::Interval ? 1 : 2;
    cfg.domain.bounds.assign(dim, AxisBounds{0.0, 1.0});
    if (dom.has("bounds")) {
        const YAML::Node b = dom.at("bounds");
        if (!b.IsSequence() || b.size() != dim) {
            invalid(b, "domain.bounds", "expected " + std::to_string(dim) + " [lower, upper] pair(s)");
        }
        for (std::size_t a = 0; a < dim; ++a) {
            const auto pair = reals(b[a], "domain.bounds[" + std::to_string(a) + "]");
            if (pair.size() != 2) invalid(b[a], "domain.bounds", "each axis needs [lower, upper]");
            if (!(pair[0] < pair[1])) invalid(b[a], "domain.bounds", "lower < upper per axis");
            cfg.domain.bounds[a] = AxisBounds{pair[0], pair[1]};
        }
    }

    const Section grid(top.at("grid"), "grid", {"points", "refinements"});
    cfg.grid.points.assign(dim, 129);
    if (grid.has("points")) {
        const auto pts = reals(grid.at("points"), "grid.points");
        if (pts.size() != 1 && pts.size() != dim) invalid(grid.at("points"), "grid.points", "one entry per axis");
        for (std::size_t a = 0; a < dim; ++a) {
            const double p = pts.size() == 1 ? pts[0] : pts[a];
            if (p != std::floor(p) || p < 3.0) invalid(grid.at("points"), "grid.points", "integers >= 3 per axis");
            cfg.grid.points[a] = static_cast<std::size_t>(p);
        }
    }
    cfg.grid.refinements = grid.count("refinements", cfg.grid.refinements);
    if (cfg.grid.refinements > 3) invalid(grid.at("refinements"), "grid.refinements", "at most 3");

    const Section time(top.at("time"), "time", {"T", "steps"});
    cfg.time.T = time.real("T", cfg.time.T);
    if (!(cfg.time.T > 0.0)) invalid(time.at("T"), "time.T", "must be positive");
    cfg.time.steps = time.count("steps", cfg.time.steps);
    if (cfg.time.steps < 4) invalid(time.at("steps"), "time.steps", "need at least 4 steps");

    const Section co(top.at("coefficients"), "coefficients", {"kind", "b", "c", "seed", "amplitude", "modes"});
    cfg.coefficients.kind = choose(co, "kind", kCoefficientKinds, CoefficientField::Kind::Zero);
    cfg.coefficients.b.assign(dim, 0.0);
    if (co.has("b")) {
        cfg.coefficients.b = reals(co.at("b"), "coefficients.b");
        if (cfg.coefficients.b.size() != dim) invalid(co.at("b"), "coefficients.b", "one entry per axis");
    }
    cfg.coefficients.c = co.real("c", 0.0);
    cfg.coefficients.seed = co.count("seed", cfg.coefficients.seed);
    cfg.coefficients.amplitude = co.real("amplitude", cfg.coefficients.amplitude);
    if (cfg.coefficients.amplitude < 0.0) invalid(co.at("amplitude"), "coefficients.amplitude", "must be >= 0");
    cfg.coefficients.modes = static_cast<int>(co.count("modes", 4));
    if (cfg.coefficients.modes < 1) invalid(co.at("modes"), "coefficients.modes", "must be >= 1");

    const Section in(top.at("initial"), "initial",
                     {"kind", "mode", "transverse_mode", "coefficients", "center", "width", "seed", "modes", "scale"});
    cfg.initial.kind = choose(in, "kind", kInitialKinds, InitialKind::Eigenfunction);
    cfg.initial.mode = static_cast<int>(in.count("mode", 1));
    if (cfg.initial.mode < 1) invalid(in.at("mode"), "initial.mode", "must be >= 1");
    cfg.initial.transverse_mode = static_cast<int>(in.count("transverse_mode", 1));
    if (cfg.initial.transverse_mode < 1) invalid(in.at("transverse_mode"), "initial.transverse_mode", "must be >= 1");
    if (in.has("coefficients")) {
        cfg.initial.coefficients = reals(in.at("coefficients"), "initial.coefficients");
        if (cfg.initial.coefficients.empty()) invalid(in.at("coefficients"), "initial.coefficients", "must not be empty");
    }
    cfg.initial.center = midpoint(cfg.domain);
    if (in.has("center")) {
        cfg.initial.center = reals(in.at("center"), "initial.center");
        if (cfg.initial.center.size() != dim) invalid(in.at("center"), "initial.center", "one entry per axis");
    }
    cfg.initial.width = in.real("width", cfg.initial.width);
    cfg.initial.seed = in.count("seed", cfg.initial.seed);
    cfg.initial.modes = static_cast<int>(in.count("modes", 6));
    if (cfg.initial.modes < 1) invalid(in.at("modes"), "initial.modes", "must be >= 1");
    cfg.initial.scale = in.real("scale", 1.0);
    if (cfg.initial.kind == InitialKind::Bump) {
        const Domain d = cfg.make_domain();
        const Point c = to_point(cfg.initial.center);
        if (!(cfg.initial.width > 0.0) || !d.contains(c) || d.distance_to_boundary(c) < cfg.initial.width) {
            invalid(in.node(), "initial", "bump support must lie inside the domain");
        }
    }

    const Section ball(top.at("ball"), "ball", {"center", "radius"});
    cfg.ball.center = midpoint(cfg.domain);
    if (ball.has("center")) {
        cfg.ball.center = reals(ball.at("center"), "ball.center");
        if (cfg.ball.center.size() != dim) invalid(ball.at("center"), "ball.center", "one entry per axis");
    }
    cfg.ball.radius = ball.real("radius", cfg.ball.radius);
    try {
        make_ball(cfg.make_domain(), to_point(cfg.ball.center), cfg.ball.radius);
    } catch (const Error& e) {
        invalid(ball.node(), "ball", "observation ball not inside domain");
    }

    const Section w(top.at("weight"), "weight", {"policy", "lambda"});
    cfg.weight.policy = choose(w, "policy", kPolicies, LambdaPolicy::Fixed);
    cfg.weight.lambda = w.real("lambda", cfg.weight.lambda);
    if (!(cfg.weight.lambda >= 1e-12)) invalid(w.at("lambda"), "weight.lambda", "must be >= 1e-12");

    const Section rates(top.at("rates"), "rates", {"c0", "kt", "theorem_1_1", "theorem_1_3", "zeta", "assumption3"});
    cfg.rates.c0 = rates.real("c0", 1.0);
    cfg.rates.kt = rates.optional_real("kt");
    cfg.rates.theorem_1_1 = rates.optional_real("theorem_1_1");
    cfg.rates.theorem_1_3 = rates.optional_real("theorem_1_3");
    cfg.rates.zeta = rates.optional_real("zeta");
    cfg.rates.assumption3 = rates.optional_real("assumption3");
    for (const auto& [key, v] : {std::pair{"kt", cfg.rates.kt}, {"theorem_1_1", cfg.rates.theorem_1_1},
                                 {"theorem_1_3", cfg.rates.theorem_1_3}, {"zeta", cfg.rates.zeta},
                                 {"assumption3", cfg.rates.assumption3}}) {
        if (v && *v < 0.0) invalid(rates.at(key), rates.join(key), "must be >= 0");
    }
    for (const char* key : {"theorem_1_1", "theorem_1_3"}) {
        const auto v = rates.optional_real(key);
        if (v && !(*v > 0.0)) invalid(rates.at(key), rates.join(key), "must be positive");
    }

    auto& tol = cfg.tolerances;
    const Section t(top.at("tolerances"), "tolerances",
                    {"caloric", "dH", "theta_sign", "theta_reduced", "monotonicity", "stability_factor", "energy",
                     "zeta", "backward", "hardy", "backsubstitution", "theorem_slack", "refinement_spread",
                     "assumption3_pure", "multiplier_samples"});
    tol.caloric = t.real("caloric", tol.caloric);
    tol.dH = t.optional_real("dH");
    tol.theta_sign = t.real("theta_sign", tol.theta_sign);
    tol.theta_reduced = t.real("theta_reduced", tol.theta_reduced);
    tol.monotonicity = t.real("monotonicity", tol.monotonicity);
    tol.stability_factor = t.real("stability_factor", tol.stability_factor);
    tol.energy = t.real("energy", tol.energy);
    tol.zeta = t.real("zeta", tol.zeta);
    tol.backward = t.real("backward", tol.backward);
    tol.hardy = t.real("hardy", tol.hardy);
    tol.backsubstitution = t.real("backsubstitution", tol.backsubstitution);
    tol.theorem_slack = t.real("theorem_slack", tol.theorem_slack);
    tol.refinement_spread = t.real("refinement_spread", tol.refinement_spread);
    tol.assumption3_pure = t.real("assumption3_pure", tol.assumption3_pure);
    tol.multiplier_samples = t.count("multiplier_samples", tol.multiplier_samples);
    if (tol.multiplier_samples < 1) invalid(t.at("multiplier_samples"), "tolerances.multiplier_samples", "must be >= 1");
    if (tol.stability_factor < 1.0) invalid(t.at("stability_factor"), "tolerances.stability_factor", "must be >= 1");
    if (tol.theorem_slack < 1.0) invalid(t.at("theorem_slack"), "tolerances.theorem_slack", "must be >= 1");

    const Section out(top.at("output"), "output", {"dir", "format", "trace_points"});
    cfg.output.dir = out.text("dir", cfg.output.dir);
    cfg.output.format = out.text("format", cfg.output.format);
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
        invalid(out.at("format"), "output.format", "expected one of csv | json");
    }
    cfg.output.trace_points = out.count("trace_points", cfg.output.trace_points);
    if (cfg.output.trace_points < 2) invalid(out.at("trace_points"), "output.trace_points", "must be >= 2");
    return cfg;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i, const YAML::Node& value) {
    if (i + 1 == parts.size()) {
        node[parts[i]] = value;
        return;
    }
    if (!node[parts[i]] || !node[parts[i]].IsMap()) node[parts[i]] = YAML::Node(YAML::NodeType::Map);
    set_path(node[parts[i]], parts, i + 1, value);
}

// Short axis names accepted by sweep and the CLI.
std::vector<std::string> expand_alias(const std::string& key) {
    if (key == "grid") return {"grid.points"};
    if (key == "M") return {"coefficients.amplitude"};
    if (key == "seed") return {"coefficients.seed", "initial.seed"};
    if (key == "T") return {"time.T"};
    if (key == "lambda") return {"weight.lambda"};
    return {key};
}

void apply_overrides(YAML::Node& root, const Overrides& overrides) {
    if (overrides.empty()) return;
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& [key, text] : overrides) {
        YAML::Node value;
        try {
            value = YAML::Load(text);
        } catch (const YAML::Exception& e) {
            throw Error(ErrorCode::ParseError, "override '" + key + "': " + e.msg);
        }
        for (const auto& path : expand_alias(key)) {
            const auto parts = split(path, '.');
            if (parts.empty()) throw Error(ErrorCode::ValidationError, "empty override key");
            for (const auto& p : parts) {
                if (p.empty()) throw Error(ErrorCode::ValidationError, "malformed override key '" + key + "'");
            }
            set_path(root, parts, 0, value);
        }
    }
}

ExperimentConfig parse_node(YAML::Node root, const Overrides& overrides) {
    apply_overrides(root, overrides);
    if (root && !root.IsNull() && !root.IsMap()) {
        throw Error(ErrorCode::ValidationError, where(root) + "top level must be a mapping");
    }
    return from_yaml(root);
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

Domain ExperimentConfig::make_domain() const {
    if (domain.kind == DomainKind::Interval) return Domain::interval(domain.bounds[0].lower, domain.bounds[0].upper);
    return Domain::rectangle(domain.bounds[0], domain.bounds[1]);
}

Point ExperimentConfig::ball_center() const { return to_point(ball.center); }

InitialData ExperimentConfig::initial_data(const Domain& d) const {
    InitialData data;
    (void)d;
    data.transverse_mode = initial.transverse_mode;
    data.scale = initial.scale;
    switch (initial.kind) {
        case InitialKind::Eigenfunction:
            data = InitialData::eigenfunction(initial.mode);
            data.transverse_mode = initial.transverse_mode;
            data.scale = initial.scale;
            break;
        case InitialKind::SineSeries:
            data.kind = InitialData::Kind::SineSeries;
            data.sine_coefficients = initial.coefficients;
            break;
        case InitialKind::Bump:
            data.kind = InitialData::Kind::Bump;
            data.bump_center = to_point(initial.center);
            data.bump_width = initial.width;
            break;
        case InitialKind::FourierRandom:
            data.kind = InitialData::Kind::FourierRandom;
            data.seed = initial.seed;
            data.random_modes = initial.modes;
            break;
        case InitialKind::Zero:
            data = InitialData::zero();
            break;
    }
    return data;
}

ExperimentConfig parse_config(std::string_view text, const Overrides& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    return parse_node(root, overrides);
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

ExperimentConfig with_overrides(const ExperimentConfig& config, const Overrides& overrides) {
    return parse_config(canonical_json(config), overrides);
}

nlohmann::json to_json(const ExperimentConfig& c) {
    using nlohmann::json;
    json bounds = json::array();
    for (const auto& b : c.domain.bounds) bounds.push_back({b.lower, b.upper});
    json j;
    j["name"] = c.name;
    j["domain"] = {{"kind", name_of(kDomainKinds, c.domain.kind)}, {"bounds", bounds}};
    j["grid"] = {{"points", c.grid.points}, {"refinements", c.grid.refinements}};
    j["time"] = {{"T", c.time.T}, {"steps", c.time.steps}};
    j["coefficients"] = {{"kind", name_of(kCoefficientKinds, c.coefficients.kind)},
                         {"b", c.coefficients.b},
                         {"c", c.coefficients.c},
                         {"seed", c.coefficients.seed},
                         {"amplitude", c.coefficients.amplitude},
                         {"modes", c.coefficients.modes}};
    j["initial"] = {{"kind", name_of(kInitialKinds, c.initial.kind)},
                    {"mode", c.initial.mode},
                    {"transverse_mode", c.initial.transverse_mode},
                    {"coefficients", c.initial.coefficients},
                    {"center", c.initial.center},
                    {"width", c.initial.width},
                    {"seed", c.initial.seed},
                    {"modes", c.initial.modes},
                    {"scale", c.initial.scale}};
    j["ball"] = {{"center", c.ball.center}, {"radius", c.ball.radius}};
    j["weight"] = {{"policy", name_of(kPolicies, c.weight.policy)}, {"lambda", c.weight.lambda}};
    j["rates"] = {{"c0", c.rates.c0},
                  {"kt", optional_json(c.rates.kt)},
                  {"theorem_1_1", optional_json(c.rates.theorem_1_1)},
                  {"theorem_1_3", optional_json(c.rates.theorem_1_3)},
                  {"zeta", optional_json(c.rates.zeta)},
                  {"assumption3", optional_json(c.rates.assumption3)}};
    const auto& t = c.tolerances;
    j["tolerances"] = {{"caloric", t.caloric},
                       {"dH", optional_json(t.dH)},
                       {"theta_sign", t.theta_sign},
                       {"theta_reduced", t.theta_reduced},
                       {"monotonicity", t.monotonicity},
                       {"stability_factor", t.stability_factor},
                       {"energy", t.energy},
                       {"zeta", t.zeta},
                       {"backward", t.backward},
                       {"hardy", t.hardy},
                       {"backsubstitution", t.backsubstitution},
                       {"theorem_slack", t.theorem_slack},
                       {"refinement_spread", t.refinement_spread},
                       {"assumption3_pure", t.assumption3_pure},
                       {"multiplier_samples", t.multiplier_samples}};
    j["output"] = {{"dir", c.output.dir}, {"format", c.output.format}, {"trace_points", c.output.trace_points}};
    return j;
}

std::string canonical_json(const ExperimentConfig& config) { return dump_json(to_json(config)); }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_digest(const ExperimentConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json(config))));
    return buf;
}

}  // namespace freqlab::harness
