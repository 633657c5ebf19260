#include "freqlab/harness/sweep.hpp"

#include <fstream>
#include <memory>

#include "freqlab/error.hpp"
#include "freqlab/harness/json_text.hpp"

namespace freqlab::harness {

SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::ValidationError, "axis '" + spec + "' is not key=v1,v2,...");
    SweepAxis axis{spec.substr(0, eq), {}};
    const std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size() && !rest.empty()) {
        const auto comma = rest.find(',', start);
        const std::string v = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        require(!v.empty(), ErrorCode::ValidationError, "axis '" + axis.key + "' has an empty value");
        axis.values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return axis;
}

std::vector<SweepMember> expand_sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes) {
    require(!axes.empty(), ErrorCode::InsufficientFamily, "sweep needs at least one axis");
    std::size_t total = 1;
    for (const auto& a : axes) {
        require(!a.values.empty(), ErrorCode::InsufficientFamily, "axis '" + a.key + "' is empty");
        total *= a.values.size();
    }
    std::vector<SweepMember> out;
    out.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        SweepMember m;
        m.index = i;
        m.role = i % 2 == 0 ? "calibration" : "hold-out";
        std::size_t rem = i;
        std::vector<std::size_t> pick(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            pick[a] = rem % axes[a].values.size();
            rem /= axes[a].values.size();
        }
        std::string label;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            m.overrides.emplace_back(axes[a].key, axes[a].values[pick[a]]);
            label += (a ? "," : "") + axes[a].key + "=" + axes[a].values[pick[a]];
        }
        m.config = with_overrides(base, m.overrides);
        m.config.name = base.name + "[" + label + "]";
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<ResultRecord> sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes,
                                const SweepOptions& options) {
    const auto members = expand_sweep(base, axes);
    const long count = static_cast<long>(members.size());
    std::vector<ScenarioMetrics> metrics(members.size());

    // Members are independent; each one runs its own kernels serially inside.
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) metrics[static_cast<std::size_t>(i)] = compute_metrics(members[i].config);

    std::vector<const ScenarioMetrics*> family;
    Calibration cal;
    for (const auto& m : members) {
        if (m.role == "calibration") {
            family.push_back(&metrics[m.index]);
            cal.members.push_back(m.index);
        }
    }
    const auto members_kept = cal.members;
    cal = fit_calibration(family, base.rates);
    cal.members = members_kept;

    std::unique_ptr<std::ofstream> progress;
    if (options.progress) {
        progress = std::make_unique<std::ofstream>(*options.progress, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(*progress), ErrorCode::IoError, "cannot open " + options.progress->string());
    }
    std::vector<ResultRecord> records;
    records.reserve(members.size());
    for (const auto& m : members) {
        records.push_back(evaluate(metrics[m.index], cal, m.index, m.role));
        if (progress) {
            *progress << dump_json(to_json(records.back())) << '\n';
            progress->flush();
        }
    }
    return records;
}

}  // namespace freqlab::harness
