#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowlab/commands.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/report.hpp"

namespace {

struct Flags {
    std::string op;
    std::vector<std::string> inputs;
    std::string out;
    std::optional<long> horizon, seed, lp_limit, depth, budget, g, k, samples, radius;
    std::optional<double> threshold, eps_trunc, kappa, omega, s_max;
    std::optional<std::string> mode, metric;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--horizon", f.horizon, "Index window N");
    app->add_option("--seed", f.seed, "Random seed (recorded in every report)");
    app->add_option("--threshold-diverge", f.threshold, "Partial-sum threshold for the divergence witness");
    app->add_option("--lp-limit", f.lp_limit, "Atom limit for exact transport");
    app->add_option("--eps-trunc", f.eps_trunc, "Truncation tolerance for compound Poisson laws");
    app->add_option("--out", f.out, "Output directory for report.json and series CSVs");
}

flowlab::Json options_of(const Flags& f, const char* selector) {
    flowlab::Json o = flowlab::Json::object();
    if (!f.op.empty()) o[selector] = f.op;
    auto put = [&](const char* key, const auto& v) {
        if (v) o[key] = *v;
    };
    put("horizon", f.horizon);
    put("seed", f.seed);
    put("threshold_diverge", f.threshold);
    put("lp_limit", f.lp_limit);
    put("eps_trunc", f.eps_trunc);
    put("kappa", f.kappa);
    put("omega", f.omega);
    put("depth", f.depth);
    put("budget", f.budget);
    put("g", f.g);
    put("k", f.k);
    put("samples", f.samples);
    put("radius", f.radius);
    put("s_max", f.s_max);
    put("mode", f.mode);
    put("metric", f.metric);
    return o;
}

void emit(const flowlab::Report& r, const std::string& out) {
    const std::string ts = flowlab::utc_timestamp();
    if (out.empty()) {
        std::cout << r.full(ts).dump(2) << "\n";
    } else {
        flowlab::write_report(r, out, ts);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowlab: certificates for nonsingular Bernoulli shifts, tail boundary flows and Poisson pipelines"};
    app.require_subcommand(1);
    Flags f;

    auto* metric = app.add_subcommand("metric", "Distance between two measures");
    metric->add_option("--kind", f.op, "hellinger | tv | w2 | w2k")->required();
    metric->add_option("--kappa", f.kappa, "Cutoff for w2k");
    metric->add_option("--mode", f.mode, "exact | monotone (w2k)");
    metric->add_option("inputs", f.inputs, "Two measure files")->required()->expected(2);

    auto* tail = app.add_subcommand("tail", "Tail boundary certificates for a measure sequence");
    tail->add_option("--op", f.op, "eigen | period | concentrate | equiv | walk")->required();
    tail->add_option("--omega", f.omega, "Frequency for eigen");
    tail->add_option("--kappa", f.kappa, "Cutoff for equiv with w2k");
    tail->add_option("--metric", f.metric, "hellinger | tv | w2k (equiv)");
    tail->add_option("--samples", f.samples, "Sample count for walk");
    tail->add_option("config", f.inputs, "Sequence config (TOML)")->required()->expected(1);

    auto* pipe = app.add_subcommand("pipeline", "Constructive conversions between flow specs");
    pipe->add_option("--op", f.op,
                     "itpfi2poisson | poisson2itpfi | 2pt2poisson | poisson22pt | almostperiodic | split | binomcheck | itpfireduce")
        ->required();
    pipe->add_option("--depth", f.depth, "Block count for almostperiodic");
    pipe->add_option("--budget", f.budget, "Translation search budget for almostperiodic");
    pipe->add_option("input", f.inputs, "Input document (TOML or JSON)")->required()->expected(1);

    auto* bern = app.add_subcommand("bernoulli", "Analysis of a nonsingular Bernoulli family");
    bern->add_option("--op", f.op, "kakutani | cocycle | dissipative | bridge | core | type2a | type2b | structure")
        ->required();
    bern->add_option("--g", f.g, "Group element for kakutani");
    bern->add_option("--k", f.k, "Shift for cocycle");
    bern->add_option("--depth", f.depth, "Depth for bridge");
    bern->add_option("config", f.inputs, "Family config (TOML)")->required()->expected(1);

    auto* susp = app.add_subcommand("suspend", "Poisson suspension generator");
    susp->add_option("--op", f.op, "kappa | growth | select | emit | flowspec")->required();
    susp->add_option("--g", f.g, "Group element for kappa");
    susp->add_option("--radius", f.radius, "Probe radius for growth");
    susp->add_option("--s-max", f.s_max, "Largest s in the growth grid");
    susp->add_option("--omega", f.omega, "Frequency for the flowspec eigenvalue check");
    susp->add_option("config", f.inputs, "Intensity spec (TOML)")->required()->expected(1);

    auto* run = app.add_subcommand("run", "Batch file of jobs");
    run->add_option("jobs", f.inputs, "Batch file (TOML)")->required()->expected(1);

    for (auto* sub : {metric, tail, pipe, bern, susp, run}) add_common(sub, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        flowlab::Report r;
        if (run->parsed()) {
            r = flowlab::run_batch(f.inputs.front(), flowlab::utc_timestamp());
        } else {
            flowlab::CommandInput in;
            in.command = app.get_subcommands().front()->get_name();
            in.options = options_of(f, metric->parsed() ? "kind" : "op");
            for (const auto& p : f.inputs) in.inputs.emplace_back(p);
            r = flowlab::execute(in);
        }
        emit(r, f.out);
        return 0;
    } catch (const std::exception& e) {
        int code = flowlab::exit_code_for(e);
        const char* what = code == 1 ? "error: "
                           : dynamic_cast<const flowlab::BoundViolation*>(&e) ? "bound violation: "
                                                                               : "internal check failed: ";
        std::cerr << "flowlab: " << what << e.what() << "\n";
        return code;
    }
}
