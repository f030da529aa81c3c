// locinf: command-line driver for online influence maximization experiments.
//
// Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "locinf/config.hpp"
#include "locinf/enumeration.hpp"
#include "locinf/io.hpp"
#include "locinf/locinf.hpp"

namespace fs = std::filesystem;
using namespace locinf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Thrown for argument combinations the parser cannot catch by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> replicates;
    std::optional<std::size_t> samples;
    bool quiet = false;
};

struct Loaded {
    config::Document doc;
    GraphModel model;
    config::ExperimentConfig cfg;
};

Loaded load(const Overrides& o) {
    if (o.config_path.empty()) {
        throw UsageError("--config is required");
    }
    if (!fs::exists(o.config_path)) {
        throw ConfigError("config file not found: " + o.config_path);
    }
    config::Document doc = config::Document::load(o.config_path);
    GraphModel model = config::build_model(doc);
    config::ExperimentConfig cfg = config::parse_experiment(doc);
    if (o.seed) {
        cfg.run.seed = *o.seed;
        cfg.run.replicate_seeds = config::replicate_seeds(*o.seed, cfg.run.replicate_seeds.size());
    }
    if (o.replicates) {
        if (*o.replicates == 0) throw UsageError("--replicates must be >= 1");
        cfg.run.replicate_seeds = config::replicate_seeds(cfg.run.seed, *o.replicates);
    }
    if (o.out) cfg.run.output_dir = *o.out;
    if (o.threads) {
        if (*o.threads == 0) throw UsageError("--threads must be >= 1");
        cfg.run.threads = *o.threads;
    }
    if (o.samples) {
        if (*o.samples == 0) throw UsageError("--samples must be >= 1");
        cfg.ground_truth.mc_samples = *o.samples;
        cfg.validation_samples = *o.samples;
    }
    return {std::move(doc), std::move(model), std::move(cfg)};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

GroundTruth ground_truth_for(const Loaded& l, double alpha) {
    Rng rng(derive_seed(l.cfg.run.seed, stream_id::kGroundTruth));
    return compute_ground_truth(l.model, alpha, l.cfg.ground_truth.method, l.cfg.ground_truth.mc_samples, rng);
}

std::vector<RegretTrace> run_replicates(const GraphModel& model, const GroundTruth& gt, const PolicyConfig& policy,
                                        const std::vector<std::uint64_t>& seeds, std::size_t threads) {
    std::vector<RegretTrace> traces(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < seeds.size();) {
            try {
                traces[r] = run_replicate(model, gt, policy, seeds[r]);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(threads, seeds.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return traces;
}

int cmd_run(const Overrides& o) {
    const Loaded l = load(o);
    const fs::path out = l.cfg.run.output_dir;
    fs::create_directories(out);
    const GroundTruth gt = ground_truth_for(l, l.cfg.policy.alpha);
    const auto traces = run_replicates(l.model, gt, l.cfg.policy, l.cfg.run.replicate_seeds, l.cfg.run.threads);
    for (std::size_t r = 0; r < traces.size(); ++r) {
        std::ostringstream csv;
        io::write_trace_csv(csv, traces[r]);
        write_file(out / ("trace_" + std::to_string(r) + ".csv"), csv.str());
    }
    write_file(out / "summary.json", io::summary_json(l.cfg.policy, gt, traces).dump(2) + "\n");
    if (!o.quiet) {
        std::printf("policy %s  T=%zu  alpha=%g  replicates=%zu  c*=%g  c*_alpha=%g\n",
                    to_string(l.cfg.policy.kind), l.cfg.policy.horizon, l.cfg.policy.alpha, traces.size(),
                    gt.c_star, gt.c_star_alpha);
        std::printf("%10s %16s %16s\n", "round", "mean_regret", "stddev_regret");
        for (const auto& c : io::checkpoint_stats(traces, l.cfg.policy.horizon)) {
            std::printf("%10zu %16.4f %16.4f\n", c.round, c.mean, c.stddev);
        }
    }
    return kExitOk;
}

int cmd_ground_truth(const Overrides& o) {
    const Loaded l = load(o);
    const GroundTruth gt = ground_truth_for(l, l.cfg.policy.alpha);
    const auto j = io::to_json(gt);
    if (o.out) {
        fs::create_directories(*o.out);
        write_file(fs::path(*o.out) / "ground_truth.json", j.dump(2) + "\n");
    }
    if (!o.quiet) std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_branching(const Overrides& o) {
    const Loaded l = load(o);
    const BranchingSolution sol = solve_branching(l.model);
    auto print_vec = [](const char* name, const std::vector<double>& v) {
        std::printf("%s = (", name);
        for (std::size_t i = 0; i < v.size(); ++i) std::printf(i ? ", %.6f" : "%.6f", v[i]);
        std::printf(")\n");
    };
    if (!o.quiet) {
        std::printf("lambda_max = %.10g\nregime = %s\n", sol.lambda_max, to_string(sol.regime));
        print_vec("b", sol.b);
        if (sol.regime == Regime::Subcritical) print_vec("x", sol.x);
        if (sol.regime == Regime::Supercritical) print_vec("rho", sol.rho);
        std::cout << io::to_json(sol).dump() << "\n";
    }
    if (o.out) {
        fs::create_directories(*o.out);
        write_file(fs::path(*o.out) / "branching.json", io::to_json(sol).dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_validate_props(const Overrides& o) {
    const Loaded l = load(o);
    Rng rng(derive_seed(l.cfg.run.seed, stream_id::kValidation));
    const ValidationReport report = validate_propositions(l.model, l.cfg.validation_samples, rng);
    const auto j = io::to_json(report);
    if (o.out) {
        fs::create_directories(*o.out);
        write_file(fs::path(*o.out) / "validation.json", j.dump(2) + "\n");
    }
    if (!o.quiet) std::cout << j.dump(2) << "\n";
    return kExitOk;
}

struct OracleArgs {
    std::optional<std::size_t> n;
    std::optional<double> p;
    std::size_t vertex = 0;
    double threshold = 0.01;
};

int cmd_validate_oracle(const Overrides& o, const OracleArgs& a) {
    std::optional<GraphModel> model;
    std::uint64_t seed = o.seed.value_or(1);
    if (a.n || a.p) {
        if (!a.n || !a.p) throw UsageError("--n and --p must be given together");
        if (*a.n > enumeration::kMaxVertices) {
            throw UsageError("exhaustive mode supports n <= " + std::to_string(enumeration::kMaxVertices));
        }
        if (*a.n < 2) throw UsageError("--n must be >= 2");
        SbmParams p{*a.n, {1.0}, Eigen::MatrixXd::Constant(1, 1, *a.p * static_cast<double>(*a.n))};
        try {
            model = classify_regime(std::move(p));
        } catch (const InvalidModel& e) {
            throw ConfigError(std::string("--p: ") + e.what());
        }
    } else {
        Loaded l = load(o);
        if (l.model.n() > enumeration::kMaxVertices) {
            throw UsageError("exhaustive mode supports n <= " + std::to_string(enumeration::kMaxVertices) +
                             ", model has n = " + std::to_string(l.model.n()));
        }
        if (!o.seed) seed = l.cfg.run.seed;
        model = std::move(l.model);
    }
    const std::size_t samples = o.samples.value_or(1000000);
    if (samples == 0) throw UsageError("--samples must be >= 1");
    if (a.vertex >= model->n()) throw UsageError("--vertex out of range");

    const auto exact = enumeration::outcome_law(*model, a.vertex);
    Rng lazy_rng(derive_seed(seed, 0));
    Rng full_rng(derive_seed(seed, 1));
    Explorer explorer(*model);
    enumeration::OutcomeLaw lazy;
    enumeration::OutcomeLaw full;
    std::vector<double> graph_freq(enumeration::graph_law(*model).size(), 0.0);
    const double w = 1.0 / static_cast<double>(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto out = explorer.explore(a.vertex, lazy_rng);
        lazy[{out.degree, out.component_size}] += w;
        const SampledGraph g = sample_full_graph(*model, full_rng);
        full[{degree(g, a.vertex), connected_component(g, a.vertex).size()}] += w;
        graph_freq[enumeration::graph_mask(g)] += w;
    }
    const double tv_lazy = enumeration::total_variation(lazy, exact);
    const double tv_full = enumeration::total_variation(full, exact);
    const double tv_graph = enumeration::total_variation(graph_freq, enumeration::graph_law(*model));
    const bool pass = tv_lazy < a.threshold && tv_full < a.threshold && tv_graph < a.threshold;
    if (!o.quiet) {
        std::printf("n=%zu vertex=%zu samples=%zu threshold=%g\n", model->n(), a.vertex, samples, a.threshold);
        std::printf("TV(lazy_explore, exact)        = %.6f\n", tv_lazy);
        std::printf("TV(full graph outcome, exact)  = %.6f\n", tv_full);
        std::printf("TV(full graph law, exact)      = %.6f\n", tv_graph);
    }
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kExitOk : kExitRuntime;
}

int cmd_sweep(const Overrides& o) {
    const Loaded l = load(o);
    if (!l.cfg.sweep) {
        throw ConfigError(o.config_path + ": missing section [sweep]");
    }
    const fs::path out = l.cfg.run.output_dir;
    fs::create_directories(out);
    const GroundTruth base = ground_truth_for(l, l.cfg.policy.alpha);
    std::ostringstream csv;
    csv << "# schema=" << io::kCsvSchema << '\n';
    csv << "parameter,value,replicates,checkpoint,mean_regret,stddev_regret\n";
    for (double value : l.cfg.sweep->values) {
        PolicyConfig policy = l.cfg.policy;
        GroundTruth gt = base;
        const std::string& param = l.cfg.sweep->parameter;
        if (param == "alpha") {
            if (!(value > 0.0 && value < 1.0)) throw ConfigError("sweep.values: alpha must lie in (0, 1)");
            policy.alpha = value;
            build_baseline(gt, value);
        } else if (param == "T") {
            if (!(value >= 1.0)) throw ConfigError("sweep.values: T must be >= 1");
            policy.horizon = static_cast<std::size_t>(value);
        } else {
            if (!(value >= 2.0)) throw ConfigError("sweep.values: beta must be >= 2");
            policy.beta = value;
        }
        const auto traces = run_replicates(l.model, gt, policy, l.cfg.run.replicate_seeds, l.cfg.run.threads);
        for (const auto& c : io::checkpoint_stats(traces, policy.horizon)) {
            csv << param << ',' << io::format_real(value) << ',' << traces.size() << ',' << c.round << ','
                << io::format_real(c.mean) << ',' << io::format_real(c.stddev) << '\n';
        }
        if (!o.quiet) {
            const auto last = io::checkpoint_stats(traces, policy.horizon).back();
            std::printf("%s=%-10g final regret %.4f +- %.4f\n", param.c_str(), value, last.mean, last.stddev);
        }
    }
    write_file(out / "sweep.csv", csv.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online influence maximization with degree feedback on random graphs"};
    app.require_subcommand(1);

    Overrides o;
    OracleArgs oracle;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config_path, "Config file (model and experiment sections)");
        if (needs_config) c->required();
        sub->add_option("--seed", o.seed, "Base 64-bit seed (replicate seeds are derived from it)");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--threads", o.threads, "Worker threads for replicates");
        sub->add_option("--replicates", o.replicates, "Number of replicates");
        sub->add_option("--samples", o.samples, "Monte Carlo budget override");
        sub->add_flag("--quiet", o.quiet, "Suppress console output");
    };

    auto* run = app.add_subcommand("run", "Run replicates of a policy and write traces + summary");
    auto* gt = app.add_subcommand("ground-truth", "Compute expected component sizes and quantile baselines");
    auto* props = app.add_subcommand("validate-props", "Check degree/influence argmax agreement and gap bounds");
    auto* orc = app.add_subcommand("validate-oracle", "Compare lazy exploration and full sampling to enumeration");
    auto* br = app.add_subcommand("branching", "Print the branching-process solution of a model");
    auto* sweep = app.add_subcommand("sweep", "Run a policy over a grid of one parameter");
    for (auto* sub : {run, gt, props, br, sweep}) add_common(sub, true);
    add_common(orc, false);
    orc->add_option("--n", oracle.n, "Vertex count of a single-community model (instead of --config)");
    orc->add_option("--p", oracle.p, "Edge probability of the single-community model");
    orc->add_option("--vertex", oracle.vertex, "Vertex to explore");
    orc->add_option("--threshold", oracle.threshold, "Total-variation pass threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) return cmd_run(o);
        if (*gt) return cmd_ground_truth(o);
        if (*props) return cmd_validate_props(o);
        if (*orc) return cmd_validate_oracle(o, oracle);
        if (*br) return cmd_branching(o);
        if (*sweep) return cmd_sweep(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
