// czreach: reachability analysis and safety verification of discrete-time
// systems in closed loop with ReLU network controllers, on constrained
// zonotopes.
//
// Subcommands:
//   run     compute reach sets, check unsafe-set avoidance, write artifacts
//   sample  simulate seeded trajectories and report per-step containment
//   plot    render an SVG projection of a stored reach result

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "czreach/czreach.hpp"

namespace fs = std::filesystem;
using namespace czreach;

namespace {

struct DimPair {
    Eigen::Index i = 0;
    Eigen::Index j = 1;
};

DimPair parse_dims(const std::string& text) {
    // Accepts "x1,x2" or "1,2" (1-based).
    auto parse_one = [](std::string s) -> Eigen::Index {
        if (!s.empty() && (s[0] == 'x' || s[0] == 'X')) s = s.substr(1);
        const long v = std::strtol(s.c_str(), nullptr, 10);
        if (v < 1) throw DimensionError("plot: dimensions are 1-based, e.g. x1,x2");
        return static_cast<Eigen::Index>(v - 1);
    };
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw DimensionError("plot: expected two dimensions, e.g. x1,x2");
    return {parse_one(text.substr(0, comma)), parse_one(text.substr(comma + 1))};
}

std::vector<Eigen::Vector2d> project_samples(const Scenario& scenario, const ReachResult& reach,
                                             int n_samples, std::uint64_t seed, DimPair dims) {
    std::vector<Eigen::Vector2d> points;
    if (n_samples <= 0) return points;
    std::mt19937_64 rng(seed);
    SetSampler sampler(scenario.initial_set);
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd x = sampler.sample_point(rng);
        points.emplace_back(x(dims.i), x(dims.j));
        for (int t = 1; t <= reach.horizon(); ++t) {
            x = scenario.step(x);
            points.emplace_back(x(dims.i), x(dims.j));
        }
    }
    return points;
}

Scenario load_scenario_cli(const std::string& path) {
    try {
        return load_scenario(path);
    } catch (const std::exception& e) {
        const std::string what = e.what();
        if (what.find(path) != std::string::npos) throw;
        throw std::runtime_error(path + ": " + what);
    }
}

json containment_to_json(const ContainmentReport& report) {
    json contained = json::array();
    for (int c : report.contained) contained.push_back(c);
    return json{{"schema_version", kSchemaVersion},
                {"samples", report.samples},
                {"contained_per_step", contained},
                {"all_contained", report.all_contained()}};
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::string& plot_dims, int n_samples, long long seed_override,
            const std::string& method_override, long long max_members_override) {
    Scenario scenario = load_scenario_cli(scenario_path);
    if (!method_override.empty()) scenario.method = method_from_string(method_override);
    if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);
    if (max_members_override > 0) {
        scenario.budgets.max_members = static_cast<std::size_t>(max_members_override);
    }

    const RunOutput out = run_scenario(scenario);

    fs::create_directories(out_dir);
    write_json_atomic(fs::path(out_dir) / "result.json", reach_result_to_json(out.reach));
    write_json_atomic(fs::path(out_dir) / "report.json", report_to_json(out.report));

    if (n_samples > 0) {
        const ContainmentReport containment =
            sample_trajectories(scenario, out.reach, n_samples, scenario.seed);
        write_json_atomic(fs::path(out_dir) / "samples.json", containment_to_json(containment));
        std::cout << "containment:";
        for (int t = 0; t <= containment.horizon(); ++t) {
            std::cout << " t=" << t << ":" << containment.contained[static_cast<std::size_t>(t)]
                      << "/" << containment.samples;
        }
        std::cout << "\n";
    }
    if (!plot_dims.empty()) {
        const DimPair dims = parse_dims(plot_dims);
        std::vector<Eigen::Vector2d> overlay;
        if (n_samples > 0) {
            overlay = project_samples(scenario, out.reach, n_samples, scenario.seed, dims);
        }
        plot_reach(out.reach, dims.i, dims.j, fs::path(out_dir) / "reach.svg",
                   scenario.unsafe_sets, overlay);
    }

    double total_ms = 0.0;
    for (double ms : out.reach.timings_ms) total_ms += ms;
    std::cout << "method: " << out.reach.method << " (controller " << out.reach.controller
              << ")\n";
    std::cout << "steps: " << out.reach.horizon() << ", members at T: "
              << out.reach.steps.back().size() << "\n";
    std::cout << "reach time: " << total_ms << " ms, verification LPs: " << out.report.lp_count
              << " (" << out.report.lp_solved << " solved)\n";
    std::cout << "verdict: " << to_string(out.report.verdict) << "\n";
    return out.report.verdict == Verdict::Safe ? 0 : 2;
}

int cmd_sample(const std::string& scenario_path, int n_samples, long long seed_override,
               const std::string& result_path, const std::string& out_path) {
    Scenario scenario = load_scenario_cli(scenario_path);
    if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);
    ReachResult reach;
    if (!result_path.empty()) {
        reach = reach_result_from_json(parse_json_file(result_path));
    } else {
        reach = run_scenario(scenario).reach;
    }
    const ContainmentReport report =
        sample_trajectories(scenario, reach, n_samples, scenario.seed);
    if (!out_path.empty()) write_json_atomic(out_path, containment_to_json(report));
    std::cout << "samples: " << report.samples << "\n";
    for (int t = 0; t <= report.horizon(); ++t) {
        std::cout << "t=" << t << ": " << report.contained[static_cast<std::size_t>(t)] << "/"
                  << report.samples << " contained\n";
    }
    return 0;
}

int cmd_plot(const std::string& result_path, const std::string& dims_text,
             const std::string& out_path, const std::string& scenario_path) {
    const ReachResult reach = reach_result_from_json(parse_json_file(result_path));
    const DimPair dims = parse_dims(dims_text);
    std::vector<UnsafeSet> unsafe_sets;
    if (!scenario_path.empty()) {
        unsafe_sets = load_scenario_cli(scenario_path).unsafe_sets;
    }
    plot_reach(reach, dims.i, dims.j, out_path, unsafe_sets);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained-zonotope reachability for neural feedback systems"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", plot_dims, method_override, result_path, out_path;
    int n_samples = 0;
    long long seed_override = -1, max_members = 0;

    auto* run = app.add_subcommand("run", "Run a scenario end to end");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory (result.json, report.json, ...)");
    run->add_option("--plot", plot_dims, "Write reach.svg projected onto these dims, e.g. x1,x2");
    run->add_option("--samples", n_samples, "Also simulate N seeded trajectories");
    run->add_option("--seed", seed_override, "Override the scenario seed");
    run->add_option("--method", method_override,
                    "Override the method (exact | over | nonlinear-exact-controller | "
                    "nonlinear-over-controller)");
    run->add_option("--max-members", max_members, "Override the member cap");

    auto* sample = app.add_subcommand("sample", "Trajectory containment report");
    sample->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sample->add_option("--n", n_samples, "Number of trajectories")->required();
    sample->add_option("--seed", seed_override, "Override the scenario seed");
    sample->add_option("--result", result_path, "Reuse a stored result.json instead of recomputing");
    sample->add_option("--out", out_path, "Write the containment report JSON here");

    auto* plot = app.add_subcommand("plot", "Render a stored result to SVG");
    plot->add_option("result", result_path, "result.json file")->required();
    plot->add_option("--dims", plot_dims, "Projection dims, e.g. x1,x2 (default x1,x2)");
    plot->add_option("--out", out_path, "Output SVG path")->required();
    plot->add_option("--scenario", scenario_path, "Scenario JSON for unsafe-set shading");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, out_dir, plot_dims, n_samples, seed_override,
                           method_override, max_members);
        }
        if (sample->parsed()) {
            return cmd_sample(scenario_path, n_samples, seed_override, result_path, out_path);
        }
        if (plot->parsed()) {
            return cmd_plot(result_path, plot_dims.empty() ? "x1,x2" : plot_dims, out_path,
                            scenario_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
