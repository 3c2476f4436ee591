#ifndef CZREACH_SCENARIO_HPP
#define CZREACH_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "czreach/errors.hpp"
#include "czreach/expr.hpp"
#include "czreach/json_io.hpp"
#include "czreach/network.hpp"
#include "czreach/reach.hpp"
#include "czreach/verify.hpp"

namespace czreach {

enum class Method { Exact, Over, NonlinearExactController, NonlinearOverController };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Over: return "over";
        case Method::NonlinearExactController: return "nonlinear-exact-controller";
        case Method::NonlinearOverController: return "nonlinear-over-controller";
    }
    return "exact";
}

inline Method method_from_string(const std::string& s) {
    if (s == "exact") return Method::Exact;
    if (s == "over") return Method::Over;
    if (s == "nonlinear-exact-controller") return Method::NonlinearExactController;
    if (s == "nonlinear-over-controller") return Method::NonlinearOverController;
    throw SchemaError("scenario: unknown method \"" + s + "\".");
}

struct Budgets {
    std::size_t max_members = 100000;
    Eigen::Index max_generators = 0;   // 0 disables order reduction
    Eigen::Index max_constraints = 0;
    bool reduce_between_steps = false;
};

struct Scenario {
    std::string name;
    std::variant<LinearModel, NonlinearModel> model;
    std::string network_path;
    FeedforwardNetwork network;
    ConstrainedZonotope initial_set;
    int horizon = 1;
    std::vector<UnsafeSet> unsafe_sets;
    Method method = Method::Exact;
    std::uint64_t seed = 0;
    Budgets budgets;

    Eigen::Index state_dim() const {
        return std::holds_alternative<LinearModel>(model)
                   ? std::get<LinearModel>(model).state_dim()
                   : std::get<NonlinearModel>(model).n;
    }
    Eigen::Index control_dim() const {
        return std::holds_alternative<LinearModel>(model)
                   ? std::get<LinearModel>(model).input_dim()
                   : std::get<NonlinearModel>(model).B_d.cols();
    }

    /// One simulated closed-loop step.
    Eigen::VectorXd step(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd u = eval_network(network, x);
        if (std::holds_alternative<LinearModel>(model)) {
            const auto& m = std::get<LinearModel>(model);
            return m.A_d * x + m.B_d * u;
        }
        const auto& m = std::get<NonlinearModel>(model);
        return m.eval(x) + m.B_d * u;
    }

    ReachOptions reach_options() const {
        ReachOptions opts;
        opts.member_cap = budgets.max_members;
        opts.reduce_between_steps = budgets.reduce_between_steps;
        opts.max_generators = budgets.max_generators;
        opts.max_constraints = budgets.max_constraints;
        return opts;
    }
};

inline Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw SchemaError("scenario: expected an object.");
    Scenario s;
    s.name = j.value("name", std::string("scenario"));

    if (!j.contains("model") || !j["model"].is_object()) {
        throw SchemaError("scenario: missing \"model\" object.");
    }
    const json& mj = j["model"];
    const std::string type = mj.value("type", std::string(""));
    if (type == "linear") {
        LinearModel m;
        m.A_d = matrix_from_json(mj.at("A_d"), "model.A_d");
        m.B_d = matrix_from_json(mj.at("B_d"), "model.B_d");
        m.validate();
        s.model = std::move(m);
    } else if (type == "nonlinear") {
        if (!mj.contains("f") || !mj["f"].is_array()) {
            throw SchemaError("model: nonlinear model needs an \"f\" array of expressions.");
        }
        std::vector<std::string> exprs;
        for (const auto& e : mj["f"]) {
            if (!e.is_string()) throw SchemaError("model.f: expected expression strings.");
            exprs.push_back(e.get<std::string>());
        }
        Eigen::MatrixXd B_d = matrix_from_json(mj.at("B_d"), "model.B_d");
        try {
            s.model = NonlinearModel::from_strings(exprs, std::move(B_d));
        } catch (const SyntaxError& e) {
            throw SchemaError(std::string("model.f: ") + e.what());
        }
    } else {
        throw SchemaError("model: \"type\" must be \"linear\" or \"nonlinear\".");
    }

    if (!j.contains("network") || !j["network"].is_string()) {
        throw SchemaError("scenario: missing \"network\" file path.");
    }
    const std::filesystem::path net_path = base_dir / j["network"].get<std::string>();
    if (!std::filesystem::exists(net_path)) {
        throw SchemaError("scenario: network file does not exist: " + net_path.string());
    }
    s.network_path = net_path.string();
    s.network = load_network(net_path);

    s.initial_set = cz_from_json(j.at("initial_set"), "initial_set");
    s.horizon = j.value("horizon", 0);
    if (s.horizon < 1) throw SchemaError("scenario: horizon must be at least 1.");

    if (j.contains("unsafe_sets")) {
        if (!j["unsafe_sets"].is_array()) throw SchemaError("scenario: unsafe_sets must be an array.");
        std::size_t k = 0;
        for (const auto& oj : j["unsafe_sets"]) {
            const std::string where = "unsafe_sets[" + std::to_string(k++) + "]";
            UnsafeSet o;
            o.label = oj.value("label", where);
            o.region = cz_from_json(oj.at("set"), where + ".set");
            if (is_empty(o.region)) throw SchemaError(where + ": unsafe set is empty.");
            s.unsafe_sets.push_back(std::move(o));
        }
    }

    s.method = method_from_string(j.value("method", std::string("exact")));
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("budgets") && j["budgets"].is_object()) {
        const json& bj = j["budgets"];
        s.budgets.max_members = bj.value("max_members", std::size_t{100000});
        s.budgets.max_generators = bj.value("max_generators", Eigen::Index{0});
        s.budgets.max_constraints = bj.value("max_constraints", Eigen::Index{0});
        s.budgets.reduce_between_steps = bj.value("reduce_between_steps", false);
    }

    // Cross-field consistency.
    const bool nonlinear_method = s.method == Method::NonlinearExactController ||
                                  s.method == Method::NonlinearOverController;
    if (nonlinear_method != std::holds_alternative<NonlinearModel>(s.model)) {
        throw SchemaError("scenario: method \"" + to_string(s.method) +
                          "\" does not match the model type.");
    }
    if (s.initial_set.dim() != s.state_dim()) {
        throw SchemaError("scenario: initial_set dimension != model state dimension.");
    }
    if (s.network.input_dim() != s.state_dim() || s.network.output_dim() != s.control_dim()) {
        throw SchemaError("scenario: network dimensions do not match the model.");
    }
    for (const auto& o : s.unsafe_sets) {
        if (o.region.dim() != s.state_dim()) {
            throw SchemaError("scenario: unsafe set dimension != state dimension.");
        }
    }
    if (is_empty(s.initial_set)) throw SchemaError("scenario: initial set is empty.");
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(parse_json_file(path), path.parent_path());
}

struct RunOutput {
    ReachResult reach;
    VerificationReport report;
};

/// Computes the reach sets for the scenario's method and checks avoidance of
/// its unsafe sets (complete check on the exact path, sufficient-only otherwise).
inline RunOutput run_scenario(const Scenario& s) {
    RunOutput out;
    const ReachOptions opts = s.reach_options();
    switch (s.method) {
        case Method::Exact:
            out.reach = reach_exact(s.initial_set, std::get<LinearModel>(s.model), s.network,
                                    s.horizon, opts);
            break;
        case Method::Over:
            out.reach = reach_over(s.initial_set, std::get<LinearModel>(s.model), s.network,
                                   s.horizon, opts);
            break;
        case Method::NonlinearExactController:
        case Method::NonlinearOverController:
            out.reach = reach_nonlinear(s.initial_set, std::get<NonlinearModel>(s.model),
                                        s.network, s.horizon,
                                        s.method == Method::NonlinearOverController, opts);
            break;
    }
    if (out.reach.exact_sets) {
        out.report = check_avoid_exact(out.reach, s.unsafe_sets);
    } else {
        out.report = check_avoid_over(out.reach, s.unsafe_sets);
    }
    return out;
}

} // namespace czreach

#endif
