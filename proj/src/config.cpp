#include "nrpb/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "nrpb/error.hpp"

namespace nrpb {

namespace {

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorCode::InvalidConfig, what);
}

void require_object(const Json& j, const std::string& where)
{
    if (!j.is_object()) {
        bad(where + " must be a JSON object");
    }
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            bad("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const Json& j, const std::string& key)
{
    const Json& v = j.at(key);
    if (!v.is_number()) {
        bad("'" + key + "' must be a number");
    }
    return v.get<double>();
}

int integer(const Json& j, const std::string& key)
{
    const Json& v = j.at(key);
    if (!v.is_number_integer()) {
        bad("'" + key + "' must be an integer");
    }
    return v.get<int>();
}

std::string text(const Json& j, const std::string& key)
{
    const Json& v = j.at(key);
    if (!v.is_string()) {
        bad("'" + key + "' must be a string");
    }
    return v.get<std::string>();
}

// A shorthand key and its explicit expansions may not be mixed.
void exclusive(const Json& j, const std::string& shorthand, std::initializer_list<const char*> keys)
{
    if (!j.contains(shorthand)) {
        return;
    }
    for (const char* k : keys) {
        if (j.contains(k)) {
            bad("'" + shorthand + "' conflicts with '" + k + "'");
        }
    }
}

SystemParams parse_params(const Json& j)
{
    require_object(j, "params");
    reject_unknown(j,
                   {"delta", "delta_a", "delta_b", "delta_c", "u", "u_a", "u_c", "j", "j_ab",
                    "j_bc", "j_ac", "theta", "theta_over_pi", "omega", "kappa", "kappa_a",
                    "kappa_c", "kappa_b"},
                   "params");
    exclusive(j, "delta", {"delta_a", "delta_b", "delta_c"});
    exclusive(j, "u", {"u_a", "u_c"});
    exclusive(j, "j", {"j_ab", "j_bc"});
    exclusive(j, "kappa", {"kappa_a", "kappa_c"});
    exclusive(j, "theta", {"theta_over_pi"});

    SystemParams p = reference_params();
    if (j.contains("delta")) p.set_detuning(number(j, "delta"));
    if (j.contains("delta_a")) p.delta_a = number(j, "delta_a");
    if (j.contains("delta_b")) p.delta_b = number(j, "delta_b");
    if (j.contains("delta_c")) p.delta_c = number(j, "delta_c");
    if (j.contains("u")) p.u_a = p.u_c = number(j, "u");
    if (j.contains("u_a")) p.u_a = number(j, "u_a");
    if (j.contains("u_c")) p.u_c = number(j, "u_c");
    if (j.contains("j")) p.j_ab = p.j_bc = number(j, "j");
    if (j.contains("j_ab")) p.j_ab = number(j, "j_ab");
    if (j.contains("j_bc")) p.j_bc = number(j, "j_bc");
    if (j.contains("j_ac")) p.j_ac = number(j, "j_ac");
    if (j.contains("theta")) p.theta = number(j, "theta");
    if (j.contains("theta_over_pi")) p.theta = number(j, "theta_over_pi") * std::numbers::pi;
    if (j.contains("omega")) p.omega = number(j, "omega");
    if (j.contains("kappa")) p.kappa_a = p.kappa_c = number(j, "kappa");
    if (j.contains("kappa_a")) p.kappa_a = number(j, "kappa_a");
    if (j.contains("kappa_c")) p.kappa_c = number(j, "kappa_c");
    if (j.contains("kappa_b")) p.kappa_b = number(j, "kappa_b");
    return p;
}

std::vector<int> parse_dims(const Json& j)
{
    if (j.is_number_integer()) {
        const int d = j.get<int>();
        return {d, d, d};
    }
    if (j.is_array() && j.size() == 3 &&
        std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number_integer(); })) {
        return j.get<std::vector<int>>();
    }
    bad("'dims' must be an integer or a list of three integers");
}

SteadyStateOptions parse_solver(const Json& j)
{
    require_object(j, "solver");
    reject_unknown(j, {"method", "residual_tol", "hermitize", "krylov_tol", "krylov_restart",
                       "krylov_max_iterations"},
                   "solver");
    SteadyStateOptions s;
    if (j.contains("method")) s.method = steady_state_method_from_string(text(j, "method"));
    if (j.contains("residual_tol")) s.residual_tol = number(j, "residual_tol");
    if (j.contains("hermitize")) {
        if (!j.at("hermitize").is_boolean()) bad("'hermitize' must be a boolean");
        s.hermitize = j.at("hermitize").get<bool>();
    }
    if (j.contains("krylov_tol")) s.krylov_tol = number(j, "krylov_tol");
    if (j.contains("krylov_restart")) s.krylov_restart = integer(j, "krylov_restart");
    if (j.contains("krylov_max_iterations")) {
        s.krylov_max_iterations = integer(j, "krylov_max_iterations");
    }
    if (!(s.residual_tol > 0.0) || !(s.krylov_tol > 0.0) || s.krylov_restart < 1 ||
        s.krylov_max_iterations < 1) {
        bad("solver tolerances and iteration limits must be positive");
    }
    return s;
}

const std::set<std::string> point_keys{"params", "dims", "solver", "population_floor",
                                       "convergence_check"};

PointConfig parse_point_fields(const Json& doc)
{
    PointConfig c;
    if (doc.contains("params")) c.params = parse_params(doc.at("params"));
    if (doc.contains("dims")) c.dims = parse_dims(doc.at("dims"));
    if (doc.contains("solver")) c.solver = parse_solver(doc.at("solver"));
    if (doc.contains("population_floor")) {
        c.population_floor = number(doc, "population_floor");
        if (!(c.population_floor >= 0.0)) bad("'population_floor' must be non-negative");
    }
    if (doc.contains("convergence_check")) {
        if (!doc.at("convergence_check").is_boolean()) bad("'convergence_check' must be a boolean");
        c.convergence_check = doc.at("convergence_check").get<bool>();
    }
    for (int d : c.dims) {
        if (d < 2) {
            throw Error(ErrorCode::InvalidDimension, "mode dimensions must be >= 2");
        }
    }
    return c;
}

} // namespace

Json load_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        bad("cannot open '" + path.string() + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        bad("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

PointConfig parse_point_config(const Json& doc)
{
    require_object(doc, "point config");
    reject_unknown(doc, point_keys, "point config");
    try {
        return parse_point_fields(doc);
    } catch (const Json::exception& e) {
        bad(e.what());
    }
}

SweepSpec parse_sweep_spec(const Json& doc)
{
    require_object(doc, "sweep spec");
    std::set<std::string> known = point_keys;
    known.insert({"axes", "directions", "outputs", "max_points"});
    reject_unknown(doc, known, "sweep spec");

    try {
        SweepSpec s;
        s.base = parse_point_fields(doc);
        if (!doc.contains("axes") || !doc.at("axes").is_array()) {
            bad("sweep spec needs an 'axes' list");
        }
        for (const Json& a : doc.at("axes")) {
            require_object(a, "axis");
            reject_unknown(a, {"parameter", "start", "stop", "count"}, "axis");
            SweepAxis axis;
            axis.parameter = axis_parameter_from_string(text(a, "parameter"));
            axis.start = number(a, "start");
            axis.stop = number(a, "stop");
            axis.count = integer(a, "count");
            s.axes.push_back(axis);
        }
        if (doc.contains("directions")) s.directions = directions_from_string(text(doc, "directions"));
        if (doc.contains("outputs")) {
            const Json& o = doc.at("outputs");
            if (!o.is_array() || !std::all_of(o.begin(), o.end(),
                                              [](const Json& v) { return v.is_string(); })) {
                bad("'outputs' must be a list of column names");
            }
            s.outputs = o.get<std::vector<std::string>>();
        }
        if (doc.contains("max_points")) {
            const Json& m = doc.at("max_points");
            if (!m.is_number_integer()) bad("'max_points' must be an integer");
            s.max_points = m.get<std::int64_t>();
        }
        validate(s);
        return s;
    } catch (const Json::exception& e) {
        bad(e.what());
    }
}

void override_dims(PointConfig& config, int dim)
{
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "--dims must be >= 2");
    }
    config.dims = {dim, dim, dim};
}

Json to_json(const SystemParams& p)
{
    return Json{{"delta_a", p.delta_a}, {"delta_b", p.delta_b}, {"delta_c", p.delta_c},
                {"u_a", p.u_a},         {"u_c", p.u_c},         {"j_ab", p.j_ab},
                {"j_bc", p.j_bc},       {"j_ac", p.j_ac},       {"theta", p.theta},
                {"omega", p.omega},     {"kappa_a", p.kappa_a}, {"kappa_c", p.kappa_c},
                {"kappa_b", p.kappa_b}, {"drive", to_string(p.drive)}};
}

Json to_json(const PointConfig& c)
{
    Json params = to_json(c.params);
    params.erase("drive");
    return Json{{"params", params},
                {"dims", c.dims},
                {"solver",
                 {{"method", to_string(c.solver.method)},
                  {"residual_tol", c.solver.residual_tol},
                  {"hermitize", c.solver.hermitize},
                  {"krylov_tol", c.solver.krylov_tol},
                  {"krylov_restart", c.solver.krylov_restart},
                  {"krylov_max_iterations", c.solver.krylov_max_iterations}}},
                {"population_floor", c.population_floor},
                {"convergence_check", c.convergence_check}};
}

Json to_json(const SweepSpec& s)
{
    Json doc = to_json(s.base);
    Json axes = Json::array();
    for (const auto& a : s.axes) {
        axes.push_back({{"parameter", to_string(a.parameter)},
                        {"start", a.start},
                        {"stop", a.stop},
                        {"count", a.count}});
    }
    doc["axes"] = axes;
    doc["directions"] = to_string(s.directions);
    doc["outputs"] = s.outputs;
    doc["max_points"] = s.max_points;
    return doc;
}

} // namespace nrpb
