#include "nrpb/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "nrpb/error.hpp"
#include "nrpb/scattering.hpp"

namespace nrpb {

namespace {

using std::numbers::pi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

PointConfig scenario_base(const ScenarioOptions& opt, int default_dim = default_mode_dim)
{
    PointConfig c;
    c.dims = {default_dim, default_dim, default_dim};
    if (opt.dims) {
        override_dims(c, *opt.dims);
    }
    return c;
}

SweepAxis axis(AxisParameter p, double start, double stop, int count)
{
    return SweepAxis{p, start, stop, count};
}

SweepSpec make_spec(const PointConfig& base, std::vector<SweepAxis> axes,
                    std::vector<std::string> outputs)
{
    SweepSpec s;
    s.base = base;
    s.axes = std::move(axes);
    s.outputs = std::move(outputs);
    return s;
}

void note(Output& out, const std::string& text)
{
    out.manifest["notes"].push_back(text);
}

const SweepAxis delta_axis = axis(AxisParameter::Delta, -3.0, 3.0, 61);
const SweepAxis kappa_b_axis = axis(AxisParameter::KappaB, 0.0, 2.0, 41);
const SweepAxis kappa_b_fine = axis(AxisParameter::KappaB, 0.0, 2.0, 81);
const SweepAxis theta_axis = axis(AxisParameter::Theta, 0.0, pi, 61);
const SweepAxis theta_fine = axis(AxisParameter::Theta, 0.0, pi, 81);

const std::vector<std::string> t_cols{"t_fwd", "t_bwd", "isolation"};
const std::vector<std::string> g2_cols{"g2_fwd", "g2_bwd", "ratio"};

PointConfig two_cavity(PointConfig c)
{
    c.params.j_ab = c.params.j_bc = 0.0;
    return c;
}

// -- fig3: photon-number distributions against the Poisson reference ---------

Output photon_statistics(const ScenarioOptions& opt)
{
    const auto start = Clock::now();
    const PointConfig base = scenario_base(opt);
    const std::vector<double> losses{1.0, 1.25};
    std::vector<PointOutcome> outcomes(losses.size());
    parallel_for(static_cast<std::int64_t>(losses.size()), opt.jobs, [&](std::int64_t i) {
        PointConfig c = base;
        c.params.kappa_b = losses[static_cast<std::size_t>(i)];
        outcomes[static_cast<std::size_t>(i)] = evaluate_point(c);
    });

    Output out;
    out.stem = "fig3_pm";
    out.table.columns = {"kappa_b", "drive", "mode", "m", "p", "poisson", "deviation", "error"};
    double residual_max = 0.0;
    int failed = 0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const PointOutcome& o = outcomes[i];
        if (!o.ok()) {
            ++failed;
            out.table.rows.push_back({losses[i], std::monostate{}, std::monostate{},
                                      std::monostate{}, std::monostate{}, std::monostate{},
                                      std::monostate{}, o.flags});
            continue;
        }
        residual_max = std::max({residual_max, o.fwd_info->residual, o.bwd_info->residual});
        // Output cavity of each drive: c for the left drive, a for the right.
        const struct {
            const char* drive;
            const char* mode;
            const DirectionalObservables& obs;
            double mean;
        } sides[] = {{"left", "c", *o.fwd, o.fwd->mean_n_c}, {"right", "a", *o.bwd, o.bwd->mean_n_a}};
        for (const auto& s : sides) {
            const int m_max = static_cast<int>(s.obs.p_m.size()) - 1;
            const std::vector<double> poisson = poisson_reference(s.mean, m_max);
            for (int m = 0; m <= m_max; ++m) {
                const double p = s.obs.p_m[static_cast<std::size_t>(m)];
                const double q = poisson[static_cast<std::size_t>(m)];
                out.table.rows.push_back({losses[i], std::string(s.drive), std::string(s.mode),
                                          std::int64_t{m}, p, q, p - q, std::string()});
            }
        }
    }
    out.manifest = {{"name", out.stem},
                    {"kind", "points"},
                    {"parameters", to_json(base)},
                    {"truncation", base.dims},
                    {"kappa_b", losses},
                    {"rows", out.table.rows.size()},
                    {"failed_points", failed},
                    {"residual_max", residual_max},
                    {"wall_time_s", seconds_since(start)}};
    return out;
}

// -- smatrix-check: closed form, linear network and master equation ---------

// Relative errors are taken against max(T, t_floor) so that an exact zero
// of the closed form does not turn solver noise into an infinite ratio.
constexpr double t_floor = 1e-6;

Output smatrix_check(const ScenarioOptions& opt)
{
    const auto start = Clock::now();
    PointConfig base = scenario_base(opt, 4);
    base.params.u_a = base.params.u_c = 0.0;
    base.params.omega = 0.01;

    const std::vector<double> losses{0.5, 1.0, 1.5};
    const int n_delta = delta_axis.count;
    const std::int64_t total = static_cast<std::int64_t>(losses.size()) * n_delta;

    Output out;
    out.stem = "smatrix-check";
    out.table.columns = {"kappa_b",        "delta",          "t_fwd_closed",   "t_bwd_closed",
                         "t_fwd_smatrix",  "t_bwd_smatrix",  "t_fwd_master",   "t_bwd_master",
                         "closed_vs_smatrix", "closed_vs_master", "error"};
    out.table.rows.resize(static_cast<std::size_t>(total));
    std::vector<double> residuals(static_cast<std::size_t>(total), 0.0);

    parallel_for(
        total, opt.jobs,
        [&](std::int64_t index) {
            PointConfig c = base;
            const double kb = losses[static_cast<std::size_t>(index / n_delta)];
            const double delta = delta_axis.value(static_cast<int>(index % n_delta));
            c.params.kappa_b = kb;
            c.params.set_detuning(delta);

            const LinearModel lm = linear_model(c.params);
            const ClosedFormTransmission cf = transmission_closed_form(lm, -delta);
            const SMatrix s = scattering_matrix(lm, 0.0);
            const double sm_diff =
                std::max(std::abs(cf.t_fwd - s.t_fwd()), std::abs(cf.t_bwd - s.t_bwd()));

            std::vector<Cell> row{kb, delta, cf.t_fwd, cf.t_bwd, s.t_fwd(), s.t_bwd()};
            const PointOutcome o = evaluate_point(c);
            if (o.fwd && o.bwd) {
                const double rel =
                    std::max(std::abs(o.fwd->transmission - cf.t_fwd) / std::max(cf.t_fwd, t_floor),
                             std::abs(o.bwd->transmission - cf.t_bwd) / std::max(cf.t_bwd, t_floor));
                row.insert(row.end(), {o.fwd->transmission, o.bwd->transmission, sm_diff, rel,
                                       o.flags});
                residuals[static_cast<std::size_t>(index)] =
                    std::max(o.fwd_info->residual, o.bwd_info->residual);
            } else {
                row.insert(row.end(), {std::monostate{}, std::monostate{}, sm_diff,
                                       std::monostate{}, o.flags});
            }
            out.table.rows[static_cast<std::size_t>(index)] = std::move(row);
        },
        opt.progress);

    int failed = 0;
    for (const auto& row : out.table.rows) {
        failed += std::holds_alternative<std::monostate>(row[6]) ? 1 : 0;
    }
    out.manifest = {{"name", out.stem},
                    {"kind", "points"},
                    {"parameters", to_json(base)},
                    {"truncation", base.dims},
                    {"kappa_b", losses},
                    {"delta", {{"start", delta_axis.start}, {"stop", delta_axis.stop},
                               {"count", delta_axis.count}}},
                    {"rows", out.table.rows.size()},
                    {"failed_points", failed},
                    {"residual_max", *std::max_element(residuals.begin(), residuals.end())},
                    {"wall_time_s", seconds_since(start)}};
    note(out, "closed_vs_smatrix is the absolute difference");
    note(out, "closed_vs_master is |T_master - T_closed| / max(T_closed, 1e-6)");
    return out;
}

// -- conditions-check: both optimal conditions through the S-matrix --------

Output conditions_check(const ScenarioOptions&)
{
    const auto start = Clock::now();
    Output out;
    out.stem = "conditions-check";
    out.table.columns = {"theta",         "direction", "delta",         "j_ac",
                         "theta_applied", "sign_folded", "t_fwd",       "t_bwd",
                         "transmission_residual", "amplitude_residual", "phase_residual"};

    const int count = 72;
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        // Offset by half a step so sin(theta) never vanishes.
        const double theta = -pi + (k + 0.5) * 2.0 * pi / count;
        for (Direction dir : {Direction::Forward, Direction::Backward}) {
            const OptimalCondition cond = optimal_condition(dir, theta, 1.0);
            const SystemParams p = apply(cond, reference_params());
            const SMatrix s = scattering_matrix(linear_model(p), 0.0);
            const bool fwd = dir == Direction::Forward;
            const double residual = fwd ? std::max(std::abs(s.t_fwd() - 1.0), s.t_bwd())
                                        : std::max(std::abs(s.t_bwd() - 1.0), s.t_fwd());
            const PhaseMatchingResidual pm = phase_matching_residual(p, cond.delta);
            worst = std::max(worst, residual);
            out.table.rows.push_back({theta, std::string(fwd ? "forward" : "backward"),
                                      cond.delta, cond.j_ac, cond.theta,
                                      std::int64_t{cond.sign_folded ? 1 : 0}, s.t_fwd(),
                                      s.t_bwd(), residual, pm.amplitude, pm.phase});
        }
    }
    out.manifest = {{"name", out.stem},
                    {"kind", "linear"},
                    {"kappa", 1.0},
                    {"rows", out.table.rows.size()},
                    {"transmission_residual_max", worst},
                    {"wall_time_s", seconds_since(start)}};
    return out;
}

Output sweep(const std::string& stem, const SweepSpec& spec, const ScenarioOptions& opt)
{
    return sweep_output(stem, spec, opt.jobs, opt.progress);
}

} // namespace

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names{
        "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3",
        "fig4",  "fig5a", "fig5b", "fig5c", "smatrix-check", "conditions-check"};
    return names;
}

Output sweep_output(const std::string& stem, const SweepSpec& spec, unsigned jobs,
                    const ProgressCallback& progress)
{
    const auto start = Clock::now();
    const SweepResult result = run_sweep(spec, jobs, progress);
    Output out;
    out.stem = stem;
    out.table = to_table(result, spec.outputs);

    double residual_max = 0.0;
    int failed = 0;
    for (const auto& row : result.rows) {
        if (!row.outcome.ok()) {
            ++failed;
        }
        for (const auto& info : {row.outcome.fwd_info, row.outcome.bwd_info}) {
            if (info) {
                residual_max = std::max(residual_max, info->residual);
            }
        }
    }
    out.manifest = {{"name", stem},
                    {"kind", "sweep"},
                    {"parameters", to_json(spec)},
                    {"truncation", result.dims},
                    {"rows", result.rows.size()},
                    {"failed_points", failed},
                    {"residual_max", residual_max},
                    {"jobs", resolve_jobs(jobs)},
                    {"wall_time_s", seconds_since(start)}};
    return out;
}

std::vector<Output> run_scenario(const std::string& name, const ScenarioOptions& opt)
{
    const PointConfig base = scenario_base(opt);
    const auto at_delta = [&](double delta) {
        PointConfig c = base;
        c.params.set_detuning(delta);
        return c;
    };
    const std::string reconstructed = "axis ranges are reconstructions of the plotted ranges";

    if (name == "fig2a" || name == "fig2d") {
        const bool t = name == "fig2a";
        Output o = sweep(name, make_spec(two_cavity(base), {delta_axis}, t ? t_cols : g2_cols), opt);
        note(o, "two-cavity limit: J_ab = J_bc = 0 with kappa_b = 1 keeps b in vacuum");
        return {std::move(o)};
    }
    if (name == "fig2b" || name == "fig2e") {
        const bool t = name == "fig2b";
        const SweepAxis losses = axis(AxisParameter::KappaB, 0.0, 1.0, 2);
        return {sweep(name, make_spec(base, {losses, delta_axis}, t ? t_cols : g2_cols), opt)};
    }
    if (name == "fig2c" || name == "fig2f") {
        const bool t = name == "fig2c";
        const auto cols = t ? t_cols : g2_cols;
        Output grid = sweep(name, make_spec(base, {delta_axis, kappa_b_axis}, cols), opt);
        note(grid, reconstructed);
        Output inset = sweep(name + "_inset", make_spec(at_delta(0.5), {kappa_b_axis}, cols), opt);
        return {std::move(grid), std::move(inset)};
    }
    if (name == "fig3") {
        Output curves = sweep(name, make_spec(at_delta(0.5), {kappa_b_fine},
                                              {"g2_fwd", "g2_bwd", "g3_fwd", "g3_bwd"}),
                              opt);
        return {std::move(curves), photon_statistics(opt)};
    }
    if (name == "fig4") {
        return {sweep(name, make_spec(at_delta(0.5), {kappa_b_fine},
                                      {"p1_fwd", "p2_fwd", "p3_fwd", "p1_bwd", "p2_bwd", "p3_bwd",
                                       "mean_n_c_fwd", "mean_n_a_bwd"}),
                      opt)};
    }
    if (name == "fig5a" || name == "fig5b") {
        const bool t = name == "fig5a";
        Output o = sweep(name, make_spec(at_delta(0.5), {theta_axis, kappa_b_axis},
                                         t ? t_cols : g2_cols),
                         opt);
        note(o, reconstructed);
        note(o, "grid spans the phase theta and kappa_b at Delta = 0.5");
        return {std::move(o)};
    }
    if (name == "fig5c") {
        return {sweep(name, make_spec(at_delta(0.5), {theta_fine},
                                      {"t_fwd", "t_bwd", "g2_fwd", "g2_bwd"}),
                      opt)};
    }
    if (name == "smatrix-check") {
        return {smatrix_check(opt)};
    }
    if (name == "conditions-check") {
        return {conditions_check(opt)};
    }
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + name + "'");
}

Format format_from_string(const std::string& name)
{
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    if (name == "both") return Format::Both;
    throw Error(ErrorCode::InvalidConfig, "unknown format '" + name + "'");
}

std::vector<std::filesystem::path> write_output(const Output& output,
                                                const std::filesystem::path& dir, Format format)
{
    std::filesystem::create_directories(dir);
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) {
            throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
        }
    };

    std::vector<std::filesystem::path> written;
    Json files = Json::array();
    if (format != Format::Json) {
        written.push_back(dir / (output.stem + ".csv"));
        write(written.back(), to_csv(output.table));
        files.push_back(written.back().filename().string());
    }
    if (format != Format::Csv) {
        written.push_back(dir / (output.stem + ".json"));
        write(written.back(), to_json(output.table));
        files.push_back(written.back().filename().string());
    }
    Json m = output.manifest;
    m["files"] = files;
    written.push_back(dir / (output.stem + ".manifest.json"));
    write(written.back(), m.dump(2) + "\n");
    return written;
}

} // namespace nrpb
