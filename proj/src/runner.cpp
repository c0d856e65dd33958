#include "nrpb/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nrpb/error.hpp"

namespace nrpb {

Directions directions_from_string(const std::string& name)
{
    if (name == "left") {
        return Directions::Left;
    }
    if (name == "right") {
        return Directions::Right;
    }
    if (name == "both") {
        return Directions::Both;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown directions '" + name + "'");
}

const char* to_string(Directions directions)
{
    switch (directions) {
    case Directions::Left: return "left";
    case Directions::Right: return "right";
    case Directions::Both: return "both";
    }
    return "both";
}

// ---------------------------------------------------------------------------
// Points

namespace {

struct DirectionSolve {
    DirectionalObservables observables;
    SolveInfo info;
};

DirectionSolve solve_direction(const PointConfig& config, Drive drive,
                               const std::vector<int>& dims)
{
    SystemParams p = config.params;
    p.drive = drive;
    const CompositeSpace space(dims);
    const Superoperator l =
        build_liouvillian(build_hamiltonian(p, space), collapse_operators(p, space));
    const SteadyState ss = steady_state(l, config.solver);

    DirectionSolve out;
    out.info.residual = ss.diagnostics.residual;
    out.info.iterations = ss.diagnostics.iterations;
    out.info.hermitian_correction = ss.diagnostics.hermitian_correction;
    out.info.method = ss.diagnostics.method_used;
    out.observables = directional_observables(ss.rho, p, config.population_floor);
    return out;
}

double relative_change(double reference, double refined)
{
    const double scale = std::abs(reference);
    return scale == 0.0 ? std::abs(refined) : std::abs(refined - reference) / scale;
}

const char* direction_tag(Drive drive)
{
    return drive == Drive::Left ? "fwd" : "bwd";
}

} // namespace

PointOutcome evaluate_point(const PointConfig& config, Directions directions)
{
    PointOutcome out;
    auto fail = [&](Drive drive, const Error& e) {
        if (!out.error_code) {
            out.error_code = e.code();
        }
        if (!out.error.empty()) {
            out.error += "; ";
        }
        out.error += std::string(direction_tag(drive)) + ": " + e.what();
        if (!out.flags.empty()) {
            out.flags += ';';
        }
        out.flags += std::string(direction_tag(drive)) + ":" + to_string(e.code());
    };

    try {
        validate(config.params);
    } catch (const Error& e) {
        out.error_code = e.code();
        out.error = e.what();
        out.flags = to_string(e.code());
        return out;
    }

    std::vector<Drive> drives;
    if (directions != Directions::Right) {
        drives.push_back(Drive::Left);
    }
    if (directions != Directions::Left) {
        drives.push_back(Drive::Right);
    }

    for (Drive drive : drives) {
        try {
            DirectionSolve s = solve_direction(config, drive, config.dims);
            if (s.observables.correlation_error) {
                fail(drive, *s.observables.correlation_error);
            }
            if (drive == Drive::Left) {
                out.fwd = std::move(s.observables);
                out.fwd_info = s.info;
            } else {
                out.bwd = std::move(s.observables);
                out.bwd_info = s.info;
            }
        } catch (const Error& e) {
            fail(drive, e);
        }
    }

    if (config.convergence_check && out.ok()) {
        std::vector<int> refined = config.dims;
        for (int& d : refined) {
            ++d;
        }
        ConvergenceDrift drift;
        for (Drive drive : drives) {
            try {
                const DirectionSolve s = solve_direction(config, drive, refined);
                if (s.observables.correlation_error) {
                    fail(drive, *s.observables.correlation_error);
                    continue;
                }
                const DirectionalObservables& base = drive == Drive::Left ? *out.fwd : *out.bwd;
                drift.transmission = std::max(
                    drift.transmission, relative_change(base.transmission, s.observables.transmission));
                drift.g2 = std::max(drift.g2, relative_change(*base.g2, *s.observables.g2));
            } catch (const Error& e) {
                fail(drive, e);
            }
        }
        if (out.ok()) {
            out.drift = drift;
        }
    }
    return out;
}

PointReport run_point(const PointConfig& config)
{
    PointOutcome o = evaluate_point(config, Directions::Both);
    if (!o.ok()) {
        throw Error(*o.error_code, o.error);
    }
    PointReport r;
    r.result = combine(*o.fwd, *o.bwd);
    r.fwd_info = *o.fwd_info;
    r.bwd_info = *o.bwd_info;
    r.drift = o.drift;
    return r;
}

// ---------------------------------------------------------------------------
// Sweeps

AxisParameter axis_parameter_from_string(const std::string& name)
{
    if (name == "delta") return AxisParameter::Delta;
    if (name == "kappa_b") return AxisParameter::KappaB;
    if (name == "theta") return AxisParameter::Theta;
    if (name == "omega") return AxisParameter::Omega;
    if (name == "u") return AxisParameter::U;
    if (name == "j_ac") return AxisParameter::JAc;
    throw Error(ErrorCode::InvalidConfig, "unknown sweep parameter '" + name + "'");
}

const char* to_string(AxisParameter parameter)
{
    switch (parameter) {
    case AxisParameter::Delta: return "delta";
    case AxisParameter::KappaB: return "kappa_b";
    case AxisParameter::Theta: return "theta";
    case AxisParameter::Omega: return "omega";
    case AxisParameter::U: return "u";
    case AxisParameter::JAc: return "j_ac";
    }
    return "delta";
}

void set_parameter(SystemParams& p, AxisParameter parameter, double value)
{
    switch (parameter) {
    case AxisParameter::Delta: p.set_detuning(value); break;
    case AxisParameter::KappaB: p.kappa_b = value; break;
    case AxisParameter::Theta: p.theta = value; break;
    case AxisParameter::Omega: p.omega = value; break;
    case AxisParameter::U: p.u_a = p.u_c = value; break;
    case AxisParameter::JAc: p.j_ac = value; break;
    }
}

double SweepAxis::value(int index) const
{
    if (index == count - 1) {
        return stop;
    }
    return start + (stop - start) * static_cast<double>(index) / static_cast<double>(count - 1);
}

std::int64_t SweepSpec::total_points() const
{
    std::int64_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) {
        n *= a.count;
    }
    return n;
}

void validate(const SweepSpec& spec)
{
    if (spec.axes.empty() || spec.axes.size() > 2) {
        throw Error(ErrorCode::InvalidConfig, "a sweep needs one or two axes");
    }
    if (spec.axes.size() == 2 && spec.axes[0].parameter == spec.axes[1].parameter) {
        throw Error(ErrorCode::InvalidConfig, "sweep axes must drive different parameters");
    }
    for (const auto& a : spec.axes) {
        if (a.count < 2) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string("axis '") + to_string(a.parameter) + "' needs count >= 2");
        }
        if (a.start == a.stop) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string("axis '") + to_string(a.parameter) + "' has start == stop");
        }
        if (!std::isfinite(a.start) || !std::isfinite(a.stop)) {
            throw Error(ErrorCode::InvalidConfig, "axis bounds must be finite");
        }
    }
    if (spec.max_points <= 0) {
        throw Error(ErrorCode::InvalidConfig, "max_points must be positive");
    }
    if (spec.total_points() > spec.max_points) {
        throw Error(ErrorCode::GridCapExceeded,
                    "sweep has " + std::to_string(spec.total_points()) +
                        " points, above the cap of " + std::to_string(spec.max_points));
    }
    if (spec.base.dims.size() != 3) {
        throw Error(ErrorCode::InvalidSpace, "truncation must list three mode dimensions");
    }
    for (int d : spec.base.dims) {
        if (d < 2) {
            throw Error(ErrorCode::InvalidDimension, "mode dimensions must be >= 2");
        }
    }
}

unsigned resolve_jobs(unsigned jobs)
{
    if (jobs > 0) {
        return jobs;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::int64_t count, unsigned jobs,
                  const std::function<void(std::int64_t)>& body,
                  const ProgressCallback& progress)
{
    const unsigned workers =
        static_cast<unsigned>(std::min<std::int64_t>(resolve_jobs(jobs), std::max<std::int64_t>(count, 1)));
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> done{0};
    std::mutex mutex;
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                return;
            }
            const std::int64_t finished = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(mutex);
                progress(finished, count);
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

SweepResult run_sweep(const SweepSpec& spec, unsigned jobs, const ProgressCallback& progress)
{
    validate(spec);
    SweepResult result;
    result.axes = spec.axes;
    result.dims = spec.base.dims;
    const std::int64_t total = spec.total_points();
    result.rows.resize(static_cast<std::size_t>(total));

    const int inner = spec.axes.size() == 2 ? spec.axes[1].count : 1;
    parallel_for(
        total, jobs,
        [&](std::int64_t index) {
            PointConfig config = spec.base;
            SweepRow& row = result.rows[static_cast<std::size_t>(index)];
            const int outer_index = static_cast<int>(index / inner);
            const int inner_index = static_cast<int>(index % inner);
            const double v0 = spec.axes[0].value(outer_index);
            set_parameter(config.params, spec.axes[0].parameter, v0);
            row.axis_values.push_back(v0);
            if (spec.axes.size() == 2) {
                const double v1 = spec.axes[1].value(inner_index);
                set_parameter(config.params, spec.axes[1].parameter, v1);
                row.axis_values.push_back(v1);
            }
            row.outcome = evaluate_point(config, spec.directions);
        },
        progress);
    return result;
}

// ---------------------------------------------------------------------------
// Tables

int Table::column_index(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::optional<double> Table::number(std::size_t row, const std::string& column) const
{
    const int c = column_index(column);
    if (c < 0 || row >= rows.size()) {
        return std::nullopt;
    }
    const Cell& cell = rows[row][static_cast<std::size_t>(c)];
    if (const auto* d = std::get_if<double>(&cell)) {
        return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        return static_cast<double>(*i);
    }
    return std::nullopt;
}

namespace {

const std::vector<std::string> observable_columns{
    "t_fwd",        "t_bwd",        "g2_fwd",       "g2_bwd",       "g3_fwd",
    "g3_bwd",       "isolation",    "ratio",        "mean_n_a_fwd", "mean_n_b_fwd",
    "mean_n_c_fwd", "mean_n_a_bwd", "mean_n_b_bwd", "mean_n_c_bwd"};

const std::vector<std::string> diagnostic_columns{
    "residual_fwd", "residual_bwd", "iterations_fwd", "iterations_bwd",
    "drift_t",      "drift_g2",     "dims",           "error"};

// Columns emitted whether or not they were requested.
const std::vector<std::string> mandatory_columns{"residual_fwd", "residual_bwd", "dims", "error"};

std::string dims_label(const std::vector<int>& dims)
{
    std::string s;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k > 0) {
            s += 'x';
        }
        s += std::to_string(dims[k]);
    }
    return s;
}

Cell optional_cell(const std::optional<DirectionalObservables>& d,
                  std::optional<double> DirectionalObservables::*member)
{
    if (!d || !((*d).*member)) {
        return std::monostate{};
    }
    return *((*d).*member);
}

Cell cell_for(const std::string& column, const SweepResult& result, const SweepRow& row)
{
    const PointOutcome& o = row.outcome;
    const auto& fwd = o.fwd;
    const auto& bwd = o.bwd;

    auto opt = [](const auto& holder, auto getter) -> Cell {
        if (!holder) {
            return std::monostate{};
        }
        return getter(*holder);
    };

    if (column == "t_fwd") return opt(fwd, [](const auto& d) { return Cell(d.transmission); });
    if (column == "t_bwd") return opt(bwd, [](const auto& d) { return Cell(d.transmission); });
    if (column == "g2_fwd") return optional_cell(fwd, &DirectionalObservables::g2);
    if (column == "g2_bwd") return optional_cell(bwd, &DirectionalObservables::g2);
    if (column == "g3_fwd") return optional_cell(fwd, &DirectionalObservables::g3);
    if (column == "g3_bwd") return optional_cell(bwd, &DirectionalObservables::g3);
    if (column == "mean_n_a_fwd") return opt(fwd, [](const auto& d) { return Cell(d.mean_n_a); });
    if (column == "mean_n_b_fwd") return opt(fwd, [](const auto& d) { return Cell(d.mean_n_b); });
    if (column == "mean_n_c_fwd") return opt(fwd, [](const auto& d) { return Cell(d.mean_n_c); });
    if (column == "mean_n_a_bwd") return opt(bwd, [](const auto& d) { return Cell(d.mean_n_a); });
    if (column == "mean_n_b_bwd") return opt(bwd, [](const auto& d) { return Cell(d.mean_n_b); });
    if (column == "mean_n_c_bwd") return opt(bwd, [](const auto& d) { return Cell(d.mean_n_c); });
    if (column == "isolation") {
        if (!fwd || !bwd) return std::monostate{};
        return isolation(fwd->transmission, bwd->transmission);
    }
    if (column == "ratio") {
        if (!fwd || !bwd || !fwd->g2 || !bwd->g2 || *fwd->g2 + *bwd->g2 == 0.0) {
            return std::monostate{};
        }
        return nonreciprocal_ratio(*fwd->g2, *bwd->g2);
    }
    if (column == "residual_fwd") return opt(o.fwd_info, [](const auto& i) { return Cell(i.residual); });
    if (column == "residual_bwd") return opt(o.bwd_info, [](const auto& i) { return Cell(i.residual); });
    if (column == "iterations_fwd") {
        return opt(o.fwd_info, [](const auto& i) { return Cell(std::int64_t{i.iterations}); });
    }
    if (column == "iterations_bwd") {
        return opt(o.bwd_info, [](const auto& i) { return Cell(std::int64_t{i.iterations}); });
    }
    if (column == "drift_t") return opt(o.drift, [](const auto& d) { return Cell(d.transmission); });
    if (column == "drift_g2") return opt(o.drift, [](const auto& d) { return Cell(d.g2); });
    if (column == "dims") return dims_label(result.dims);
    if (column == "error") return o.flags;

    // p<m>_fwd / p<m>_bwd
    if (column.size() > 5 && column[0] == 'p') {
        const auto underscore = column.find('_');
        const std::string suffix = column.substr(underscore + 1);
        int m = -1;
        std::from_chars(column.data() + 1, column.data() + underscore, m);
        const auto& holder = suffix == "fwd" ? fwd : bwd;
        if (!holder || m < 0 || m >= static_cast<int>(holder->p_m.size())) {
            return std::monostate{};
        }
        return holder->p_m[static_cast<std::size_t>(m)];
    }
    return std::monostate{};
}

} // namespace

std::vector<std::string> available_columns(const SweepResult& result)
{
    std::vector<std::string> cols = observable_columns;
    // Output modes: c under a left drive, a under a right drive.
    const int dim_c = result.dims.size() == 3 ? result.dims[mode::c] : 0;
    const int dim_a = result.dims.size() == 3 ? result.dims[mode::a] : 0;
    for (int m = 0; m < dim_c; ++m) {
        cols.push_back("p" + std::to_string(m) + "_fwd");
    }
    for (int m = 0; m < dim_a; ++m) {
        cols.push_back("p" + std::to_string(m) + "_bwd");
    }
    cols.insert(cols.end(), diagnostic_columns.begin(), diagnostic_columns.end());
    return cols;
}

Table to_table(const SweepResult& result, const std::vector<std::string>& outputs)
{
    const std::vector<std::string> all = available_columns(result);
    std::vector<std::string> selected;
    if (outputs.empty()) {
        selected = all;
    } else {
        for (const auto& name : outputs) {
            if (std::find(all.begin(), all.end(), name) == all.end()) {
                throw Error(ErrorCode::InvalidConfig, "unknown output column '" + name + "'");
            }
        }
        // Canonical order, requested columns plus the mandatory diagnostics.
        for (const auto& name : all) {
            const bool wanted = std::find(outputs.begin(), outputs.end(), name) != outputs.end() ||
                                std::find(mandatory_columns.begin(), mandatory_columns.end(),
                                          name) != mandatory_columns.end();
            if (wanted) {
                selected.push_back(name);
            }
        }
    }

    Table table;
    for (const auto& axis : result.axes) {
        table.columns.emplace_back(to_string(axis.parameter));
    }
    table.columns.insert(table.columns.end(), selected.begin(), selected.end());
    table.rows.reserve(result.rows.size());
    for (const auto& row : result.rows) {
        std::vector<Cell> cells;
        cells.reserve(table.columns.size());
        for (double v : row.axis_values) {
            cells.emplace_back(v);
        }
        for (const auto& name : selected) {
            cells.push_back(cell_for(name, result, row));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const Cell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const
        {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + '"';
        }
    };
    return std::visit(Visitor{}, cell);
}

} // namespace

std::string to_csv(const Table& table)
{
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += csv_field(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table)
{
    using nlohmann::ordered_json;
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string& name = table.columns[c];
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        obj[name] = nullptr;
                    } else {
                        obj[name] = v;
                    }
                },
                row[c]);
        }
        rows.push_back(std::move(obj));
    }
    ordered_json doc = {{"columns", table.columns}, {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
}

} // namespace nrpb
