#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nrpb/error.hpp"
#include "nrpb/lindblad.hpp"
#include "nrpb/model.hpp"
#include "nrpb/observables.hpp"

namespace nrpb {

inline constexpr int default_mode_dim = 5;
inline constexpr std::int64_t default_grid_cap = 40000;

/// Everything needed to evaluate one working point in both directions.
struct PointConfig {
    SystemParams params = reference_params();
    std::vector<int> dims{default_mode_dim, default_mode_dim, default_mode_dim};
    SteadyStateOptions solver;
    double population_floor = default_population_floor;
    bool convergence_check = false;
};

struct SolveInfo {
    double residual = 0.0;
    int iterations = 0;
    double hermitian_correction = 0.0;
    SteadyStateMethod method = SteadyStateMethod::PreconditionedKrylov;
};

/// Relative change of T and g2 when every mode gains one Fock level;
/// maximum over both directions.
struct ConvergenceDrift {
    double transmission = 0.0;
    double g2 = 0.0;
};

/// Result of one point with per-direction failure isolation. A direction
/// that failed has no observables and contributes to `error`.
struct PointOutcome {
    std::optional<DirectionalObservables> fwd;
    std::optional<DirectionalObservables> bwd;
    std::optional<SolveInfo> fwd_info;
    std::optional<SolveInfo> bwd_info;
    std::optional<ConvergenceDrift> drift;
    std::optional<ErrorCode> error_code;
    /// Human-readable messages.
    std::string error;
    /// Compact "fwd:code;bwd:code" form used for the error column.
    std::string flags;

    bool ok() const { return !error_code.has_value(); }
};

enum class Directions { Left, Right, Both };

Directions directions_from_string(const std::string& name);
const char* to_string(Directions directions);

/// Never throws for solver/observable failures; they land in the outcome.
PointOutcome evaluate_point(const PointConfig& config, Directions directions = Directions::Both);

/// Both directions; throws the first failure with the direction named.
struct PointReport {
    PointResult result;
    SolveInfo fwd_info;
    SolveInfo bwd_info;
    std::optional<ConvergenceDrift> drift;
};
PointReport run_point(const PointConfig& config);

// ---------------------------------------------------------------------------
// Sweeps

/// Parameters a sweep axis may drive.
enum class AxisParameter { Delta, KappaB, Theta, Omega, U, JAc };

AxisParameter axis_parameter_from_string(const std::string& name);
const char* to_string(AxisParameter parameter);
void set_parameter(SystemParams& params, AxisParameter parameter, double value);

struct SweepAxis {
    AxisParameter parameter = AxisParameter::Delta;
    double start = 0.0;
    double stop = 1.0;
    int count = 2;

    double value(int index) const;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    PointConfig base;
    Directions directions = Directions::Both;
    /// Empty means every available column.
    std::vector<std::string> outputs;
    std::int64_t max_points = default_grid_cap;

    std::int64_t total_points() const;
};

/// Throws InvalidConfig / GridCapExceeded.
void validate(const SweepSpec& spec);

struct SweepRow {
    std::vector<double> axis_values;
    PointOutcome outcome;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<int> dims;
    /// Row-major in axis order: the last axis varies fastest.
    std::vector<SweepRow> rows;
};

using ProgressCallback = std::function<void(std::int64_t done, std::int64_t total)>;

/// Evaluates every grid point on `jobs` worker threads (0 = hardware
/// concurrency). Row order and values do not depend on `jobs`.
SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 0,
                      const ProgressCallback& progress = {});

/// Generic parallel map with order-restoring collection.
void parallel_for(std::int64_t count, unsigned jobs,
                  const std::function<void(std::int64_t)>& body,
                  const ProgressCallback& progress = {});

unsigned resolve_jobs(unsigned jobs);

// ---------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    int column_index(const std::string& name) const;
    std::optional<double> number(std::size_t row, const std::string& column) const;
};

/// Every column a sweep can emit, in canonical order; p<m>_fwd / p<m>_bwd
/// depend on the output-mode truncation.
std::vector<std::string> available_columns(const SweepResult& result);

Table to_table(const SweepResult& result, const std::vector<std::string>& outputs = {});

/// Shortest round-trip decimal (at most 17 significant digits).
std::string format_double(double value);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

} // namespace nrpb
