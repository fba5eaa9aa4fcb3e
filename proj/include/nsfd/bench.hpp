#pragma once

// Benchmark harness: relative-error series against closed-form solutions,
// observed convergence orders, CSV output and figure regeneration.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsfd/models.hpp"
#include "nsfd/schemes.hpp"

namespace nsfd {

enum class NormKind { ComponentX, EuclideanFull };

[[nodiscard]] std::string_view to_string(NormKind n) noexcept;
[[nodiscard]] std::optional<NormKind> parse_norm(std::string_view id) noexcept;

/// Denominators below this are replaced by 1 (absolute error) and flagged.
inline constexpr double kRelativeGuard = 1e-300;

struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> rel_errors;
    /// True where the exact value was too small and the entry is an absolute error.
    std::vector<bool> absolute;
    NormKind norm = NormKind::ComponentX;

    [[nodiscard]] double max() const;
    /// Max over entries with t in [t0, t1].
    [[nodiscard]] double max_over(double t0, double t1) const;
    [[nodiscard]] double final() const;
};

/// E_k = |x_k - x^e_k| / |x^e_k| (ComponentX) or ||X_k - X^e_k|| / ||X^e_k|| (EuclideanFull).
[[nodiscard]] ErrorSeries relative_error_series(const Trajectory& traj,
                                                const std::function<Vector(double)>& exact, NormKind norm);

/// Errors at or below this are treated as roundoff: the scheme is exact.
inline constexpr double kExactFloor = 1e-11;

struct OrderEstimate {
    std::optional<double> order;
    bool exact = false;

    [[nodiscard]] std::string str() const;
};

/// log(err_coarse/err_fine) / log(refinement); refinement 2 gives the usual log2 ratio.
[[nodiscard]] OrderEstimate observed_order(double err_coarse, double err_fine, double refinement = 2.0);

struct Experiment {
    ModelKind model = ModelKind::Biomass;
    ModelParams params;
    SchemeSpec scheme;
    double dt = 0.1;
    double t_end = 10.0;
    NormKind norm = NormKind::ComponentX;
};

struct ExperimentReport {
    std::string model_id;
    SchemeSpec scheme;
    double dt = 0.0;
    double t_end = 0.0;
    double max_error = 0.0;
    double final_error = 0.0;
    std::optional<OrderEstimate> observed_order;
    std::optional<std::size_t> blow_up_step;
};

struct ExperimentResult {
    ExperimentReport report;
    Trajectory trajectory;
    ErrorSeries errors;
};

[[nodiscard]] ExperimentResult run_experiment(const Experiment& e);

struct ConvergenceRow {
    double dt = 0.0;
    double max_error = 0.0;
    std::optional<OrderEstimate> order;  // against the previous row
    std::optional<std::size_t> blow_up_step;
};

/// Runs the experiment at each dt (same t_end) and estimates orders between
/// consecutive step sizes.
[[nodiscard]] std::vector<ConvergenceRow> convergence_study(Experiment base, const std::vector<double>& dts);

/// Fixed-point rendering with trailing zeros removed: 0.0005, 0.1, 2.
[[nodiscard]] std::string format_dt(double dt);
/// Round-trip rendering (%.17g).
[[nodiscard]] std::string format_value(double v);

void write_error_csv(const std::filesystem::path& path, const ErrorSeries& errors);
void write_exact_csv(const std::filesystem::path& path, const OdeModel& model, double dt, double t_end);
void write_report(std::ostream& out, const ExperimentReport& report);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

[[nodiscard]] const std::vector<std::string>& figure_ids();

struct FigureOutput {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path plot_script;
    /// "<scheme> dt=<dt> blew up at step k" for each truncated run.
    std::vector<std::string> blow_ups;
};

struct FigureOptions {
    NormKind oscillator_norm = NormKind::ComponentX;
    ModelParams params;
};

/// Throws UsageError for unknown ids.
FigureOutput run_figure(std::string_view figure_id, const std::filesystem::path& outdir,
                        const FigureOptions& options = {});

}  // namespace nsfd
