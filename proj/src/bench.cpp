#include "nsfd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>

#include "nsfd/errors.hpp"

namespace nsfd {

namespace {

struct FigureRun {
    std::string label;  // scheme part of the file name
    Experiment experiment;
};

struct FigurePlan {
    std::string title;
    std::vector<double> dts;        // one panel per dt
    std::vector<FigureRun> runs;    // error figures
    std::optional<Experiment> exact;  // exact-solution figures
};

std::vector<double> dts_for(ModelKind model) {
    if (model == ModelKind::Oscillator) {
        return {0.05, 0.01, 0.001, 0.0005};
    }
    return {0.1, 0.01, 0.001};
}

double horizon_for(ModelKind model) { return model == ModelKind::Oscillator ? 35.0 : 10.0; }

FigurePlan plan_error_figure(ModelKind model, const std::string& title, std::vector<Scheme> schemes,
                             const FigureOptions& options) {
    FigurePlan plan;
    plan.title = title;
    plan.dts = dts_for(model);
    for (double dt : plan.dts) {
        for (auto s : schemes) {
            Experiment e;
            e.model = model;
            e.params = options.params;
            e.scheme.scheme = s;
            e.scheme.forcing_approx = ForcingApprox::Half;
            e.dt = dt;
            e.t_end = horizon_for(model);
            e.norm = model == ModelKind::Oscillator ? options.oscillator_norm : NormKind::ComponentX;
            plan.runs.push_back({std::string(to_string(s)), e});
        }
    }
    return plan;
}

FigurePlan plan_figure(std::string_view id, const FigureOptions& options) {
    const std::vector<Scheme> linear_schemes = {Scheme::ExplicitEuler, Scheme::ImplicitEuler,
                                                Scheme::TraditionalNSFD, Scheme::ScalarNSFD, Scheme::GammaNSFD};
    if (id == "oscillator-error") {
        return plan_error_figure(ModelKind::Oscillator, "Quadratic oscillator, relative error",
                                 {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::MickensOsc1,
                                  Scheme::MickensOsc2, Scheme::CorrectedOsc},
                                 options);
    }
    if (id == "biomass-error") {
        return plan_error_figure(ModelKind::Biomass, "Forest biomass, relative error on x", linear_schemes,
                                 options);
    }
    if (id == "trees-error") {
        return plan_error_figure(ModelKind::Trees, "Biomass with constant planting, relative error on x",
                                 linear_schemes, options);
    }
    if (id == "seasonal-error") {
        return plan_error_figure(ModelKind::Seasonal, "Biomass with seasonal planting (B half), relative error on x",
                                 linear_schemes, options);
    }
    if (id == "seasonal-forcing-comparison") {
        FigurePlan plan;
        plan.title = "Seasonal forcing approximations, dt = 0.001";
        plan.dts = {0.001};
        for (auto s : {Scheme::ScalarNSFD, Scheme::GammaNSFD}) {
            for (auto f : {ForcingApprox::Left, ForcingApprox::Middle, ForcingApprox::Half, ForcingApprox::Mean}) {
                Experiment e;
                e.model = ModelKind::Seasonal;
                e.params = options.params;
                e.scheme.scheme = s;
                e.scheme.forcing_approx = f;
                e.dt = 0.001;
                e.t_end = 10.0;
                plan.runs.push_back({std::string(to_string(s)) + "-" + std::string(to_string(f)), e});
            }
        }
        return plan;
    }
    const std::pair<std::string_view, ModelKind> exact_ids[] = {
        {"oscillator-exact", ModelKind::Oscillator},
        {"biomass-exact", ModelKind::Biomass},
        {"trees-exact", ModelKind::Trees},
        {"seasonal-exact", ModelKind::Seasonal},
    };
    for (const auto& [name, model] : exact_ids) {
        if (id == name) {
            FigurePlan plan;
            plan.title = "Exact solution (" + std::string(to_string(model)) + ")";
            plan.dts = {0.01};
            Experiment e;
            e.model = model;
            e.params = options.params;
            e.dt = 0.01;
            e.t_end = horizon_for(model);
            plan.exact = e;
            return plan;
        }
    }
    std::string valid;
    for (const auto& f : figure_ids()) {
        valid += (valid.empty() ? "" : ", ") + f;
    }
    throw UsageError("unknown figure id '" + std::string(id) + "'; valid ids: " + valid);
}

std::filesystem::path csv_name(const std::filesystem::path& outdir, std::string_view figure,
                               const std::string& label, double dt) {
    return outdir / (std::string(figure) + "_" + label + "_" + format_dt(dt) + ".csv");
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::vector<std::string> component_names(std::size_t n) {
    static const char* names[] = {"x", "y", "z"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(i < 3 ? names[i] : "x" + std::to_string(i));
    }
    return out;
}

}  // namespace

std::string_view to_string(NormKind n) noexcept {
    return n == NormKind::ComponentX ? "x" : "full";
}

std::optional<NormKind> parse_norm(std::string_view id) noexcept {
    if (id == "x") {
        return NormKind::ComponentX;
    }
    if (id == "full") {
        return NormKind::EuclideanFull;
    }
    return std::nullopt;
}

double ErrorSeries::max() const {
    double best = 0.0;
    for (double e : rel_errors) {
        best = std::max(best, e);
    }
    return best;
}

double ErrorSeries::max_over(double t0, double t1) const {
    double best = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= t0 && times[i] <= t1) {
            best = std::max(best, rel_errors[i]);
        }
    }
    return best;
}

double ErrorSeries::final() const { return rel_errors.empty() ? 0.0 : rel_errors.back(); }

ErrorSeries relative_error_series(const Trajectory& traj, const std::function<Vector(double)>& exact,
                                  NormKind norm) {
    if (!exact) {
        throw ConfigurationError("relative error needs an exact solution");
    }
    ErrorSeries out;
    out.norm = norm;
    out.times = traj.times;
    out.rel_errors.reserve(traj.states.size());
    out.absolute.reserve(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto ref = exact(traj.times[k]);
        const auto& x = traj.states[k];
        double num = 0.0;
        double den = 0.0;
        if (norm == NormKind::ComponentX) {
            num = std::abs(x[0] - ref[0]);
            den = std::abs(ref[0]);
        } else {
            Vector diff(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                diff[i] = x[i] - ref[i];
            }
            num = norm2(diff);
            den = norm2(ref);
        }
        const bool guard = den < kRelativeGuard;
        out.rel_errors.push_back(guard ? num : num / den);
        out.absolute.push_back(guard);
    }
    return out;
}

std::string OrderEstimate::str() const {
    if (exact) {
        return "exact";
    }
    return order ? format_value(*order) : "";
}

OrderEstimate observed_order(double err_coarse, double err_fine, double refinement) {
    OrderEstimate out;
    if (err_fine <= kExactFloor) {
        out.exact = true;
        return out;
    }
    out.order = std::log(err_coarse / err_fine) / std::log(refinement);
    return out;
}

ExperimentResult run_experiment(const Experiment& e) {
    const auto model = make_model(e.model, e.params);
    ExperimentResult result;
    result.trajectory = integrate(model, e.scheme, e.dt, e.t_end);
    // The reference at t = 0 is the initial condition itself, not the closed
    // form's roundoff-level evaluation there.
    const auto reference = [&model](double t) { return t == 0.0 ? model.initial_state : model.exact(t); };
    result.errors = relative_error_series(result.trajectory, reference, e.norm);
    auto& r = result.report;
    r.model_id = model.id;
    r.scheme = e.scheme;
    r.dt = e.dt;
    r.t_end = e.t_end;
    r.max_error = result.errors.max();
    r.final_error = result.errors.final();
    r.blow_up_step = result.trajectory.blow_up_step;
    return result;
}

std::vector<ConvergenceRow> convergence_study(Experiment base, const std::vector<double>& dts) {
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        base.dt = dts[i];
        const auto res = run_experiment(base);
        ConvergenceRow row;
        row.dt = dts[i];
        row.max_error = res.report.max_error;
        row.blow_up_step = res.report.blow_up_step;
        if (i > 0 && !row.blow_up_step && !rows.back().blow_up_step) {
            row.order = observed_order(rows.back().max_error, row.max_error, rows.back().dt / row.dt);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_dt(double dt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f", dt);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') {
        s.pop_back();
    }
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_error_csv(const std::filesystem::path& path, const ErrorSeries& errors) {
    auto out = open_for_write(path);
    out << "t,rel_error\n";
    for (std::size_t k = 0; k < errors.times.size(); ++k) {
        out << format_value(errors.times[k]) << ',' << format_value(errors.rel_errors[k]) << '\n';
    }
}

void write_exact_csv(const std::filesystem::path& path, const OdeModel& model, double dt, double t_end) {
    if (!model.has_exact()) {
        throw ConfigurationError("model " + model.id + " has no exact solution");
    }
    const std::size_t steps = step_count(dt, t_end);
    auto out = open_for_write(path);
    out << 't';
    for (const auto& name : component_names(model.dimension())) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        out << format_value(t);
        for (double v : model.exact(t)) {
            out << ',' << format_value(v);
        }
        out << '\n';
    }
}

void write_report(std::ostream& out, const ExperimentReport& r) {
    out << "model=" << r.model_id << '\n'
        << "scheme=" << to_string(r.scheme.scheme) << '\n'
        << "forcing_approx=" << to_string(r.scheme.forcing_approx) << '\n'
        << "dt=" << format_dt(r.dt) << '\n'
        << "t_end=" << format_value(r.t_end) << '\n'
        << "max_error=" << format_value(r.max_error) << '\n'
        << "final_error=" << format_value(r.final_error) << '\n';
    if (r.observed_order) {
        out << "observed_order=" << r.observed_order->str() << '\n';
    }
    if (r.blow_up_step) {
        out << "blow_up_step=" << *r.blow_up_step << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "dt,max_error,order\n";
    for (const auto& row : rows) {
        out << format_dt(row.dt) << ',';
        if (row.blow_up_step) {
            out << "blow-up@" << *row.blow_up_step << ',';
        } else {
            out << format_value(row.max_error) << ',';
        }
        out << (row.order ? row.order->str() : "") << '\n';
    }
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {
        "oscillator-error", "biomass-error",  "trees-error",  "seasonal-error", "seasonal-forcing-comparison",
        "oscillator-exact", "biomass-exact", "trees-exact", "seasonal-exact",
    };
    return ids;
}

FigureOutput run_figure(std::string_view figure_id, const std::filesystem::path& outdir,
                        const FigureOptions& options) {
    const auto plan = plan_figure(figure_id, options);
    std::filesystem::create_directories(outdir);
    FigureOutput output;

    if (plan.exact) {
        const auto& e = *plan.exact;
        const auto model = make_model(e.model, e.params);
        const auto path = csv_name(outdir, figure_id, "exact", e.dt);
        write_exact_csv(path, model, e.dt, e.t_end);
        output.csv_files.push_back(path);

        output.plot_script = outdir / (std::string(figure_id) + ".gp");
        auto gp = open_for_write(output.plot_script);
        gp << "# " << figure_id << "\n"
           << "set terminal pngcairo size 900,600\n"
           << "set output '" << figure_id << ".png'\n"
           << "set datafile separator ','\n"
           << "set key autotitle columnhead\n"
           << "set xlabel 't'\n"
           << "set title '" << plan.title << "'\n"
           << "plot ";
        const auto names = component_names(model.dimension());
        for (std::size_t i = 0; i < names.size(); ++i) {
            gp << (i ? ", \\\n     " : "") << "'" << path.filename().string() << "' using 1:" << i + 2
               << " with lines";
        }
        gp << '\n';
        return output;
    }

    // Runs are independent; each writes its own file.
    std::vector<std::future<ExperimentResult>> futures;
    futures.reserve(plan.runs.size());
    for (const auto& run : plan.runs) {
        futures.push_back(std::async(std::launch::async, [e = run.experiment] { return run_experiment(e); }));
    }
    for (std::size_t i = 0; i < plan.runs.size(); ++i) {
        const auto res = futures[i].get();
        const auto& run = plan.runs[i];
        const auto path = csv_name(outdir, figure_id, run.label, run.experiment.dt);
        write_error_csv(path, res.errors);
        output.csv_files.push_back(path);
        if (res.report.blow_up_step) {
            output.blow_ups.push_back(run.label + " dt=" + format_dt(run.experiment.dt) + " blew up at step " +
                                      std::to_string(*res.report.blow_up_step));
        }
    }

    output.plot_script = outdir / (std::string(figure_id) + ".gp");
    auto gp = open_for_write(output.plot_script);
    const std::size_t panels = plan.dts.size();
    const std::size_t cols = panels > 1 ? 2 : 1;
    const std::size_t rows = (panels + cols - 1) / cols;
    gp << "# " << figure_id << "\n"
       << "set terminal pngcairo size " << 700 * cols << "," << 500 * rows << "\n"
       << "set output '" << figure_id << ".png'\n"
       << "set datafile separator ','\n"
       << "set logscale y\n"
       << "set format y '10^{%L}'\n"
       << "set xlabel 't'\n"
       << "set ylabel 'relative error'\n"
       << "set multiplot layout " << rows << "," << cols << " title '" << plan.title << "'\n";
    for (double dt : plan.dts) {
        gp << "set title 'dt = " << format_dt(dt) << "'\n"
           << "plot ";
        bool first = true;
        for (const auto& run : plan.runs) {
            if (run.experiment.dt != dt) {
                continue;
            }
            gp << (first ? "" : ", \\\n     ") << "'"
               << csv_name(outdir, figure_id, run.label, dt).filename().string()
               << "' using 1:2 every ::1 with lines title '" << run.label << "'";
            first = false;
        }
        gp << '\n';
    }
    gp << "unset multiplot\n";
    return output;
}

}  // namespace nsfd
