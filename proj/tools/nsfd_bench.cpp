// nsfd_bench: run schemes against closed-form solutions, measure orders and
// regenerate the benchmark figures as CSV plus gnuplot scripts.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nsfd/bench.hpp"
#include "nsfd/errors.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

nsfd::ModelKind model_or_throw(const std::string& id) {
    if (auto m = nsfd::parse_model_kind(id); m && *m != nsfd::ModelKind::Linear) {
        return *m;
    }
    throw nsfd::UsageError("unknown model '" + id + "' (oscillator, harmonic, biomass, trees, seasonal)");
}

nsfd::Scheme scheme_or_throw(const std::string& id) {
    if (auto s = nsfd::parse_scheme(id)) {
        return *s;
    }
    throw nsfd::UsageError("unknown scheme '" + id + "'");
}

std::vector<double> parse_dts(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !(v > 0.0)) {
            throw nsfd::UsageError("--dts: '" + item + "' is not a positive number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw nsfd::UsageError("--dts: empty list");
    }
    return out;
}

struct RunArgs {
    std::string model;
    std::string scheme;
    double dt = 0.0;
    double t_end = 0.0;
    std::string forcing_approx = "half";
    std::string coeffs;  // empty: follow the scheme
    std::string norm = "x";
    std::string out;
};

nsfd::Experiment experiment_from(const RunArgs& a) {
    nsfd::Experiment e;
    e.model = model_or_throw(a.model);
    e.scheme.scheme = scheme_or_throw(a.scheme);
    e.dt = a.dt;
    e.t_end = a.t_end;
    if (!(e.dt > 0.0) || !(e.t_end >= 0.0)) {
        throw nsfd::UsageError("--dt must be positive and --tend non-negative");
    }
    auto fa = nsfd::parse_forcing_approx(a.forcing_approx);
    if (!fa) {
        throw nsfd::UsageError("--forcing-approx: expected left|right|middle|half|mean");
    }
    e.scheme.forcing_approx = *fa;
    auto norm = nsfd::parse_norm(a.norm);
    if (!norm) {
        throw nsfd::UsageError("--norm: expected x|full");
    }
    e.norm = *norm;
    if (a.coeffs == "gamma") {
        if (e.scheme.scheme != nsfd::Scheme::ScalarNSFD && e.scheme.scheme != nsfd::Scheme::GammaNSFD) {
            throw nsfd::UsageError("--coeffs gamma applies to scalar-nsfd only");
        }
        e.scheme.scheme = nsfd::Scheme::GammaNSFD;
    } else if (a.coeffs == "exact") {
        if (e.scheme.scheme == nsfd::Scheme::GammaNSFD) {
            throw nsfd::UsageError("--coeffs exact contradicts --scheme gamma-nsfd");
        }
    } else if (!a.coeffs.empty()) {
        throw nsfd::UsageError("--coeffs: expected exact|gamma");
    }
    return e;
}

int cmd_run(const RunArgs& a) {
    const auto result = nsfd::run_experiment(experiment_from(a));
    nsfd::write_error_csv(a.out, result.errors);
    nsfd::write_report(std::cout, result.report);
    if (result.report.blow_up_step) {
        std::cerr << "error: solution blew up at step " << *result.report.blow_up_step << "\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_convergence(const RunArgs& a, const std::string& dts) {
    auto base = experiment_from(a);
    const auto rows = nsfd::convergence_study(base, parse_dts(dts));
    nsfd::write_convergence_csv(std::cout, rows);
    for (const auto& row : rows) {
        if (row.blow_up_step) {
            std::cerr << "error: dt=" << nsfd::format_dt(row.dt) << " blew up at step " << *row.blow_up_step
                      << "\n";
            return kExitNumerical;
        }
    }
    return 0;
}

int cmd_exact(const RunArgs& a) {
    if (!(a.dt > 0.0) || !(a.t_end >= 0.0)) {
        throw nsfd::UsageError("--dt must be positive and --tend non-negative");
    }
    const auto model = nsfd::make_model(model_or_throw(a.model));
    nsfd::write_exact_csv(a.out, model, a.dt, a.t_end);
    return 0;
}

int cmd_figure(const std::string& id, const std::string& outdir, const std::string& norm) {
    nsfd::FigureOptions options;
    auto n = nsfd::parse_norm(norm);
    if (!n) {
        throw nsfd::UsageError("--norm: expected x|full");
    }
    options.oscillator_norm = *n;
    const auto out = nsfd::run_figure(id, outdir, options);
    for (const auto& f : out.csv_files) {
        std::cout << f.string() << "\n";
    }
    std::cout << out.plot_script.string() << "\n";
    // Euler baselines are expected to blow up at coarse steps; the figure
    // shows the truncated curves.
    for (const auto& b : out.blow_ups) {
        std::cerr << "note: " << b << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonstandard finite difference schemes: benchmarks against closed-form solutions"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Integrate one model with one scheme and write the error series");
    run_cmd->add_option("--model", run.model)->required();
    run_cmd->add_option("--scheme", run.scheme)->required();
    run_cmd->add_option("--dt", run.dt)->required();
    run_cmd->add_option("--tend", run.t_end)->required();
    run_cmd->add_option("--forcing-approx", run.forcing_approx);
    run_cmd->add_option("--coeffs", run.coeffs);
    run_cmd->add_option("--norm", run.norm);
    run_cmd->add_option("--out", run.out)->required();

    std::string figure_id;
    std::string outdir;
    std::string figure_norm = "x";
    auto* fig_cmd = app.add_subcommand("figure", "Regenerate a figure's CSV files and plot script");
    fig_cmd->add_option("figure_id", figure_id)->required();
    fig_cmd->add_option("--outdir", outdir)->required();
    fig_cmd->add_option("--norm", figure_norm, "Oscillator error norm");

    RunArgs conv;
    std::string dts;
    auto* conv_cmd = app.add_subcommand("convergence", "Observed orders over a list of step sizes (CSV on stdout)");
    conv_cmd->add_option("--model", conv.model)->required();
    conv_cmd->add_option("--scheme", conv.scheme)->required();
    conv_cmd->add_option("--dts", dts)->required();
    conv_cmd->add_option("--tend", conv.t_end)->required();
    conv_cmd->add_option("--forcing-approx", conv.forcing_approx);
    conv_cmd->add_option("--coeffs", conv.coeffs);
    conv_cmd->add_option("--norm", conv.norm);

    RunArgs ex;
    auto* exact_cmd = app.add_subcommand("exact", "Sample the closed-form solution");
    exact_cmd->add_option("--model", ex.model)->required();
    exact_cmd->add_option("--dt", ex.dt)->required();
    exact_cmd->add_option("--tend", ex.t_end)->required();
    exact_cmd->add_option("--out", ex.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*fig_cmd) {
            return cmd_figure(figure_id, outdir, figure_norm);
        }
        if (*conv_cmd) {
            conv.dt = 1.0;
            return cmd_convergence(conv, dts);
        }
        if (*exact_cmd) {
            return cmd_exact(ex);
        }
    } catch (const nsfd::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nsfd::ConfigurationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nsfd::DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nsfd::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
