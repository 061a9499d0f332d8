// geoguard command-line front end.
//
//   geoguard validate    <scenario.json>
//   geoguard detect      <scenario.json> --K 100000 --delta 280 [--dataset-out f]
//   geoguard bounds      <scenario.json> --delta 280 --K-grid 20000,40000
//   geoguard sweep       <scenario.json> --delta 260,280 --K-grid 20000,40000 --trials 36
//   geoguard paper-setup --scale 0.04 --out preset.json
//
// Exit codes: 0 success (warnings allowed), 1 runtime error, 2 usage or parse error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <geoguard.hpp>

namespace {

using namespace geoguard;

struct Options {
    std::string scenario_path;
    std::string out_path;
    std::vector<double> deltas;
    std::optional<std::size_t> k;
    std::vector<std::size_t> k_grid;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    double scale = 1.0 / 25.0;
    double psi1 = 0.0105;
    std::string method = "analytic";
    std::size_t m = 200000;
    std::optional<double> kappa;
    double sigma_l = 0.5;
    double sigma_u = 0.5;
    unsigned threads = 0;
    std::string dataset_in;
    std::string dataset_out;
};

/// Writes to --out when given, standard output otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

ScenarioFile load(const Options& o) {
    ScenarioFile f = load_scenario(o.scenario_path);
    if (o.kappa) f.scenario.kappa = *o.kappa;
    return f;
}

double pick_delta(const Options& o, const ScenarioFile& f) {
    if (!o.deltas.empty()) return o.deltas.front();
    if (f.experiment.delta) return *f.experiment.delta;
    throw DomainError("no delta given (use --delta or experiment.delta)");
}

std::vector<std::size_t> pick_k_grid(const Options& o, const ScenarioFile& f) {
    if (!o.k_grid.empty()) return o.k_grid;
    if (!f.experiment.k_grid.empty()) return f.experiment.k_grid;
    throw DomainError("no K grid given (use --K-grid or experiment.K_grid)");
}

void warn_if_inadmissible(const ScenarioConfig& s, double delta) {
    try {
        const double limit = delta_admissible(s, s.kappa);
        if (delta >= limit) {
            std::cerr << "warning: delta=" << format_number(delta)
                      << " exceeds the admissible value " << format_number(limit)
                      << "; the detection guarantee does not apply\n";
        }
    } catch (const Error& e) {
        std::cerr << "warning: admissible delta unavailable: " << e.what() << '\n';
    }
}

int cmd_validate(const Options& o) {
    const ScenarioFile f = load(o);
    const ScenarioConfig& s = f.scenario;
    const AssumptionReport r = validate_assumptions(s);
    Output out(o.out_path);
    std::ostream& os = out.stream();
    os << "sensors\t" << s.sensors.size() << '\n'
       << "attacked\t" << f.attacks.by_id.size() << '\n'
       << "D_L\t" << format_number(r.bounds.d_lower) << '\n'
       << "D_U\t" << format_number(r.bounds.d_upper) << '\n'
       << "D_S\t" << format_number(r.bounds.d_secure) << '\n'
       << "separation_margin\t" << format_number(r.separated_margin) << '\n'
       << "focal_sum_min\t" << format_number(r.focal_sum_min) << " (+-"
       << format_number(r.focal_sum_tolerance) << ")\n"
       << "far_margin\t" << format_number(r.far_margin) << '\n'
       << "side_margin\t" << format_number(r.side_margin) << '\n'
       << "lambda\t" << format_number(lambda_min(s, s.kappa)) << '\n'
       << "delta_admissible\t" << format_number(delta_admissible(s, s.kappa)) << '\n';
    for (const auto& [id, spec] : f.attacks.by_id) {
        const std::size_t j = s.index_of(id);
        if (!check_subtle(s, j, spec)) os << "note\tattack on sensor " << id << " is not subtle\n";
        if (!check_significant(s, j, spec, s.kappa)) {
            os << "note\tattack on sensor " << id << " is below kappa\n";
        }
    }
    if (r.all()) {
        os << "all assumptions satisfied\n";
    } else {
        for (const auto& w : r.warnings()) os << "warning\t" << w << '\n';
    }
    return 0;
}

int cmd_detect(const Options& o) {
    const ScenarioFile f = load(o);
    DetectorConfig cfg{pick_delta(o, f), detect_method_from_string(o.method), o.m};
    warn_if_inadmissible(f.scenario, cfg.delta);
    QuantizedDataset data;
    if (!o.dataset_in.empty()) {
        std::ifstream in(o.dataset_in, std::ios::binary);
        if (!in) throw ParseError("cannot open file", o.dataset_in);
        data = read_dataset(in);
    } else {
        const std::size_t k = o.k ? *o.k : throw DomainError("detect needs --K or --dataset");
        const std::uint64_t seed = o.seed.value_or(f.experiment.seed.value_or(1));
        data = generate_dataset(f.scenario, f.attacks, k, seed);
    }
    if (!o.dataset_out.empty()) {
        std::ofstream bin(o.dataset_out, std::ios::binary);
        if (!bin) throw Error("cannot write " + o.dataset_out);
        write_dataset(bin, data);
    }
    Output out(o.out_path);
    write_detection_tsv(out.stream(), detect_all(f.scenario, cfg, data));
    return 0;
}

int cmd_bounds(const Options& o) {
    const ScenarioFile f = load(o);
    DetectorConfig cfg{pick_delta(o, f), DetectMethod::analytic, o.m};
    const RateReport r = composite_exponents(f.scenario, f.attacks, cfg, {o.sigma_l, o.sigma_u});
    Output out(o.out_path);
    write_rates_tsv(out.stream(), r, pick_k_grid(o, f));
    std::cerr << "eta_e\t" << format_number(r.eta_e) << '\n';
    return 0;
}

int cmd_sweep(const Options& o) {
    const ScenarioFile f = load(o);
    ExperimentPlan plan;
    plan.scenario = f.scenario;
    plan.attacks = f.attacks;
    plan.detector = {pick_delta(o, f), detect_method_from_string(o.method), o.m};
    plan.k_grid = pick_k_grid(o, f);
    plan.trials = o.trials.value_or(f.experiment.trials.value_or(100));
    plan.base_seed = o.seed.value_or(f.experiment.seed.value_or(1));
    plan.threads = o.threads;
    plan.exponents = {o.sigma_l, o.sigma_u};
    std::vector<double> deltas = o.deltas;
    if (deltas.empty()) deltas.push_back(plan.detector.delta);
    for (const double d : deltas) warn_if_inadmissible(f.scenario, d);
    const auto curves = sweep_delta(plan, deltas);
    Output out(o.out_path);
    write_metrics_tsv(out.stream(), curves);
    for (const Metrics& m : curves) {
        std::cerr << "delta=" << format_number(m.rows.front().delta) << "\tslope="
                  << (m.slope ? format_number(*m.slope) : std::string("NA")) << '\n';
    }
    return 0;
}

int cmd_paper_setup(const Options& o) {
    const auto doc = paper_setup_json(o.scale, o.psi1);
    Output out(o.out_path);
    out.stream() << doc.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attack detection for one-bit quantized target localization"};
    app.require_subcommand(1);
    Options o;

    const auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
        sub->add_option("--kappa", o.kappa, "Override the significance level kappa");
        sub->add_option("--out", o.out_path, "Write the result here instead of stdout");
    };
    const auto add_method = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "analytic or discretized")
            ->check(CLI::IsMember({"analytic", "discretized"}));
        sub->add_option("--M", o.m, "Points on the circle for the discretized method")
            ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 30));
    };
    const auto add_sigma = [&](CLI::App* sub) {
        sub->add_option("--sigma-l", o.sigma_l, "sigma_L in (0,1)");
        sub->add_option("--sigma-u", o.sigma_u, "sigma_U in (0,1)");
    };

    auto* validate = app.add_subcommand("validate", "Check a scenario and report the assumptions");
    add_scenario(validate);

    auto* detect = app.add_subcommand("detect", "Simulate one data block and classify every sensor");
    add_scenario(detect);
    add_method(detect);
    detect->add_option("--delta", o.deltas, "Ring half-width")->expected(1);
    detect->add_option("--K", o.k, "Samples per sensor");
    detect->add_option("--seed", o.seed, "Random seed");
    detect->add_option("--dataset", o.dataset_in, "Replay a saved dataset instead of simulating");
    detect->add_option("--dataset-out", o.dataset_out, "Save the simulated dataset");

    auto* bounds = app.add_subcommand("bounds", "Error exponents and bound curves");
    add_scenario(bounds);
    add_sigma(bounds);
    bounds->add_option("--delta", o.deltas, "Ring half-width")->expected(1);
    bounds->add_option("--K-grid", o.k_grid, "Comma-separated K values")->delimiter(',');

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo error probabilities versus K");
    add_scenario(sweep);
    add_method(sweep);
    add_sigma(sweep);
    sweep->add_option("--delta", o.deltas, "Ring half-width(s), comma-separated")->delimiter(',');
    sweep->add_option("--K-grid", o.k_grid, "Comma-separated K values")->delimiter(',');
    sweep->add_option("--trials", o.trials, "Monte Carlo runs per K");
    sweep->add_option("--seed", o.seed, "Base seed");
    sweep->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

    auto* setup = app.add_subcommand("paper-setup", "Write the reference simulation scenario");
    setup->add_option("--scale", o.scale, "Fraction of the full network size, in (0,1]");
    setup->add_option("--psi1", o.psi1, "1->0 flip probability of the attacked group");
    setup->add_option("--out", o.out_path, "Write the scenario here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*detect) return cmd_detect(o);
        if (*bounds) return cmd_bounds(o);
        if (*sweep) return cmd_sweep(o);
        if (*setup) return cmd_paper_setup(o);
    } catch (const geoguard::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
