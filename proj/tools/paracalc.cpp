#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paracalc/parallel.hpp"
#include "paracalc/scenario.hpp"
#include "paracalc/solver.hpp"
#include "paracalc/svg.hpp"

using namespace paracalc;

namespace {

int cmd_run(const std::string& path, const RunOptions& opt) {
    const RunResult r = run_scenario(path, opt, std::cerr);
    if (!r.message.empty()) std::cerr << r.message << "\n";
    if (r.report.contains("pass")) std::cout << (r.exit_code == 0 ? "PASS " : "FAIL ") << path << "\n";
    return r.exit_code;
}

int cmd_probe(const std::vector<std::string>& names, const std::string& out) {
    std::uint64_t seed = 0;
    try {
        if (const auto s = seed_override()) {
            seed = *s;
            std::cerr << "PARACALC_SEED=" << seed << " overrides probe seeds\n";
        }
    } catch (const SchemaError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    bool pass = true;
    nlohmann::ordered_json report;
    try {
        report = run_probe_suite(names, seed, pass);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    }
    const std::string text = report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return 2;
        }
        f << text;
    }
    return pass ? 0 : 1;
}

int cmd_plot(const std::string& csv, const std::string& kind, std::string out) {
    if (out.empty()) {
        out = csv;
        const auto dot = out.rfind('.');
        if (dot != std::string::npos && out.find('/', dot) == std::string::npos) out.erase(dot);
        out += ".svg";
    }
    std::string svg;
    try {
        svg = plot_csv(csv, kind);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "cannot write " << out << "\n";
        return 2;
    }
    f << svg;
    std::cout << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"paracalc: paradifferential calculus lab"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: hardware concurrency)");

    auto* run = app.add_subcommand("run", "run a scenario file");
    std::string scenario;
    RunOptions ropt;
    run->add_option("scenario", scenario, "scenario JSON")->required();
    run->add_option("--out", ropt.out_dir, "output directory (default out/<name>)");
    run->add_option("--threads", threads, "worker threads (0: hardware concurrency)");
    run->add_flag("--rebaseline", ropt.rebaseline, "rewrite the sibling baseline file");

    auto* probe = app.add_subcommand("probe", "run registered probes by name, or all");
    std::vector<std::string> names;
    std::string probe_out;
    probe->add_option("names", names, "probe names, comma separated or repeated")->delimiter(',');
    probe->add_option("--out", probe_out, "write the report here instead of stdout");
    probe->add_option("--threads", threads, "worker threads (0: hardware concurrency)");
    probe->add_flag_callback("--list", [] {
        for (const auto& n : probe_names()) std::cout << n << "\n";
        std::exit(0);
    }, "list probe names");

    auto* plot = app.add_subcommand("plot", "render a CSV as SVG");
    std::string csv, kind, plot_out;
    plot->add_option("csv", csv, "energy.csv, loss.csv or order.csv")->required();
    plot->add_option("--kind", kind, "energy, loss or order")->required();
    plot->add_option("--out", plot_out, "SVG path (default: csv path with .svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    set_thread_count(threads);

    try {
        if (*run) return cmd_run(scenario, ropt);
        if (*probe) return cmd_probe(names, probe_out);
        if (*plot) return cmd_plot(csv, kind, plot_out);
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
