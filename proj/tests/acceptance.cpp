// One PASS/FAIL line per acceptance criterion. Runtime budgets are part of each verdict.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "paracalc/probes.hpp"

using namespace paracalc;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<bool(std::string&)> run;
};

bool probes_pass(const std::vector<std::string>& names, std::string& note) {
    bool ok = true;
    for (const auto& n : names) {
        const ProbeOutcome o = run_probe(n, 0);
        for (const auto& c : o.checks)
            if (c.gated && !c.pass) {
                ok = false;
                note += " " + n + "." + c.name + "=" + std::to_string(c.value);
            }
    }
    return ok;
}

std::vector<std::string> order_probes() {
    std::vector<std::string> out;
    for (const auto& n : probe_names())
        if (n.rfind("order:", 0) == 0) out.push_back(n);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

bool cli_determinism(std::string& note) {
    const fs::path scen = fs::path(PARACALC_SOURCE_DIR) / "scenarios";
    const fs::path tmp = fs::temp_directory_path() / "paracalc_acceptance";
    fs::remove_all(tmp);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(scen)) {
        const std::string name = e.path().filename().string();
        if (e.path().extension() == ".json" && name.find(".baseline.") == std::string::npos) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        note = " no bundled scenarios";
        return false;
    }
    bool ok = true;
    for (const auto& f : files) {
        const std::string stem = f.stem().string();
        std::string reports[2];
        for (int r = 0; r < 2; ++r) {
            const fs::path out = tmp / (stem + "_" + std::to_string(r));
            const std::string cmd = quote(PARACALC_CLI) + " run " + quote(f.string()) + " --out " +
                                    quote(out.string()) + " > " + quote((out.string() + ".log")) + " 2>&1";
            fs::create_directories(out);
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                ok = false;
                note += " " + stem + ":exit" + std::to_string(rc);
            }
            reports[r] = read_file(out / "report.json");
        }
        if (reports[0].empty() || reports[0] != reports[1]) {
            ok = false;
            note += " " + stem + ":reports differ";
        }
    }
    note += " (" + std::to_string(files.size()) + " scenarios)";
    return ok;
}

}  // namespace

int main() {
    unsetenv("PARACALC_SEED");
    auto probe = [](std::vector<std::string> names) {
        return [names](std::string& note) { return probes_pass(names, note); };
    };
    const std::vector<Criterion> criteria = {
        {1, "dyadic exactness", 10, probe({"dyadic"})},
        {2, "norm machinery and product boundedness", 60, probe({"norms"})},
        {3, "mollifier laws", 30, probe({"mollifier"})},
        {4, "operator order suite", 600, probe(order_probes())},
        {5, "symmetrizer residuals and calibration", 60, probe({"symmetrizer"})},
        {6, "no-loss controls", 60, probe({"no_loss"})},
        {7, "loss of derivatives", 600, probe({"loss"})},
        {8, "commutator decay", 60, probe({"commutator"})},
        {9, "oracle equivalence", 10, probe({"oracle"})},
        {10, "CLI determinism", 1500, cli_determinism},
    };
    bool all = true;
    for (const auto& c : criteria) {
        std::string note;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(note);
        } catch (const std::exception& e) {
            note += std::string(" exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > c.budget_s) {
            ok = false;
            note += " over budget";
        }
        all = all && ok;
        std::printf("criterion %2d %s  %s  %.1f s (budget %.0f s)%s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), dt,
                    c.budget_s, note.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
