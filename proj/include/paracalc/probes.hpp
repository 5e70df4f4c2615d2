#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace paracalc {

// One numeric check: value compared against tol through relation ("<=", ">=", "abs<=").
struct ProbeCheck {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    std::string relation = "<=";
    bool gated = true;
    std::string provenance = "fixed";  // fixed threshold, or "baseline:<file>"
    bool pass = false;
};

ProbeCheck make_check(const std::string& name, double value, const std::string& relation, double tol,
                      bool gated = true, const std::string& provenance = "fixed");

struct ProbeOutcome {
    std::string name;
    std::vector<ProbeCheck> checks;
    nlohmann::ordered_json detail = nlohmann::ordered_json::object();

    bool pass() const;  // every gated check passes
};

// Round to 12 significant digits so reports are byte-stable.
double r12(double v);
nlohmann::ordered_json to_json(const ProbeCheck& c);
nlohmann::ordered_json to_json(const ProbeOutcome& o);

// Registered probe names, in report order.
const std::vector<std::string>& probe_names();
// Throws std::invalid_argument for an unknown name.
ProbeOutcome run_probe(const std::string& name, std::uint64_t seed = 0);

}  // namespace paracalc
