#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubelab/rational.hpp"

namespace cubelab {

inline constexpr const char* kReportSchemaVersion = "1";

struct Check {
    std::string name;
    bool pass = false;
    std::string lhs;
    std::string rhs;
    double margin = 0;
};

// Single-run report; serialization order is fixed so that identical configs
// and seeds produce byte-identical output (wall_ms excepted).
struct Report {
    std::string command;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::vector<Check> checks;
    double wall_ms = 0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add_check(const std::string& name, bool pass, const std::string& lhs,
                   const std::string& rhs, double margin) {
        checks.push_back(Check{name, pass, lhs, rhs, margin});
    }

    nlohmann::ordered_json to_json(bool include_wall_time = true) const {
        nlohmann::ordered_json j;
        j["schema_version"] = kReportSchemaVersion;
        j["command"] = command;
        j["params"] = params;
        j["results"] = results;
        nlohmann::ordered_json cs = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json cj;
            cj["name"] = c.name;
            cj["pass"] = c.pass;
            cj["lhs"] = c.lhs;
            cj["rhs"] = c.rhs;
            cj["margin"] = c.margin;
            cs.push_back(cj);
        }
        j["checks"] = cs;
        if (include_wall_time) j["wall_ms"] = wall_ms;
        return j;
    }
};

}  // namespace cubelab
