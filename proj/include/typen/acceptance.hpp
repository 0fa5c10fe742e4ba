// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

namespace typen {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0;
    std::vector<std::string> failed_parts;  // empty when pass
    std::string detail;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    bool all_pass() const;
    std::set<int> failing() const;
};

int acceptance_criterion_count();
// Runs every criterion (or only those in `only`).  Exceptions inside a
// criterion count as a failure of that criterion.
AcceptanceReport run_acceptance(const std::set<int>& only = {});
nlohmann::ordered_json to_json(const AcceptanceReport& r, const std::set<int>& expected_red = {});
// "PASS  3  closed solutions ... (0.001 s)"
std::string format_line(const CriterionResult& c);

// Exit status: 0 iff the failing set equals expected_red (restricted to the criteria that ran).
int acceptance_exit_code(const AcceptanceReport& r, const std::set<int>& expected_red);

}  // namespace typen
