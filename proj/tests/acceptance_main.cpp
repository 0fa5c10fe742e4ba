// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion, JSON summary on request.
// Exit 0 iff the failing set equals --expect-red (empty by default).
#include "typen/acceptance.hpp"
#include "typen/export.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {
std::set<int> ids(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string expect, only, json;
    app.add_option("--expect-red", expect, "comma-separated ids known to fail");
    app.add_option("--only", only, "comma-separated ids to run");
    app.add_option("--json", json, "write the JSON summary here");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::set<int> red = ids(expect);
    const auto rep = typen::run_acceptance(ids(only));
    for (const auto& c : rep.criteria) std::cout << typen::format_line(c) << "\n";
    const int code = typen::acceptance_exit_code(rep, red);
    std::cout << rep.criteria.size() << " criteria, " << rep.failing().size() << " failing";
    if (!red.empty()) std::cout << " (" << red.size() << " expected red)";
    std::cout << "\n";
    if (!json.empty()) std::ofstream(json) << typen::dump_json(typen::to_json(rep, red));
    return code;
}
