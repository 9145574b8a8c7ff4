#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rledger/bench.hpp"
#include "rledger/oracle.hpp"
#include "rledger/replay.hpp"

namespace {

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

// Exit codes: 0 success, 1 expectation or property failure, 2 usage or parse error.
int main(int argc, char** argv) {
    CLI::App app{"Reversible token ledger: scenario replay, property oracle and benchmark"};
    app.require_subcommand(1);

    std::string file, report_path;
    bool as_json = false, wall_time = false;
    auto* replay = app.add_subcommand("replay", "Run a scenario file and check its expectations");
    replay->add_option("file", file, "Scenario file")->required();
    replay->add_option("--report", report_path, "Write the report here instead of stdout");
    replay->add_flag("--json", as_json, "JSON report (sorted keys)");
    replay->add_flag("--wall-time", wall_time, "Include wall-clock time in the report");

    rledger::oracle::Options oopt;
    std::string oracle_report;
    bool oracle_json = false;
    auto* oracle = app.add_subcommand("oracle", "Randomized property checks of the freeze procedure");
    oracle->add_option("--trials", oopt.trials, "Number of trials")->capture_default_str();
    oracle->add_option("--seed", oopt.seed, "Master seed")->capture_default_str();
    oracle->add_flag("--burns", oopt.burns, "Mix burns into the generated histories");
    oracle->add_option("--report", oracle_report, "Write the report here instead of stdout");
    oracle->add_flag("--json", oracle_json, "JSON report");

    rledger::bench::Options bopt;
    bool bench_json = false;
    auto* bench = app.add_subcommand("bench", "Obligation pass over a random DAG");
    bench->add_option("--nodes", bopt.nodes, "Vertices")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--edges", bopt.edges, "Edges")->capture_default_str();
    bench->add_option("--seed", bopt.seed, "Seed")->capture_default_str();
    bench->add_flag("--json", bench_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*replay) {
            const auto report = rledger::scenario::replay_file(file, {wall_time});
            emit(as_json ? rledger::scenario::to_json(report).dump(2) + "\n" : rledger::scenario::to_text(report),
                 report_path);
            return report.passed() ? 0 : 1;
        }
        if (*oracle) {
            const auto report = rledger::oracle::run(oopt);
            emit(oracle_json ? report.to_json().dump(2) + "\n" : report.to_text(), oracle_report);
            return report.passed() ? 0 : 1;
        }
        if (*bench) {
            const auto result = rledger::bench::run(bopt);
            std::cout << (bench_json ? result.to_json().dump(2) + "\n" : result.to_text());
            return result.within_bound() ? 0 : 1;
        }
    } catch (const rledger::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
