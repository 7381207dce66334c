// quatmetric: metric operators, right spectra and two-level dynamics from the command line.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "quatmetric/commands.hpp"

namespace qm = quatmetric;

namespace {

qm::json read_json(const std::string& path) {
    if (path.empty()) throw qm::ConfigInvalid("--config is required");
    std::ifstream in_file;
    std::istream* in = &std::cin;
    if (path != "-") {
        in_file.open(path);
        if (!in_file) throw qm::ConfigInvalid("cannot open " + path);
        in = &in_file;
    }
    try {
        return qm::json::parse(*in);
    } catch (const qm::json::parse_error& e) {
        throw qm::ConfigInvalid(path + ": " + e.what());
    }
}

struct Output {
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw qm::ConfigInvalid("cannot write " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? static_cast<std::ostream&>(file) : std::cout; }
    std::ofstream file;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quaternionic metric operators and alternative descriptions of a two-level system"};
    app.require_subcommand(1);

    std::string config, out;
    qm::cli::RunManifest manifest;
    std::optional<double> tol;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config, "input JSON file ('-' for stdin)");
        if (needs_config) opt->required();
        sub->add_option("--out", out, "output file (default stdout)");
        sub->add_option("--seed", manifest.seed, "seed for randomized parts")->capture_default_str();
    };

    auto* simulate = app.add_subcommand("simulate", "evolve the two-level model; CSV trajectory + JSON summary");
    add_common(simulate, true);
    simulate->add_flag("--allow-indefinite", manifest.allow_indefinite, "run even when |z| >= a");
    auto* spectrum = app.add_subcommand("spectrum", "right eigenvalues of a quaternionic matrix");
    add_common(spectrum, true);
    auto* metric = app.add_subcommand("metric", "metric operator, solution space and irreducibility");
    add_common(metric, true);
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    add_common(verify, false);
    verify->add_option("--tol", tol, "override every invariant tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qm::cli::kInputError;
    }
    manifest.tol = tol;

    try {
        if (simulate->parsed()) {
            manifest.command = "simulate";
            const auto cfg = read_json(config);
            std::ostringstream csv, summary;
            const int rc = qm::cli::simulate(cfg, manifest, csv, summary, std::cerr);
            if (rc != qm::cli::kSuccess) return rc;
            if (out.empty()) {
                std::cout << csv.str();
                std::cerr << summary.str();
            } else {
                Output o(out);
                o.stream() << csv.str();
                std::cout << summary.str();
            }
            return rc;
        }
        if (spectrum->parsed()) {
            manifest.command = "spectrum";
            const auto in = read_json(config);
            std::ostringstream buf;
            const int rc = qm::cli::spectrum(in, buf);
            Output(out).stream() << buf.str();
            return rc;
        }
        if (metric->parsed()) {
            manifest.command = "metric";
            const auto in = read_json(config);
            std::ostringstream buf;
            const int rc = qm::cli::metric(in, manifest, buf);
            Output(out).stream() << buf.str();
            return rc;
        }
        manifest.command = "verify";
        std::ostringstream buf;
        const int rc = qm::cli::verify(manifest, buf);
        Output(out).stream() << buf.str();
        return rc;
    } catch (const qm::ConfigInvalid& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return qm::cli::kInputError;
    } catch (const qm::json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return qm::cli::kInputError;
    } catch (const qm::DimensionMismatch& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return qm::cli::kInputError;
    }
}
