#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mave/errors.hpp"
#include "mave/hamiltonian.hpp"
#include "mave/report.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw mave::ValidationError("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::endl;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw mave::ValidationError("cannot write file: " + path);
    out << content << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mave - exact verification and desk-scale simulation for evolutionary "
                 "symplectic Monge-Ampere systems"};
    app.require_subcommand(1);

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run the batch verification suite");
    std::vector<std::string> case_names;
    verify->add_option("--case", case_names, "coefficient case (generic|c1zero|c2zero|c3zero)")
        ->expected(-1);
    int samples = 20;
    verify->add_option("--samples", samples, "random instances per case");
    std::uint64_t seed = 0;
    verify->add_option("--seed", seed, "RNG seed");
    std::string coeffs_file;
    verify->add_option("--coeffs", coeffs_file, "explicit coefficient vector (JSON file)");
    bool break_integrability = false;
    verify->add_flag("--break-integrability", break_integrability,
                     "perturb the solved coefficient off the integrability surface");
    bool no_tri = false;
    verify->add_flag("--no-tri", no_tri, "skip the tri-Hamiltonian block");
    int tri_samples = 20;
    verify->add_option("--tri-samples", tri_samples, "random draws for the tri-Hamiltonian block");
    bool no_timestamp = false;
    verify->add_flag("--no-timestamp", no_timestamp, "omit the timestamp (byte-reproducible output)");
    std::string verify_out;
    verify->add_option("-o,--output", verify_out, "report path (default stdout)");

    // tri-solve ---------------------------------------------------------------
    auto* tri = app.add_subcommand("tri-solve",
                                   "closed-form tri-Hamiltonian coefficients from "
                                   "(c1, c2, c3, c5, c6, c8)");
    std::vector<std::string> tri_args;
    tri->add_option("values", tri_args, "six rationals c1 c2 c3 c5 c6 c8")->expected(6);

    // simulate ----------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "pseudo-spectral run of the two-component system");
    std::string sim_config;
    simulate->add_option("--config", sim_config, "simulation config JSON file")->required();
    std::string csv_out;
    simulate->add_option("--csv", csv_out, "monitor time series output path");
    std::string sim_out;
    simulate->add_option("-o,--output", sim_out, "summary JSON path (default stdout)");

    // report-schema -------------------------------------------------------------
    auto* schema = app.add_subcommand("report-schema", "print the report JSON schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) {
            mave::SuiteConfig cfg;
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.break_integrability = break_integrability;
            cfg.tri = !no_tri;
            cfg.tri_samples = tri_samples;
            if (!case_names.empty()) {
                cfg.cases.clear();
                for (const std::string& n : case_names)
                    cfg.cases.push_back(mave::coeff_case_from_string(n));
            }
            if (!coeffs_file.empty()) {
                cfg.explicit_coeffs = mave::MACoefficients::from_json(read_file(coeffs_file));
                cfg.cases = {cfg.explicit_coeffs->kase};
            }
            mave::VerificationReport report = mave::run_verification_suite(cfg);
            write_output(verify_out, report.to_json(!no_timestamp));
            return report.exit_code();
        }
        if (tri->parsed()) {
            auto q = [&](int i) { return mave::rational_from_string(tri_args[i]); };
            mave::MACoefficients c = mave::tri_solve(q(0), q(1), q(2), q(3), q(4), q(5));
            nlohmann::ordered_json j = nlohmann::ordered_json::parse(c.to_json());
            j["intcon_residual"] = mave::to_string(mave::intcon_residual(c));
            j["c9_constraint_J1"] =
                mave::to_string(mave::second_constraint_c9(c, mave::SecondVariant::J1));
            j["c9_constraint_J1prime"] =
                mave::to_string(mave::second_constraint_c9(c, mave::SecondVariant::J1Prime));
            std::cout << j.dump(2) << std::endl;
            return 0;
        }
        if (simulate->parsed()) {
            mave::SimConfig cfg = mave::SimConfig::from_json(read_file(sim_config));
            mave::SimResult res = mave::run_simulation(cfg);
            if (!csv_out.empty())
                write_output(csv_out, res.csv);
            write_output(sim_out, res.summary);
            return res.exit_code;
        }
        if (schema->parsed()) {
            std::cout << mave::report_schema_json() << std::endl;
            return 0;
        }
    } catch (const mave::ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const mave::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
