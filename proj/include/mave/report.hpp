#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mave/ma_family.hpp"
#include "mave/numsim.hpp"

namespace mave {

inline constexpr const char* kToolVersion = "0.1.0";

// One-component right side of the equation family (u_t jets), the input of
// the Helmholtz and homotopy checks.
JetPolynomial one_component_rhs(const MACoefficients& c);

enum class CheckStatus { Pass, Fail, Unsupported, Inconclusive, AssumedPerPaper };
std::string to_string(CheckStatus s);

struct CheckRecord {
    std::string module;
    std::string check_id;
    std::string kase;
    std::string variant; // may be empty
    int sample = -1;     // -1 for per-case records
    CheckStatus status = CheckStatus::Pass;
    std::string coeffs;      // the vector the check ran on
    std::string mu;          // skew-identity scalar, when applicable
    std::string expected_c9; // second-structure constraint, when applicable
    std::string details;     // residual text on failure, notes otherwise
};

struct SuiteConfig {
    std::vector<CoeffCase> cases{CoeffCase::Generic, CoeffCase::C1Zero, CoeffCase::C2Zero,
                                 CoeffCase::C3Zero};
    int samples = 20;
    std::uint64_t seed = 0;
    std::optional<MACoefficients> explicit_coeffs; // overrides sampling
    bool break_integrability = false;              // demonstration mode
    bool tri = true;
    int tri_samples = 20;
};

struct VerificationReport {
    SuiteConfig config;
    std::vector<CheckRecord> checks;
    std::vector<std::string> coefficient_vectors;

    int count(CheckStatus s) const;
    // 0 when no FAIL record exists, else 1.
    int exit_code() const;
    // Deterministic given config and seed; the timestamp field is the one
    // nondeterministic element and can be omitted.
    std::string to_json(bool with_timestamp = true) const;
};

VerificationReport run_verification_suite(const SuiteConfig& cfg);

// ---------------------------------------------------------------------------
// Simulation runs

struct SimConfig {
    GridSpec grid;
    double dt = 1e-3;
    int steps = 100;
    int monitor_every = 10;
    double cfl_threshold = 0.5;
    MACoefficients coeffs;
    std::vector<FourierMode> u_modes, v_modes;
    double u_const = 0.0, v_const = 0.0;
    std::optional<double> h1_rel_drift_tol;
    bool strict_conservation = false;
    std::optional<FactorVariant> recursion_variant;
    std::optional<double> recursion_residual_tol;

    static SimConfig from_json(const std::string& text);
};

struct SimResult {
    std::string csv;     // t, h1, h1_rel_drift, recursion_r1, recursion_r2
    std::string summary; // JSON
    int exit_code = 0;   // 0 ok, 1 blow-up or tolerance exceeded
};

SimResult run_simulation(const SimConfig& cfg);

// JSON schema of the verification report.
std::string report_schema_json();

} // namespace mave
