#include "mave/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mave/errors.hpp"
#include "mave/hamiltonian.hpp"
#include "mave/variational.hpp"

namespace mave {

using nlohmann::ordered_json;
using namespace jets;

JetPolynomial one_component_rhs(const MACoefficients& c) {
    return c.c1() * (u(1, 1, 0) * u(0, 1, 1) - u(1, 0, 1) * u(0, 2, 0)) +
           c.c2() * (u(1, 1, 0) * u(0, 0, 2) - u(1, 0, 1) * u(0, 1, 1)) +
           c.c3() * (u(0, 2, 0) * u(0, 0, 2) - u(0, 1, 1).pow(2)) + c.c4() * u(1, 1, 0) +
           c.c5() * u(1, 0, 1) + c.c6() * u(0, 2, 0) + c.c7() * u(0, 1, 1) +
           c.c8() * u(0, 0, 2) + JetPolynomial::constant(c.c9());
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        case CheckStatus::Unsupported: return "UNSUPPORTED";
        case CheckStatus::Inconclusive: return "INCONCLUSIVE";
        default: return "ASSUMED-PER-PAPER";
    }
}

int VerificationReport::count(CheckStatus s) const {
    int n = 0;
    for (const auto& c : checks)
        n += c.status == s ? 1 : 0;
    return n;
}

int VerificationReport::exit_code() const {
    return count(CheckStatus::Fail) > 0 ? 1 : 0;
}

std::string VerificationReport::to_json(bool with_timestamp) const {
    ordered_json j;
    j["tool"] = "mave";
    j["version"] = kToolVersion;
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::now();
        j["generated_at"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    j["seed"] = config.seed;
    j["samples"] = config.samples;
    {
        ordered_json cases = ordered_json::array();
        for (CoeffCase k : config.cases)
            cases.push_back(to_string(k));
        j["cases"] = cases;
    }
    j["break_integrability"] = config.break_integrability;
    j["tri"] = config.tri;
    j["coefficient_vectors"] = coefficient_vectors;
    ordered_json arr = ordered_json::array();
    for (const CheckRecord& c : checks) {
        ordered_json r;
        r["module"] = c.module;
        r["check"] = c.check_id;
        r["case"] = c.kase;
        if (!c.variant.empty())
            r["variant"] = c.variant;
        if (c.sample >= 0)
            r["sample"] = c.sample;
        r["status"] = to_string(c.status);
        if (!c.coeffs.empty())
            r["coeffs"] = c.coeffs;
        if (!c.mu.empty())
            r["mu"] = c.mu;
        if (!c.expected_c9.empty())
            r["expected_c9"] = c.expected_c9;
        if (!c.details.empty())
            r["details"] = c.details;
        arr.push_back(std::move(r));
    }
    j["checks"] = std::move(arr);
    ordered_json sum;
    sum["pass"] = count(CheckStatus::Pass);
    sum["fail"] = count(CheckStatus::Fail);
    sum["unsupported"] = count(CheckStatus::Unsupported);
    sum["inconclusive"] = count(CheckStatus::Inconclusive);
    sum["assumed_per_paper"] = count(CheckStatus::AssumedPerPaper);
    j["summary"] = std::move(sum);
    j["exit_code"] = exit_code();
    return j.dump(2);
}

namespace {

struct Recorder {
    VerificationReport& report;
    std::string kase;
    int sample;
    std::string coeffs;

    void add(const std::string& module, const std::string& check, CheckStatus status,
             const std::string& variant = "", const std::string& details = "",
             const std::string& mu = "", const std::string& expected_c9 = "") {
        CheckRecord r;
        r.module = module;
        r.check_id = check;
        r.kase = kase;
        r.variant = variant;
        r.sample = sample;
        r.status = status;
        r.coeffs = coeffs;
        r.details = details;
        r.mu = mu;
        r.expected_c9 = expected_c9;
        report.checks.push_back(std::move(r));
    }
};

CheckStatus pass_fail(bool ok) {
    return ok ? CheckStatus::Pass : CheckStatus::Fail;
}

void run_sample_checks(VerificationReport& report, const MACoefficients& c, int sample) {
    Recorder rec{report, to_string(c.kase), sample, c.str()};

    // variational: Helmholtz and the homotopy round-trip
    const JetPolynomial F = -u(2, 0, 0) + one_component_rhs(c);
    const HelmholtzResult hh = helmholtz_residuals(F);
    rec.add("variational", "helmholtz", pass_fail(hh.self_adjoint), "",
            hh.self_adjoint ? "" : "residuals: " + hh.residuals[0].str());
    if (hh.self_adjoint) {
        const JetPolynomial L = homotopy_lagrangian(F);
        const JetPolynomial back = euler_variational(L, Field::U);
        rec.add("variational", "homotopy_roundtrip", pass_fail(back == F), "",
                back == F ? "" : "residual: " + (back - F).str());
    }

    // integrability cross-check (two routes must agree exactly)
    try {
        const Rational res = integrability_residual(c);
        rec.add("ma_family", "integrability_crosscheck", pass_fail(res == 0), "",
                res == 0 ? "eps = 0 used in the general-equation mapping"
                         : "residual " + to_string(res));
    } catch (const InternalConsistencyError& e) {
        rec.add("ma_family", "integrability_crosscheck", CheckStatus::Fail, "", e.what());
    }

    // factorization suite
    for (FactorVariant v : compatible_variants(c.kase)) {
        const std::string vn = to_string(v);
        try {
            const SkewFactorSet s = build_factors(c, v);
            const SkewIdentityResult skew = verify_skew_identity(s);
            rec.add("factorization", "skew_identity", pass_fail(skew.ok), vn,
                    skew.ok ? "" : "residual: " + skew.residual.str(), to_string(skew.mu));
            const CommutatorResult comm = verify_commutators(s);
            rec.add("factorization", "commutators", pass_fail(comm.ok), vn,
                    comm.ok ? ""
                            : "residuals: [" + comm.residuals[0].str() + "; " +
                                  comm.residuals[1].str() + "; " + comm.residuals[2].str() +
                                  "]");
            const LaxResult lax = verify_lax(s);
            rec.add("factorization", "lax_pair", pass_fail(lax.ok), vn,
                    lax.ok ? "" : "lambda-degree residuals nonzero");
            if (v != FactorVariant::C2ZeroAlt)
                rec.add("factorization", "recursion_consistency",
                        pass_fail(recursion_consistency(c, v)), vn);
        } catch (const Error& e) {
            rec.add("factorization", "build_factors", CheckStatus::Fail, vn, e.what());
        }
    }
    if (c.kase == CoeffCase::Generic) {
        rec.add("factorization", "cross_relations", pass_fail(cross_relations(c)));
        rec.add("factorization", "discrete_symmetry", pass_fail(discrete_symmetry_consistent(c)));
    }

    // Hamiltonian machinery
    const HamiltonianStructure h = build_first_structure(c);
    rec.add("hamiltonian", "j0_k_inverse",
            pass_fail(h.J0.compose(h.K) == OperatorMatrix::identity() &&
                      h.K.compose(h.J0) == OperatorMatrix::identity()));
    rec.add("hamiltonian", "skew_K", pass_fail(skew_adjoint_status(h.K) == SkewStatus::Pass));
    rec.add("hamiltonian", "skew_J0", pass_fail(skew_adjoint_status(h.J0) == SkewStatus::Pass));
    {
        const ClosureResult cl = symplectic_closure(h.K);
        rec.add("variational", "symplectic_closure",
                cl.closed ? CheckStatus::Pass : CheckStatus::Inconclusive, "",
                cl.closed ? "" : "reduction stuck at: " + cl.residual.str());
    }
    const ModelBundle m = build_model(c);
    {
        const FlowResult f = verify_flow(h.J0, h.H1, m);
        rec.add("hamiltonian", "flow_J0_H1", pass_fail(f.ok), "",
                f.ok ? "" : "r1 = " + f.r1.str() + "; r2 = " + f.r2.str());
    }

    for (SecondVariant sv : compatible_second_variants(c.kase)) {
        const std::string vn = to_string(sv);
        const Rational c9req = second_constraint_c9(c, sv);
        // R o J0 equals the second structure (c9-independent)
        try {
            const RJ0Result rj = verify_RJ0(c, sv);
            rec.add("hamiltonian", "r_j0_composition", pass_fail(rj.ok && rj.rel_ok), vn,
                    rj.rel_ok ? "" : "B1 relation violated");
            rec.add("hamiltonian", "skew_second", pass_fail(rj.skew_ok), vn);
        } catch (const UnsupportedOperationError& e) {
            rec.add("hamiltonian", "r_j0_composition", CheckStatus::Unsupported, vn, e.what());
        }
        // flow on the constraint-satisfying companion instance
        MACoefficients cc = c;
        cc.c[8] = c9req;
        try {
            const SecondStructure sec = build_second_structure(cc, sv);
            const ModelBundle mc = build_model(cc);
            const FlowResult f = verify_flow(sec.J, sec.H0, mc);
            rec.add("hamiltonian", "flow_second", pass_fail(f.ok), vn,
                    f.ok ? "" : "r1 = " + f.r1.str() + "; r2 = " + f.r2.str(), "",
                    to_string(c9req));
            // negative probe: shifting c9 must break the flow by a constant
            MACoefficients shifted = cc;
            shifted.c[8] += 1;
            const FlowResult fs = verify_flow(sec.J, sec.H0, build_model(shifted));
            const bool probe_ok = !fs.ok && fs.r2.is_constant() && !fs.r2.is_zero();
            rec.add("hamiltonian", "flow_second_c9_probe", pass_fail(probe_ok), vn,
                    "shifted-c9 flow residual: " + fs.r2.str(), "", to_string(c9req));
        } catch (const UnsupportedOperationError& e) {
            rec.add("hamiltonian", "flow_second", CheckStatus::Unsupported, vn, e.what());
        } catch (const Error& e) {
            rec.add("hamiltonian", "flow_second", CheckStatus::Fail, vn, e.what());
        }
    }
}

} // namespace

VerificationReport run_verification_suite(const SuiteConfig& cfg) {
    VerificationReport report;
    report.config = cfg;

    for (CoeffCase kase : cfg.cases) {
        const int nsamples = cfg.explicit_coeffs ? 1 : cfg.samples;
        for (int i = 0; i < nsamples; ++i) {
            MACoefficients c;
            if (cfg.explicit_coeffs) {
                c = *cfg.explicit_coeffs;
                if (c.kase != kase)
                    continue;
            } else {
                c = sample_integrable(kase, split_seed(cfg.seed, std::uint64_t(kase), i));
            }
            if (cfg.break_integrability) {
                switch (kase) {
                    case CoeffCase::C1Zero: c.c[5] += 1; break;
                    case CoeffCase::C2Zero: c.c[7] += 1; break;
                    default: c.c[6] += 1; break;
                }
            }
            report.coefficient_vectors.push_back(to_string(kase) + "#" + std::to_string(i) +
                                                 " " + c.str());
            run_sample_checks(report, c, i);
        }
        CheckRecord assumed;
        assumed.module = "hamiltonian";
        assumed.check_id = "jacobi_and_compatibility";
        assumed.kase = to_string(kase);
        assumed.sample = -1;
        assumed.status = CheckStatus::AssumedPerPaper;
        assumed.details = "Jacobi identities and pairwise compatibility of the Hamiltonian "
                          "operators are not verified symbolically";
        report.checks.push_back(std::move(assumed));
    }

    if (cfg.tri) {
        bool has_generic = false;
        for (CoeffCase k : cfg.cases)
            has_generic = has_generic || k == CoeffCase::Generic;
        if (has_generic) {
            RationalSampler rs(split_seed(cfg.seed, 0x7121, 0));
            for (int i = 0; i < cfg.tri_samples; ++i) {
                MACoefficients c;
                try {
                    c = tri_solve(rs.draw_nonzero(), rs.draw_nonzero(), rs.draw_nonzero(),
                                  rs.draw(), rs.draw(), rs.draw());
                } catch (const Error& e) {
                    CheckRecord r;
                    r.module = "hamiltonian";
                    r.check_id = "tri_solve";
                    r.kase = "generic";
                    r.sample = i;
                    r.status = CheckStatus::Fail;
                    r.details = e.what();
                    report.checks.push_back(std::move(r));
                    continue;
                }
                Recorder rec{report, "generic", i, c.str()};
                const ModelBundle m = build_model(c);
                const HamiltonianStructure h = build_first_structure(c);
                bool flows = verify_flow(h.J0, h.H1, m).ok;
                for (SecondVariant sv : {SecondVariant::J1, SecondVariant::J1Prime}) {
                    const SecondStructure sec = build_second_structure(c, sv);
                    flows = flows && verify_flow(sec.J, sec.H0, m).ok;
                }
                rec.add("hamiltonian", "tri_hamiltonian_flows", pass_fail(flows));
            }
            // canonical reproduction
            Recorder rec{report, "generic", -1, canonical_instance().str()};
            const MACoefficients c = tri_solve(rat(1), rat(1), rat(1), rat(1), rat(1), rat(1));
            rec.add("hamiltonian", "tri_canonical_reproduction",
                    pass_fail(c.c == canonical_instance().c));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Simulation

SimConfig SimConfig::from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed simulation config: ") + e.what());
    }
    SimConfig cfg;
    try {
        if (j.contains("grid")) {
            cfg.grid.n1 = j["grid"].value("n1", 64);
            cfg.grid.n2 = j["grid"].value("n2", 64);
        }
        cfg.dt = j.value("dt", 1e-3);
        cfg.steps = j.value("steps", 100);
        cfg.monitor_every = j.value("monitor_every", 10);
        cfg.cfl_threshold = j.value("cfl_threshold", 0.5);
        if (!j.contains("coefficients"))
            throw ValidationError("simulation config lacks 'coefficients'");
        cfg.coeffs = MACoefficients::from_json(j["coefficients"].dump());
        auto parse_modes = [](const ordered_json& arr) {
            std::vector<FourierMode> out;
            for (const auto& m : arr)
                out.push_back(FourierMode{m.value("k1", 0), m.value("k2", 0),
                                          m.value("amplitude", 0.0), m.value("phase", 0.0)});
            return out;
        };
        if (j.contains("initial")) {
            const auto& init = j["initial"];
            if (init.contains("u_modes"))
                cfg.u_modes = parse_modes(init["u_modes"]);
            if (init.contains("v_modes"))
                cfg.v_modes = parse_modes(init["v_modes"]);
            cfg.u_const = init.value("u_const", 0.0);
            cfg.v_const = init.value("v_const", 0.0);
        }
        if (j.contains("monitors")) {
            const auto& mon = j["monitors"];
            if (mon.contains("h1_rel_drift_tol"))
                cfg.h1_rel_drift_tol = mon["h1_rel_drift_tol"].get<double>();
            cfg.strict_conservation = mon.value("strict_conservation", false);
            if (mon.contains("recursion_variant")) {
                const std::string v = mon["recursion_variant"].get<std::string>();
                if (v == "generic1")
                    cfg.recursion_variant = FactorVariant::Generic1;
                else if (v == "c3zero")
                    cfg.recursion_variant = FactorVariant::C3Zero;
                else
                    throw ValidationError("recursion monitor supports generic1 or c3zero");
            }
            if (mon.contains("recursion_residual_tol"))
                cfg.recursion_residual_tol = mon["recursion_residual_tol"].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed simulation config: ") + e.what());
    }
    return cfg;
}

SimResult run_simulation(const SimConfig& cfg) {
    Simulator sim(cfg.grid, cfg.coeffs);
    const HamiltonianStructure h = build_first_structure(cfg.coeffs);
    FieldState s = sim.make_state(cfg.u_modes, cfg.v_modes, cfg.u_const, cfg.v_const);

    EvolveOptions o;
    o.dt = cfg.dt;
    o.steps = cfg.steps;
    o.monitor_every = cfg.monitor_every;
    o.cfl_threshold = cfg.cfl_threshold;
    o.strict_conservation = cfg.strict_conservation;

    std::ostringstream csv;
    csv << "t,h1,h1_rel_drift,recursion_r1,recursion_r2\n";
    const double h1_0 = sim.functional_eval(h.H1, s);
    double max_drift = 0.0, max_recursion = 0.0, max_kernel = 0.0;
    const double h1_scale = std::abs(h1_0) > 1e-300 ? std::abs(h1_0) : 1.0;

    auto monitor = [&](const FieldState& st) {
        const double h1 = sim.functional_eval(h.H1, st);
        const double drift = std::abs(h1 - h1_0) / h1_scale;
        max_drift = std::max(max_drift, drift);
        double r1 = 0.0, r2 = 0.0;
        if (cfg.recursion_variant) {
            Spectrum uh = sim.grid().fft(st.u);
            Spectrum vh = sim.grid().fft(st.v);
            SymmetryFields sym{sim.grid().derivative(uh, 1, 0), sim.grid().derivative(vh, 1, 0)};
            double kern = 0.0;
            SymmetryFields tilde = sim.recursion_apply(st, sym, *cfg.recursion_variant, &kern);
            max_kernel = std::max(max_kernel, kern);
            std::tie(r1, r2) = sim.recursion_residual(st, sym, tilde, *cfg.recursion_variant);
            max_recursion = std::max(max_recursion, std::max(r1, r2));
        }
        csv << st.t << ',' << h1 << ',' << drift << ',' << r1 << ',' << r2 << '\n';
    };

    SimResult result;
    std::string status = "ok";
    double last_t = 0.0;
    try {
        FieldState out = sim.evolve(std::move(s), o, monitor);
        last_t = out.t;
    } catch (const BlowUpError& e) {
        status = "blowup";
        last_t = e.last_valid_time;
    }
    if (status == "ok" && cfg.h1_rel_drift_tol && max_drift > *cfg.h1_rel_drift_tol)
        status = "tolerance-exceeded";
    if (status == "ok" && cfg.recursion_residual_tol && max_recursion > *cfg.recursion_residual_tol)
        status = "tolerance-exceeded";

    ordered_json sum;
    sum["status"] = status;
    sum["final_t"] = last_t;
    sum["h1_initial"] = h1_0;
    sum["max_h1_rel_drift"] = max_drift;
    if (cfg.recursion_variant) {
        sum["max_recursion_residual"] = max_recursion;
        sum["max_kernel_energy_fraction"] = max_kernel;
        if (max_kernel > 1e-10)
            sum["note"] = "nabla_c has a nontrivial symbol kernel on the torus; modes on it "
                          "were projected during inversion (max energy fraction shown). A "
                          "large recursion residual together with a large kernel fraction "
                          "indicates the formal inverse's torus obstruction, not an algebra "
                          "failure";
    }
    sum["exit_code"] = status == "ok" ? 0 : 1;
    result.csv = csv.str();
    result.summary = sum.dump(2);
    result.exit_code = status == "ok" ? 0 : 1;
    return result;
}

std::string report_schema_json() {
    ordered_json s;
    s["$schema"] = "http://json-schema.org/draft-07/schema#";
    s["title"] = "mave verification report";
    s["type"] = "object";
    ordered_json props;
    props["tool"] = {{"type", "string"}};
    props["version"] = {{"type", "string"}};
    props["generated_at"] = {{"type", "integer"},
                             {"description", "unix time; absent in deterministic mode"}};
    props["seed"] = {{"type", "integer"}};
    props["samples"] = {{"type", "integer"}};
    props["cases"] = {{"type", "array"}, {"items", {{"type", "string"}}}};
    props["break_integrability"] = {{"type", "boolean"}};
    props["tri"] = {{"type", "boolean"}};
    props["coefficient_vectors"] = {{"type", "array"}, {"items", {{"type", "string"}}}};
    {
        ordered_json check;
        check["type"] = "object";
        ordered_json cp;
        cp["module"] = {{"type", "string"}};
        cp["check"] = {{"type", "string"}};
        cp["case"] = {{"type", "string"}};
        cp["variant"] = {{"type", "string"}};
        cp["sample"] = {{"type", "integer"}};
        cp["status"] = {{"enum", {"PASS", "FAIL", "UNSUPPORTED", "INCONCLUSIVE",
                                  "ASSUMED-PER-PAPER"}}};
        cp["coeffs"] = {{"type", "string"}};
        cp["mu"] = {{"type", "string"}, {"description", "exact rational, p or p/q"}};
        cp["expected_c9"] = {{"type", "string"}};
        cp["details"] = {{"type", "string"}};
        check["properties"] = std::move(cp);
        check["required"] = {"module", "check", "case", "status"};
        props["checks"] = {{"type", "array"}, {"items", std::move(check)}};
    }
    {
        ordered_json sp;
        sp["pass"] = {{"type", "integer"}};
        sp["fail"] = {{"type", "integer"}};
        sp["unsupported"] = {{"type", "integer"}};
        sp["inconclusive"] = {{"type", "integer"}};
        sp["assumed_per_paper"] = {{"type", "integer"}};
        props["summary"] = {{"type", "object"}, {"properties", std::move(sp)}};
    }
    props["exit_code"] = {{"type", "integer"}};
    s["properties"] = std::move(props);
    s["required"] = {"tool", "version", "seed", "checks", "summary", "exit_code"};
    return s.dump(2);
}

} // namespace mave
