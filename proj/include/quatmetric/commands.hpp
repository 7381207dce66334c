#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "dynamics.hpp"
#include "invariants.hpp"
#include "json_io.hpp"
#include "metric.hpp"
#include "spectral.hpp"

namespace quatmetric::cli {

enum ExitCode : int { kSuccess = 0, kInvariantFailure = 1, kInputError = 2, kPhysicsFlag = 3 };

/// Options shared by the subcommands.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    bool allow_indefinite = false;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(const EvolutionTrajectory& tr, std::ostream& csv) {
    csv << "t,ReF,ImF,ReG,ImG,P,P_eta,unitarity_residual,eta_unitarity_residual\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double row[] = {tr.times[k],          tr.ck.F[k].real(), tr.ck.F[k].imag(),
                              tr.ck.G[k].real(),    tr.ck.G[k].imag(), tr.p_standard[k],
                              tr.p_eta[k],          tr.unitarity_residual[k], tr.eta_unitarity_residual[k]};
        for (std::size_t c = 0; c < std::size(row); ++c) csv << (c ? "," : "") << format_double(row[c]);
        csv << '\n';
    }
}

/// Trajectory CSV plus JSON summary. Throws ConfigInvalid on bad input.
inline int simulate(const json& config, const RunManifest& m, std::ostream& csv, std::ostream& summary,
                    std::ostream& err) {
    const ModelConfig cfg = model_config_from_json(config);
    if (!cfg.metric_positive() && !m.allow_indefinite) {
        err << "metric is not positive definite (|z| >= a); pass --allow-indefinite to run anyway\n";
        return kPhysicsFlag;
    }
    const EvolutionTrajectory tr = evolve(cfg);
    write_trajectory_csv(tr, csv);
    double mu = 0, me = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        mu = std::max(mu, tr.unitarity_residual[k]);
        me = std::max(me, tr.eta_unitarity_residual[k]);
    }
    const json out = {{"max_unitarity_residual", mu},
                      {"max_eta_unitarity_residual", me},
                      {"final_P", tr.p_standard.back()},
                      {"final_P_eta", tr.p_eta.back()},
                      {"eta_positive", cfg.metric_positive()},
                      // P_eta is the raw |<-|eta U|+>|^2 and may exceed 1 once |z| >= 1.
                      {"z_modulus_ge_one", std::abs(cfg.metric_z) >= 1.0}};
    summary << out.dump(2) << '\n';
    return kSuccess;
}

inline int spectrum(const json& input, std::ostream& out) {
    const QMatrix h = qmatrix_from_json(input);
    if (!h.square()) throw ConfigInvalid("matrix: spectrum needs a square matrix");
    const RightSpectrum sp = right_eigen(h);
    json ev = json::array();
    for (const auto& l : sp.eigenvalues) ev.push_back(to_json(l));
    const json res = {{"eigenvalues", ev},
                      {"moduli", eigenvalue_moduli(sp)},
                      {"diagonalizable", sp.diagonalizable},
                      {"imaginary", is_imaginary_spectrum(sp, kImaginarySpectrumTol)}};
    out << res.dump(2) << '\n';
    return kSuccess;
}

inline int metric(const json& input, const RunManifest& m, std::ostream& out) {
    const MatrixFamily fam = matrix_family_from_json(input);
    const std::size_t n = fam.dim;
    json res;
    res["field"] = fam.field == Field::Complex ? "complex" : "quaternion";

    std::optional<QMatrix> eta;
    bool qah = true;
    if (fam.matrices.size() == 1 && fam.field == Field::Quaternion) {
        try {
            eta = build_metric(fam.matrices.front()).eta;
            eta = *eta * (1.0 / frobenius_norm(*eta));
        } catch (const NotQuasiAntiHermitian& e) {
            qah = false;
            res["reason"] = to_string(e.reason);
        }
    }
    const auto space = metric_solution_space(fam.matrices, n, fam.field, m.seed);
    if (qah && !eta && space.positive_element) eta = space.positive_element;
    if (!eta) qah = false;
    const auto comm = commutant(fam.matrices, n, fam.field);

    res["quasianti_hermitian"] = qah;
    res["solution_space_dim"] = space.dim;
    res["positive_span_dim"] = space.positive_span_dim;
    res["commutant_dim"] = comm.full_dim;
    res["hermitian_commutant_dim"] = comm.hermitian_dim;
    res["irreducible"] = comm.hermitian_dim == 1;
    if (eta) {
        double r = 0;
        for (const auto& h : fam.matrices) r = std::max(r, verify_pseudo_antihermitian(*eta, h));
        res["residual"] = r;
        res["eta"] = to_json(*eta);
        res["positive"] = make_metric(*eta).positive;
    } else {
        res["residual"] = nullptr;
        res["eta"] = nullptr;
        res["positive"] = false;
    }
    out << res.dump(2) << '\n';
    return kSuccess;
}

inline int verify(const RunManifest& m, std::ostream& out, unsigned threads = thread_budget()) {
    const auto results = run_invariants(m.seed, m.tol, threads);
    json list = json::array();
    std::size_t failed = 0;
    for (const auto& r : results) {
        list.push_back({{"name", r.name}, {"residual", r.residual}, {"tolerance", r.tolerance}, {"pass", r.pass}});
        failed += !r.pass;
    }
    json res = {{"seed", m.seed},
                {"tolerance_override", m.tol ? json(*m.tol) : json(nullptr)},
                {"invariants", list},
                {"passed", results.size() - failed},
                {"failed", failed}};
    out << res.dump(2) << '\n';
    return failed ? kInvariantFailure : kSuccess;
}

}  // namespace quatmetric::cli
