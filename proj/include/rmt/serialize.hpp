#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "rmt/deterministic.hpp"
#include "rmt/equilibrium.hpp"
#include "rmt/model.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/stats.hpp"

namespace rmt {

using Json = nlohmann::json;

// ModelSpec <-> {N, n, d, dtilde, A_re, A_im, dist:{kind, params}},
// matrices row-major.
Json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const Json& j);

Json dist_to_json(const EntryDistribution& dist);
EntryDistribution dist_from_json(const Json& j);

Json solution_to_json(const EquilibriumSolution& sol);
Json report_to_json(const FluctuationReport& report);
Json verdict_to_json(const NormalityVerdict& verdict);
Json mc_summary_to_json(const MCResult& result);

// Fixed column order {rho, V, gamma, gamma_tilde, Delta, Delta_under,
// theta, bias}; bias column empty when absent.
std::string report_csv_header();
std::string report_csv_row(const FluctuationReport& report);

// One row per replicate: index, I_n, standardized (mean-centered) value.
std::string mc_csv(const MCResult& result);
std::string qq_csv(const std::vector<std::pair<double, double>>& points);

// Double formatting used everywhere ("%.17g"): re-running a scenario
// reproduces byte-identical files.
std::string format_double(double v);

// Row-major (re, im) double pairs; dimensions are not stored, callers
// keep them in the accompanying JSON.
void write_matrix_binary(const std::string& path, const MatrixC& m);
MatrixC read_matrix_binary(const std::string& path, int rows, int cols);

}  // namespace rmt
