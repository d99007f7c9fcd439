#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/checks.hpp"
#include "dyadic/corona.hpp"
#include "dyadic/model.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/verify.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

// Shortest decimal form that round-trips a double.
std::string format_double(double x);

void to_json(nlohmann::json& j, const ShiftSpec& spec);
void from_json(const nlohmann::json& j, ShiftSpec& spec);

void to_json(nlohmann::json& j, const WeightSpec& spec);
void from_json(const nlohmann::json& j, WeightSpec& spec);

void to_json(nlohmann::json& j, const PowerIterationOptions& opts);
void from_json(const nlohmann::json& j, PowerIterationOptions& opts);

void to_json(nlohmann::json& j, const SweepConfig& config);
void from_json(const nlohmann::json& j, SweepConfig& config);

void to_json(nlohmann::json& j, const CheckContext& ctx);
void from_json(const nlohmann::json& j, CheckContext& ctx);

void to_json(nlohmann::json& j, const CheckResult& result);
void to_json(nlohmann::json& j, const SlopeFit& fit);
void to_json(nlohmann::json& j, const BilinearReport& report);
void to_json(nlohmann::json& j, const CubeId& q);
void to_json(nlohmann::json& j, const NormResult& r);

nlohmann::json step_function_to_json(const StepFunction& f);
StepFunction step_function_from_json(const nlohmann::json& j);

nlohmann::json weight_to_json(const Weight& w);
Weight weight_from_json(const nlohmann::json& j);

nlohmann::json a2_report_to_json(const A2Report& report);

nlohmann::json forest_to_json(const StoppingForest& forest);

// Exact header "param,a2,norm,kappa,d,N,shift_id,seed,residual"; numbers in
// round-trip precision, so equal rows serialize to identical bytes.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// uint32 row and column counts, then row-major binary doubles.
void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& in);

}  // namespace dyadic
