#include "dyadic/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dyadic {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void to_json(nlohmann::json& j, const ShiftSpec& spec) {
  j = nlohmann::json{{"type", spec.type},     {"m", spec.m},
                     {"n", spec.n},           {"residue", spec.residue},
                     {"seed", spec.seed},     {"signs", spec.signs},
                     {"sign_value", spec.sign_value}};
}

void from_json(const nlohmann::json& j, ShiftSpec& spec) {
  spec = ShiftSpec{};
  j.at("type").get_to(spec.type);
  if (j.contains("m")) j.at("m").get_to(spec.m);
  if (j.contains("n")) j.at("n").get_to(spec.n);
  if (j.contains("residue")) j.at("residue").get_to(spec.residue);
  if (j.contains("seed")) j.at("seed").get_to(spec.seed);
  if (j.contains("signs")) j.at("signs").get_to(spec.signs);
  if (j.contains("sign_value")) j.at("sign_value").get_to(spec.sign_value);
}

void to_json(nlohmann::json& j, const WeightSpec& spec) {
  j = nlohmann::json{
      {"family", spec.family}, {"param", spec.param}, {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, WeightSpec& spec) {
  spec = WeightSpec{};
  j.at("family").get_to(spec.family);
  if (j.contains("param")) j.at("param").get_to(spec.param);
  if (j.contains("seed")) j.at("seed").get_to(spec.seed);
}

void to_json(nlohmann::json& j, const PowerIterationOptions& opts) {
  j = nlohmann::json{{"tolerance", opts.tolerance},
                     {"max_iterations", opts.max_iterations},
                     {"seed", opts.seed}};
}

void from_json(const nlohmann::json& j, PowerIterationOptions& opts) {
  opts = PowerIterationOptions{};
  if (j.contains("tolerance")) j.at("tolerance").get_to(opts.tolerance);
  if (j.contains("max_iterations"))
    j.at("max_iterations").get_to(opts.max_iterations);
  if (j.contains("seed")) j.at("seed").get_to(opts.seed);
}

void to_json(nlohmann::json& j, const SweepConfig& config) {
  j = nlohmann::json{{"dimension", config.dimension},
                     {"depth", config.depth},
                     {"shift", config.shift},
                     {"weights", config.weights},
                     {"jobs", config.jobs},
                     {"power", config.power}};
}

void from_json(const nlohmann::json& j, SweepConfig& config) {
  config = SweepConfig{};
  if (j.contains("dimension")) j.at("dimension").get_to(config.dimension);
  if (j.contains("depth")) j.at("depth").get_to(config.depth);
  j.at("shift").get_to(config.shift);
  j.at("weights").get_to(config.weights);
  if (j.contains("jobs")) j.at("jobs").get_to(config.jobs);
  if (j.contains("power")) j.at("power").get_to(config.power);
}

void to_json(nlohmann::json& j, const CheckContext& ctx) {
  j = nlohmann::json{{"dimension", ctx.dimension},
                     {"depth", ctx.depth},
                     {"seed", ctx.seed},
                     {"instances", ctx.instances},
                     {"threshold", ctx.threshold},
                     {"baseline", ctx.baseline_path},
                     {"power", ctx.power}};
}

void from_json(const nlohmann::json& j, CheckContext& ctx) {
  ctx = CheckContext{};
  if (j.contains("dimension")) j.at("dimension").get_to(ctx.dimension);
  if (j.contains("depth")) j.at("depth").get_to(ctx.depth);
  if (j.contains("seed")) j.at("seed").get_to(ctx.seed);
  if (j.contains("instances")) j.at("instances").get_to(ctx.instances);
  if (j.contains("threshold")) j.at("threshold").get_to(ctx.threshold);
  if (j.contains("baseline")) j.at("baseline").get_to(ctx.baseline_path);
  if (j.contains("power")) j.at("power").get_to(ctx.power);
}

void to_json(nlohmann::json& j, const CheckResult& result) {
  j = nlohmann::json{{"name", result.name},
                     {"passed", result.passed},
                     {"statistic", result.statistic},
                     {"bound", result.bound},
                     {"detail", result.detail}};
}

void to_json(nlohmann::json& j, const SlopeFit& fit) {
  j = nlohmann::json{{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"r2", fit.r2},
                     {"count", fit.count}};
}

void to_json(nlohmann::json& j, const BilinearReport& report) {
  j = nlohmann::json{{"total", report.total},
                     {"u", report.u},
                     {"v", report.v},
                     {"vstar", report.vstar},
                     {"w", report.w_part},
                     {"vtilde", report.vtilde},
                     {"recombined", report.recombined},
                     {"gap", report.gap}};
}

void to_json(nlohmann::json& j, const CubeId& q) {
  j = nlohmann::json{{"generation", q.generation},
                     {"position", {q.position[0], q.position[1], q.position[2]}}};
}

void to_json(nlohmann::json& j, const NormResult& r) {
  j = nlohmann::json{{"value", r.value},
                     {"iterations", r.iterations},
                     {"residual", r.residual}};
}

nlohmann::json step_function_to_json(const StepFunction& f) {
  return nlohmann::json{{"dimension", f.model().dimension()},
                        {"depth", f.model().depth()},
                        {"values", f.values()}};
}

StepFunction step_function_from_json(const nlohmann::json& j) {
  const FiniteModel model(j.at("dimension").get<int>(),
                          j.at("depth").get<int>());
  return StepFunction(model, j.at("values").get<std::vector<double>>());
}

nlohmann::json weight_to_json(const Weight& w) {
  return nlohmann::json{{"dimension", w.model().dimension()},
                        {"depth", w.model().depth()},
                        {"values", w.density().values()}};
}

Weight weight_from_json(const nlohmann::json& j) {
  return Weight::from_density(step_function_from_json(j));
}

nlohmann::json a2_report_to_json(const A2Report& report) {
  return nlohmann::json{{"constant", report.constant},
                        {"argmax", report.argmax}};
}

nlohmann::json forest_to_json(const StoppingForest& forest) {
  nlohmann::json cubes = nlohmann::json::array();
  for (std::size_t i = 0; i < forest.stopping.size(); ++i) {
    nlohmann::json entry = forest.stopping[i];
    entry["rho"] = forest.rho[i];
    entry["parent"] = forest.parent[i];
    cubes.push_back(std::move(entry));
  }
  return nlohmann::json{{"step", forest.step},
                        {"residue", forest.residue},
                        {"threshold", forest.threshold},
                        {"energy", forest.energy},
                        {"count", forest.stopping.size()},
                        {"stopping", std::move(cubes)}};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "param,a2,norm,kappa,d,N,shift_id,seed,residual\n";
  for (const auto& r : rows) {
    out << format_double(r.param) << ',' << format_double(r.a2) << ','
        << format_double(r.norm) << ',' << r.kappa << ',' << r.dimension << ','
        << r.depth << ',' << r.shift_id << ',' << r.seed << ','
        << format_double(r.residual) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("read_sweep_csv: empty input");
  if (line != "param,a2,norm,kappa,d,N,shift_id,seed,residual")
    throw std::invalid_argument("read_sweep_csv: unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw std::invalid_argument("read_sweep_csv: malformed row: " + line);
    SweepRow row;
    row.param = std::strtod(cells[0].c_str(), nullptr);
    row.a2 = std::strtod(cells[1].c_str(), nullptr);
    row.norm = std::strtod(cells[2].c_str(), nullptr);
    row.kappa = std::stoi(cells[3]);
    row.dimension = std::stoi(cells[4]);
    row.depth = std::stoi(cells[5]);
    row.shift_id = cells[6];
    row.seed = std::strtoull(cells[7].c_str(), nullptr, 10);
    row.residual = std::strtod(cells[8].c_str(), nullptr);
    if (!(row.norm == row.norm)) row.error = "nan";
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows);
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.a.data()),
            static_cast<std::streamsize>(m.a.size() * sizeof(double)));
}

DenseMatrix read_matrix(std::istream& in) {
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in) throw std::invalid_argument("read_matrix: truncated header");
  DenseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.a.resize(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(m.a.data()),
          static_cast<std::streamsize>(m.a.size() * sizeof(double)));
  if (!in) throw std::invalid_argument("read_matrix: truncated payload");
  return m;
}

}  // namespace dyadic
