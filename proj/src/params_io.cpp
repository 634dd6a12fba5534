#include "dtcae/params_io.hpp"

#include <fstream>
#include <sstream>

#include "dtcae/errors.hpp"
#include "json.hpp"

namespace dtcae {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j, const char* name) {
  try {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("params: bad matrix '") + name + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::string params_to_json(const ModelParams& p) {
  json wt = json::array();
  for (const auto& b : p.Wt) wt.push_back(matrix_json(b.W));
  json ut = json::array();
  for (const auto& u : p.Ut) ut.push_back(matrix_json(u));
  json j = {{"alpha", p.alpha},        {"Wa", matrix_json(p.Wa.W)}, {"W0", matrix_json(p.W0.W)},
            {"Wt", std::move(wt)},     {"Ua", matrix_json(p.Ua)},   {"U0", matrix_json(p.U0)},
            {"Ut", std::move(ut)},     {"Theta", matrix_json(p.Theta)}};
  return j.dump() + "\n";
}

ModelParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("params: ") + e.what());
  }
  ModelParams p;
  try {
    p.alpha = j.at("alpha").get<std::size_t>();
    p.Wa.W = matrix_from(j.at("Wa"), "Wa");
    p.W0.W = matrix_from(j.at("W0"), "W0");
    for (const auto& w : j.at("Wt")) p.Wt.push_back(BranchParams{matrix_from(w, "Wt")});
    p.Ua = matrix_from(j.at("Ua"), "Ua");
    p.U0 = matrix_from(j.at("U0"), "U0");
    for (const auto& u : j.at("Ut")) p.Ut.push_back(matrix_from(u, "Ut"));
    p.Theta = matrix_from(j.at("Theta"), "Theta");
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("params: ") + e.what());
  }
  if (p.Wt.size() != p.Ut.size() || p.Wt.size() < 2) fail(ErrorKind::Schema, "params: Wt/Ut counts disagree");
  const std::size_t rows = p.Wa.W.rows();
  bool ok = p.W0.W.rows() == rows && p.Ua.rows() == p.Wa.filters() && p.U0.rows() == p.W0.filters() &&
            p.Theta.cols() == p.Wa.filters() && p.alpha >= 1 && rows % p.alpha == 0;
  for (std::size_t t = 0; t < p.Wt.size(); ++t) {
    ok = ok && p.Wt[t].W.rows() == rows && p.Ut[t].rows() == p.Wt[t].filters() && p.Ut[t].cols() == p.Ua.cols();
  }
  ok = ok && p.U0.cols() == p.Ua.cols();
  if (!ok) fail(ErrorKind::Schema, "params: matrix shapes are inconsistent");
  return p;
}

void save_params(const ModelParams& params, const std::filesystem::path& path) {
  write_text(path, params_to_json(params));
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open params " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str());
}

std::string report_to_json(const TrainReport& report) {
  json trace = json::array();
  for (const auto& o : report.objectiveTrace) {
    trace.push_back({{"total", o.total},
                     {"label", o.lossLabeled},
                     {"attr", o.lossAttr},
                     {"match", o.lossDomainMatch},
                     {"neighbor", o.lossNeighbor}});
  }
  json j = {{"trace", std::move(trace)}, {"iterations", report.iterations}, {"converged", report.converged}};
  return j.dump(2) + "\n";
}

void save_report(const TrainReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json(report));
}

}  // namespace dtcae
