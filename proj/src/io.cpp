#include "dilation/io.hpp"

#include "dilation/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dilation::io {

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw PreconditionError("bad_matrix_json", "matrix needs rows, cols and data");
  }
  const auto rows = j.at("rows").get<long long>();
  const auto cols = j.at("cols").get<long long>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw PreconditionError("bad_matrix_json", "data must hold rows*cols entries");
  }
  ComplexMatrix m(rows, cols);
  for (long long k = 0; k < rows * cols; ++k) {
    const auto& e = data[static_cast<std::size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw PreconditionError("bad_matrix_json", "entries must be [re, im] pairs");
    }
    m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  require_finite(m, "matrix JSON");
  return m;
}

json index_to_json(const IndexElement& e) {
  json coords = json::object();
  for (const auto& [j, v] : e.support()) coords[std::to_string(j)] = format_rational(v);
  return {{"omega", e.omega_size()}, {"coords", std::move(coords)}};
}

IndexElement index_from_json(const json& j) {
  if (!j.is_object() || !j.contains("omega") || !j.contains("coords")) {
    throw PreconditionError("bad_index_json", "index element needs omega and coords");
  }
  IndexElement e(j.at("omega").get<std::size_t>());
  for (const auto& [key, value] : j.at("coords").items()) {
    std::size_t pos = 0;
    const unsigned long coord = std::stoul(key, &pos);
    if (pos != key.size()) throw PreconditionError("bad_index_json", "bad coordinate " + key);
    e.set(coord, parse_rational(value.get<std::string>()));
  }
  return e;
}

json bundle_to_json(const ando::DilationBundle& b) {
  json dec = json::array();
  for (const auto& blk : b.decomposition.blocks()) dec.push_back({{"name", blk.name}, {"dim", blk.dim}});
  json ops = json::object();
  for (const auto& [name, m] : b.operators) ops[name] = matrix_to_json(m);
  json grid = json::array();
  for (const auto& p : b.grid) grid.push_back({p.s, p.t});
  return {{"kind", ando::to_string(b.kind)},
          {"depth", b.depth},
          {"decomposition", std::move(dec)},
          {"operators", std::move(ops)},
          {"residuals", b.residuals},
          {"grid", std::move(grid)}};
}

ando::DilationBundle bundle_from_json(const json& j) {
  ando::DilationBundle b;
  b.kind = ando::bundle_kind_from_string(j.at("kind").get<std::string>());
  b.depth = j.at("depth").get<int>();
  std::vector<SpaceDecomposition::Block> blocks;
  for (const auto& blk : j.at("decomposition")) {
    blocks.push_back({blk.at("name").get<std::string>(), blk.at("dim").get<Index>()});
  }
  b.decomposition = SpaceDecomposition(std::move(blocks));
  for (const auto& [name, m] : j.at("operators").items()) b.operators[name] = matrix_from_json(m);
  if (j.contains("residuals")) b.residuals = j.at("residuals").get<std::map<std::string, double>>();
  if (j.contains("grid")) {
    for (const auto& p : j.at("grid")) b.grid.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return b;
}

json block_report_to_json(const ando::BlockReport& r) {
  return {{"residuals", r.residuals}, {"dims", r.dims}, {"pass", r.pass()}};
}

json naimark_to_json(const regular::NaimarkBundle& b) {
  json box = json::array();
  for (const auto& p : b.box) box.push_back(index_to_json(p));
  json rep = json::array();
  for (const auto& p : b.representable) rep.push_back(index_to_json(p));
  json shifts = json::array();
  for (const auto& u : b.shifts) shifts.push_back(matrix_to_json(u));
  return {{"box", std::move(box)},
          {"gram", matrix_to_json(b.gram)},
          {"factor", matrix_to_json(b.factor)},
          {"shifts", std::move(shifts)},
          {"seed", b.seed},
          {"restricted", b.restricted},
          {"representable", std::move(rep)},
          {"residuals", b.residuals}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("io_error", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw PreconditionError("bad_json", path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("io_error", "cannot write " + path);
  out << text;
}

}  // namespace dilation::io
