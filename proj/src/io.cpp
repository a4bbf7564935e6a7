#include "udbound/io.hpp"

#include <fstream>
#include <sstream>

namespace udbound::io {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw Error(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw Error(where + ": expected a number");
  return j.get<double>();
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(where + ": expected a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(where + ": row " + std::to_string(r) + " is not of length " + std::to_string(n));
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& e = row[c];
      const std::string at = where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(number(e[0], at), number(e[1], at));
      } else {
        throw Error(at + ": expected [re, im]");
      }
    }
  }
  return m;
}

Json to_json(const DimVector& dims) { return dims.values(); }

DimVector dims_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(where + ": expected a nonempty integer array");
  std::vector<int> d;
  for (const Json& v : j) {
    if (!v.is_number_integer()) throw Error(where + ": expected integers");
    d.push_back(v.get<int>());
  }
  try {
    return DimVector(std::move(d));
  } catch (const Error& err) {
    throw Error(where + ": " + err.what());
  }
}

Json to_json(const HermitianOperator& op) { return to_json(op.matrix()); }

HermitianOperator operator_from_json(const Json& j, const DimVector& dims, const std::string& where) {
  Matrix m = matrix_from_json(j, where);
  try {
    return HermitianOperator(std::move(m), dims);
  } catch (const Error& err) {
    throw Error(where + ": " + err.what());
  }
}

Json to_json(const Ensemble& e) {
  Json states = Json::array();
  for (const auto& it : e.items) states.push_back({{"prior", it.prior}, {"matrix", to_json(it.state)}});
  return {{"dims", to_json(e.dims)}, {"states", std::move(states)}};
}

Ensemble ensemble_from_json(const Json& j) {
  Ensemble e;
  e.dims = dims_from_json(field(j, "dims", "ensemble"), "dims");
  const Json& states = field(j, "states", "ensemble");
  if (!states.is_array()) throw Error("states: expected an array");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string where = "states[" + std::to_string(i) + "]";
    const double prior = number(field(states[i], "prior", where), where + ".prior");
    e.items.push_back({prior, operator_from_json(field(states[i], "matrix", where), e.dims, where + ".matrix")});
  }
  const ValidationReport r = validate_ensemble(e);
  if (!r.ok()) throw Error("invalid ensemble: " + r.str());
  return e;
}

namespace {

Json protocol_to_json(const LoccProtocol& p) {
  Json sites = Json::array();
  for (const auto& povm : p.local_povms) {
    Json elems = Json::array();
    for (const auto& el : povm) elems.push_back(to_json(el));
    sites.push_back(std::move(elems));
  }
  return {{"description", p.description}, {"local_povms", std::move(sites)}, {"assignment", p.assignment}};
}

LoccProtocol protocol_from_json(const Json& j, const DimVector& dims) {
  LoccProtocol p;
  const Json& desc = field(j, "description", "locc_protocol");
  if (!desc.is_string()) throw Error("locc_protocol.description: expected a string");
  p.description = desc.get<std::string>();
  const Json& sites = field(j, "local_povms", "locc_protocol");
  if (!sites.is_array() || sites.size() != dims.sites())
    throw Error("locc_protocol.local_povms: expected one POVM per site");
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const DimVector site = DimVector::single(dims[s]);
    std::vector<HermitianOperator> povm;
    for (std::size_t k = 0; k < sites[s].size(); ++k)
      povm.push_back(operator_from_json(sites[s][k], site,
                                        "locc_protocol.local_povms[" + std::to_string(s) + "][" + std::to_string(k) + "]"));
    p.local_povms.push_back(std::move(povm));
  }
  const Json& assign = field(j, "assignment", "locc_protocol");
  if (!assign.is_array()) throw Error("locc_protocol.assignment: expected an integer array");
  for (const Json& a : assign) {
    if (!a.is_number_integer()) throw Error("locc_protocol.assignment: expected integers");
    p.assignment.push_back(a.get<int>());
  }
  return p;
}

}  // namespace

Json to_json(const Measurement& m) {
  Json elements = Json::array();
  for (std::size_t i = 0; i < m.elements.size(); ++i) {
    Json el = {{"matrix", to_json(m.elements[i])}};
    if (i < m.decompositions.size() && m.decompositions[i]) {
      Json terms = Json::array();
      for (const auto& t : m.decompositions[i]->terms) {
        Json factors = Json::array();
        for (const auto& f : t.factors) factors.push_back(to_json(f));
        terms.push_back(std::move(factors));
      }
      el["decomposition"] = std::move(terms);
    }
    elements.push_back(std::move(el));
  }
  Json out = {{"dims", to_json(m.dims)}, {"elements", std::move(elements)}};
  if (m.locc_protocol) out["locc_protocol"] = protocol_to_json(*m.locc_protocol);
  return out;
}

Measurement measurement_from_json(const Json& j) {
  Measurement m;
  m.dims = dims_from_json(field(j, "dims", "measurement"), "dims");
  const Json& elements = field(j, "elements", "measurement");
  if (!elements.is_array() || elements.empty()) throw Error("elements: expected a nonempty array");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string where = "elements[" + std::to_string(i) + "]";
    m.elements.push_back(operator_from_json(field(elements[i], "matrix", where), m.dims, where + ".matrix"));
    if (elements[i].contains("decomposition")) {
      const Json& terms = elements[i]["decomposition"];
      if (!terms.is_array()) throw Error(where + ".decomposition: expected an array of terms");
      SeparableDecomposition dec;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tw = where + ".decomposition[" + std::to_string(t) + "]";
        if (!terms[t].is_array() || terms[t].size() != m.dims.sites())
          throw Error(tw + ": expected one factor per site");
        ProductTerm term;
        for (std::size_t s = 0; s < terms[t].size(); ++s)
          term.factors.push_back(
              operator_from_json(terms[t][s], DimVector::single(m.dims[s]), tw + "[" + std::to_string(s) + "]"));
        dec.terms.push_back(std::move(term));
      }
      m.decompositions.emplace_back(std::move(dec));
    } else {
      m.decompositions.emplace_back(std::nullopt);
    }
  }
  if (j.contains("locc_protocol")) m.locc_protocol = protocol_from_json(j["locc_protocol"], m.dims);
  return m;
}

Json certificate_to_json(const HermitianOperator& op, const std::string& kind) {
  return {{"kind", kind}, {"dims", to_json(op.dims())}, {"matrix", to_json(op)}};
}

HermitianOperator certificate_from_json(const Json& j) {
  const DimVector dims = dims_from_json(field(j, "dims", "certificate"), "dims");
  return operator_from_json(field(j, "matrix", "certificate"), dims, "matrix");
}

Json to_json(const DimVector& dims, const std::vector<ConeGenerators>& cones) {
  Json list = Json::array();
  for (const auto& cone : cones) {
    Json gens = Json::array();
    for (std::size_t g = 0; g < cone.generators.size(); ++g) {
      Json gj = {{"matrix", to_json(cone.generators[g])}};
      if (g < cone.product_form.size() && cone.product_form[g]) {
        Json factors = Json::array();
        for (const auto& f : *cone.product_form[g]) factors.push_back(to_json(f));
        gj["factors"] = std::move(factors);
      }
      gens.push_back(std::move(gj));
    }
    list.push_back({{"generators", std::move(gens)}});
  }
  return {{"dims", to_json(dims)}, {"cones", std::move(list)}};
}

std::vector<ConeGenerators> cones_from_json(const Json& j) {
  const DimVector dims = dims_from_json(field(j, "dims", "cones file"), "dims");
  const Json& list = field(j, "cones", "cones file");
  if (!list.is_array()) throw Error("cones: expected an array");
  std::vector<ConeGenerators> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "cones[" + std::to_string(i) + "]";
    const Json& gens = field(list[i], "generators", where);
    if (!gens.is_array()) throw Error(where + ".generators: expected an array");
    ConeGenerators cone;
    cone.dims = dims;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const std::string gw = where + ".generators[" + std::to_string(g) + "]";
      HermitianOperator gen = operator_from_json(field(gens[g], "matrix", gw), dims, gw + ".matrix");
      if (gens[g].contains("factors")) {
        const Json& fs = gens[g]["factors"];
        if (!fs.is_array() || fs.size() != dims.sites()) throw Error(gw + ".factors: expected one factor per site");
        std::vector<HermitianOperator> factors;
        for (std::size_t s = 0; s < fs.size(); ++s)
          factors.push_back(operator_from_json(fs[s], DimVector::single(dims[s]), gw + ".factors"));
        cone.generators.push_back(std::move(gen));
        cone.product_form.emplace_back(std::move(factors));
      } else {
        cone.add(std::move(gen));
      }
    }
    const ValidationReport r = validate_cone(cone, 1e-9);
    if (!r.ok()) throw Error(where + ": " + r.str());
    out.push_back(std::move(cone));
  }
  return out;
}

Json to_json(const SolveReport& r, const std::string& kind) {
  Json never = Json::array();
  for (std::size_t i : r.never_identified) never.push_back(i);
  return {{"kind", kind},
          {"status", to_string(r.status)},
          {"value", r.value},
          {"iterations", r.iterations},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"residuals", {{"primal", r.residuals.primal}, {"dual", r.residuals.dual}, {"gap", r.residuals.gap}}},
          {"never_identified", std::move(never)},
          {"certificate", certificate_to_json(r.certificate, kind == "global" ? "K" : "H")},
          {"measurement", to_json(r.measurement)}};
}

Json to_json(const VerificationReport& r, const std::string& kind) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    Json cj = {{"id", c.id}, {"residual", c.residual}, {"passed", c.passed}};
    if (!c.note.empty()) cj["note"] = c.note;
    conds.push_back(std::move(cj));
  }
  Json out = {{"kind", kind},
              {"verdict", r.pass ? "pass" : "fail"},
              {"tolerance", r.tolerance},
              {"conditions", std::move(conds)},
              {"failing", r.failing_ids()},
              {"notes", r.notes}};
  out["value"] = r.value ? Json(*r.value) : Json(nullptr);
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& err) {
    throw Error(path.string() + ": " + err.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Ensemble load_ensemble(const std::filesystem::path& path) { return ensemble_from_json(read_json(path)); }

void save_ensemble(const Ensemble& e, const std::filesystem::path& path) { write_json(to_json(e), path); }

}  // namespace udbound::io
