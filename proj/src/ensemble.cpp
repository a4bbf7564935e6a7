#include "udbound/ensemble.hpp"

#include <cmath>
#include <sstream>

namespace udbound {

HermitianOperator Ensemble::weighted_state(std::size_t i) const {
  return items.at(i).state * items.at(i).prior;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << violations[k].message;
  }
  return os.str();
}

HermitianOperator ProductTerm::product() const { return tensor(factors); }

HermitianOperator SeparableDecomposition::reconstruct(const DimVector& dims) const {
  Matrix acc = Matrix::Zero(dims.total(), dims.total());
  for (const auto& t : terms) {
    const HermitianOperator p = t.product();
    if (!(p.dims() == dims)) throw Error("product term dims " + p.dims().str() + " do not match " + dims.str());
    acc += p.matrix();
  }
  return HermitianOperator(std::move(acc), dims);
}

std::size_t LoccProtocol::tuple_count() const {
  std::size_t n = 1;
  for (const auto& povm : local_povms) n *= povm.size();
  return n;
}

HermitianOperator LoccProtocol::compose(std::size_t outcome, const DimVector& dims) const {
  if (local_povms.size() != dims.sites()) throw Error("protocol site count does not match dims");
  if (assignment.size() != tuple_count()) throw Error("protocol assignment length does not match outcome tuples");
  Matrix acc = Matrix::Zero(dims.total(), dims.total());
  std::vector<HermitianOperator> factors(local_povms.size());
  for (std::size_t t = 0; t < assignment.size(); ++t) {
    if (assignment[t] != static_cast<int>(outcome)) continue;
    std::size_t rem = t;
    for (std::size_t s = local_povms.size(); s-- > 0;) {
      factors[s] = local_povms[s][rem % local_povms[s].size()];
      rem /= local_povms[s].size();
    }
    acc += tensor(factors).matrix();
  }
  return HermitianOperator(std::move(acc), dims);
}

HermitianOperator Measurement::completeness_defect() const {
  Matrix acc = -Matrix::Identity(dims.total(), dims.total());
  for (const auto& m : elements) acc += m.matrix();
  return HermitianOperator(std::move(acc), dims);
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_ensemble(const Ensemble& e) {
  ValidationReport r;
  if (e.items.empty()) r.violations.push_back({"ensemble has no states", 0.0});
  double sum = 0.0;
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    const auto& it = e.items[i];
    const std::string tag = "state " + std::to_string(i + 1) + ": ";
    sum += it.prior;
    if (!(it.prior > 0.0)) r.violations.push_back({tag + "prior not positive", it.prior});
    if (!(it.state.dims() == e.dims)) {
      r.violations.push_back({tag + "dims " + it.state.dims().str() + " differ from " + e.dims.str(), 0.0});
      continue;
    }
    const double lo = min_eigenvalue(it.state);
    if (lo < -tolerance::kPsd) r.violations.push_back({tag + "not PSD (min eigenvalue " + num(lo) + ")", -lo});
    const double tr = it.state.trace();
    if (std::abs(tr - 1.0) > tolerance::kPsd)
      r.violations.push_back({tag + "trace " + num(tr), std::abs(tr - 1.0)});
  }
  if (std::abs(sum - 1.0) > 1e-10) r.violations.push_back({"priors sum " + num(sum), std::abs(sum - 1.0)});
  return r;
}

ValidationReport validate_measurement(const Measurement& m, double tol) {
  ValidationReport r;
  for (std::size_t i = 0; i < m.elements.size(); ++i) {
    if (!(m.elements[i].dims() == m.dims)) {
      r.violations.push_back({"element " + std::to_string(i) + ": dims mismatch", 0.0});
      return r;
    }
    const double lo = min_eigenvalue(m.elements[i]);
    if (lo < -tol)
      r.violations.push_back({"element " + std::to_string(i) + ": not PSD (min eigenvalue " + num(lo) + ")", -lo});
  }
  const double defect = max_abs(m.completeness_defect().matrix());
  if (defect > tol) r.violations.push_back({"completeness defect " + num(defect), defect});
  return r;
}

ValidationReport validate_decompositions(const Measurement& m, double tol) {
  ValidationReport r;
  for (std::size_t i = 0; i < m.decompositions.size() && i < m.elements.size(); ++i) {
    if (!m.decompositions[i]) continue;
    const std::string tag = "element " + std::to_string(i) + ": ";
    bool shape_ok = true;
    for (const auto& term : m.decompositions[i]->terms) {
      if (term.factors.size() != m.dims.sites()) {
        r.violations.push_back({tag + "product term has wrong factor count", 0.0});
        shape_ok = false;
        break;
      }
      for (std::size_t k = 0; k < term.factors.size(); ++k) {
        if (term.factors[k].size() != m.dims[k]) {
          r.violations.push_back({tag + "factor side does not match site dimension", 0.0});
          shape_ok = false;
          break;
        }
        const double lo = min_eigenvalue(term.factors[k]);
        if (lo < -tol) r.violations.push_back({tag + "factor not PSD", -lo});
      }
      if (!shape_ok) break;
    }
    if (!shape_ok) continue;
    const double res = max_abs(m.decompositions[i]->reconstruct(m.dims).matrix() - m.elements[i].matrix());
    if (res > tol) r.violations.push_back({tag + "decomposition residual " + num(res), res});
  }
  return r;
}

namespace example1 {

StateVector nu(int sign) {
  Vector v(2);
  v << 0.5, (sign > 0 ? 1.0 : -1.0) * std::sqrt(3.0) / 2.0;
  return StateVector(v, DimVector{2}, false);
}

StateVector mu(int sign) {
  Vector v(2);
  v << std::sqrt(3.0) / 2.0, (sign > 0 ? 0.5 : -0.5);
  return StateVector(v, DimVector{2}, false);
}

StateVector phi(int i) {
  Vector v = Vector::Zero(4);
  const double r10 = std::sqrt(10.0);
  switch (i) {
    case 1:
      v << 3.0 / r10, 0.0, 0.0, -1.0 / r10;
      break;
    case 2:
      v << 0.0, std::sqrt(0.3), std::sqrt(0.3), 2.0 / r10;
      break;
    case 3:
      v << 0.0, std::sqrt(0.3), std::sqrt(0.3), -2.0 / r10;
      break;
    default:
      throw Error("phi index must be 1, 2 or 3");
  }
  return StateVector(v, DimVector{2, 2}, false);
}

StateVector bell_phi(int sign) {
  Vector v(4);
  const double s = 1.0 / std::sqrt(2.0);
  v << s, 0.0, 0.0, (sign > 0 ? s : -s);
  return StateVector(v, DimVector{2, 2}, false);
}

StateVector bell_psi(int sign) {
  Vector v(4);
  const double s = 1.0 / std::sqrt(2.0);
  v << 0.0, s, (sign > 0 ? s : -s), 0.0;
  return StateVector(v, DimVector{2, 2}, false);
}

}  // namespace example1

ExampleFixtures build_example1() {
  using namespace example1;
  const DimVector dims{2, 2};
  const StateVector zero = StateVector::basis(2, 0);
  const StateVector one = StateVector::basis(2, 1);

  ExampleFixtures f;
  f.ensemble.dims = dims;
  f.ensemble.items.push_back({1.0 / 3.0, tensor({zero.projector(), zero.projector()})});
  f.ensemble.items.push_back({1.0 / 3.0, tensor({nu(+1).projector(), nu(+1).projector()})});
  f.ensemble.items.push_back({1.0 / 3.0, tensor({nu(-1).projector(), nu(-1).projector()})});

  Measurement& g = f.global_measurement;
  g.dims = dims;
  g.elements.push_back(bell_phi(+1).projector() * 0.5 + bell_psi(-1).projector());
  for (int i = 1; i <= 3; ++i) g.elements.push_back(phi(i).projector() * (5.0 / 6.0));
  g.decompositions.assign(g.elements.size(), std::nullopt);

  f.K = (bell_phi(-1).projector() + bell_psi(+1).projector()) * (3.0 / 8.0);
  f.H = bell_psi(-1).projector() * 0.5;

  // local POVM {(2/3)|1><1|, (2/3)|mu+><mu+|, (2/3)|mu-><mu-|} on both qubits
  const std::vector<HermitianOperator> local = {one.projector() * (2.0 / 3.0), mu(+1).projector() * (2.0 / 3.0),
                                                mu(-1).projector() * (2.0 / 3.0)};
  // outcome labels: 0 -> |1>, 1 -> mu+, 2 -> mu-
  // (a,b) -> global outcome; tuple index 3a + b
  const std::vector<int> assignment = {
      0, 2, 3,  // (1,1) (1,mu+) (1,mu-)
      2, 0, 1,  // (mu+,1) (mu+,mu+) (mu+,mu-)
      3, 1, 0,  // (mu-,1) (mu-,mu+) (mu-,mu-)
  };

  Measurement& s = f.separable_measurement;
  s.dims = dims;
  s.locc_protocol = LoccProtocol{
      "same local measurement {(2/3)|1><1|, (2/3)|mu+><mu+|, (2/3)|mu-><mu-|} on two subsystems",
      {local, local},
      assignment};
  s.decompositions.assign(4, SeparableDecomposition{});
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      s.decompositions[assignment[3 * a + b]]->terms.push_back(ProductTerm{{local[a], local[b]}});
  for (std::size_t i = 0; i < 4; ++i) s.elements.push_back(s.decompositions[i]->reconstruct(dims));
  return f;
}

namespace example2 {

int total_dimension(int d) {
  long long t = 1;
  for (int k = 0; k < d - 1; ++k) {
    t *= d;
    if (t > (1LL << 30)) throw Error("dimension overflow");
  }
  return static_cast<int>(t);
}

double normalization(int d) { return static_cast<double>(total_dimension(d)) - 2.0 * (d - 1); }

namespace {
DimVector dims_for(int d) { return DimVector(std::vector<int>(d - 1, d)); }
}  // namespace

StateVector lambda(int d, int j) {
  if (j < 1 || j > d) throw Error("lambda index out of range");
  const std::vector<int> digits(d - 1, j - 1);
  return StateVector::basis(dims_for(d), digits);
}

StateVector omega(int d, int j) {
  if (j < 1 || j > d) throw Error("omega index out of range");
  const DimVector dims = dims_for(d);
  Vector v = Vector::Zero(dims.total());
  const int excluded = j - 1;
  for (int k = 0; k < d; ++k) {
    if (k == excluded) continue;
    std::vector<int> digits;
    for (int l = 0; l < d; ++l) {
      const int value = (k + l) % d;
      if (value != excluded) digits.push_back(value);
    }
    v(dims.index(digits)) += 1.0;
  }
  v /= std::sqrt(static_cast<double>(d - 1));
  return StateVector(std::move(v), dims, false);
}

}  // namespace example2

ExampleFixtures build_example2(int d, int dimension_cap) {
  if (d < 3) throw Error("d must be >= 3");
  const int total = example2::total_dimension(d);
  if (total > dimension_cap)
    throw Error("dimension " + std::to_string(total) + " exceeds cap " + std::to_string(dimension_cap));

  const DimVector dims(std::vector<int>(d - 1, d));
  const double norm = example2::normalization(d);
  const Matrix id = Matrix::Identity(total, total);

  std::vector<Matrix> lam(d), omg(d);
  for (int j = 1; j <= d; ++j) {
    lam[j - 1] = example2::lambda(d, j).projector().matrix();
    omg[j - 1] = example2::omega(d, j).projector().matrix();
  }

  ExampleFixtures f;
  f.ensemble.dims = dims;
  for (int i = 0; i < d; ++i) {
    Matrix rho = id;
    for (int j = 0; j < d; ++j)
      if (j != i) rho -= lam[j] + omg[j];
    f.ensemble.items.push_back({1.0 / d, HermitianOperator(rho / norm, dims)});
  }

  Matrix all = Matrix::Zero(total, total), all_lambda = Matrix::Zero(total, total);
  for (int j = 0; j < d; ++j) {
    all += lam[j] + omg[j];
    all_lambda += lam[j];
  }

  Measurement& g = f.global_measurement;
  g.dims = dims;
  g.elements.emplace_back(id - all, dims);
  for (int i = 0; i < d; ++i) g.elements.emplace_back(lam[i] + omg[i], dims);
  g.decompositions.assign(g.elements.size(), std::nullopt);

  // d^d - 2d(d-1) = d * norm
  f.K = HermitianOperator(all / (d * norm), dims);
  f.H = HermitianOperator(all_lambda / (d * norm), dims);

  std::vector<HermitianOperator> local;
  for (int k = 0; k < d; ++k) local.push_back(StateVector::basis(d, k).projector());

  Measurement& s = f.separable_measurement;
  s.dims = dims;
  LoccProtocol protocol;
  protocol.description = "same local measurement {|i><i|} on all subsystems";
  protocol.local_povms.assign(d - 1, local);
  protocol.assignment.assign(total, 0);
  s.decompositions.assign(d + 1, SeparableDecomposition{});
  for (int t = 0; t < total; ++t) {
    const std::vector<int> digits = dims.digits(t);
    bool constant = true;
    for (int v : digits) constant = constant && v == digits[0];
    const int outcome = constant ? digits[0] + 1 : 0;
    protocol.assignment[t] = outcome;
    ProductTerm term;
    for (int v : digits) term.factors.push_back(local[v]);
    s.decompositions[outcome]->terms.push_back(std::move(term));
  }
  s.locc_protocol = std::move(protocol);
  s.elements.emplace_back(id - all_lambda, dims);
  for (int i = 0; i < d; ++i) s.elements.emplace_back(lam[i], dims);
  return f;
}

Ensemble build_two_pure(const StateVector& psi1, const StateVector& psi2, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("prior must lie strictly between 0 and 1");
  if (!(psi1.dims() == psi2.dims())) throw Error("states have different dims");
  Ensemble e;
  e.dims = psi1.dims();
  e.items.push_back({eta, StateVector(psi1.amplitudes(), psi1.dims()).projector()});
  e.items.push_back({1.0 - eta, StateVector(psi2.amplitudes(), psi2.dims()).projector()});
  return e;
}

}  // namespace udbound
