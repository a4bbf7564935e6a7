#include "udbound/cone.hpp"

#include <cmath>
#include <random>

namespace udbound {

void ConeGenerators::add(HermitianOperator g) {
  generators.push_back(std::move(g));
  product_form.emplace_back(std::nullopt);
}

void ConeGenerators::add_product(std::vector<HermitianOperator> factors) {
  generators.push_back(tensor(factors));
  product_form.emplace_back(std::move(factors));
}

ValidationReport validate_cone(const ConeGenerators& cone, double tol) {
  ValidationReport r;
  for (std::size_t g = 0; g < cone.generators.size(); ++g) {
    const std::string tag = "generator " + std::to_string(g) + ": ";
    if (!(cone.generators[g].dims() == cone.dims)) {
      r.violations.push_back({tag + "dims mismatch", 0.0});
      continue;
    }
    const double lo = min_eigenvalue(cone.generators[g]);
    if (lo < -tol) r.violations.push_back({tag + "not PSD", -lo});
    if (g < cone.product_form.size() && cone.product_form[g]) {
      const double res = max_abs(tensor(*cone.product_form[g]).matrix() - cone.generators[g].matrix());
      if (res > tol) r.violations.push_back({tag + "product form mismatch", res});
    }
  }
  return r;
}

Matrix pos_support(const Ensemble& e, std::size_t i, double rank_tol) {
  if (i >= e.size()) throw Error("state index out of range");
  // ker of a sum of PSD operators is the intersection of their kernels
  Matrix others = Matrix::Zero(e.dims.total(), e.dims.total());
  for (std::size_t j = 0; j < e.size(); ++j)
    if (j != i) others += e.state(j).matrix();
  return kernel_basis(HermitianOperator(std::move(others), e.dims), rank_tol);
}

DualTest in_pos_dual(const HermitianOperator& a, const Matrix& support, double tol) {
  DualTest out;
  if (support.cols() == 0) {
    out.member = true;
    return out;
  }
  out.residual = min_eigenvalue(compress(a, support));
  out.member = out.residual >= -tol;
  return out;
}

DualTest in_pos_dual(const HermitianOperator& a, const Ensemble& e, std::size_t i, double tol) {
  return in_pos_dual(a, pos_support(e, i), tol);
}

DualTest in_dual_of_generators(const HermitianOperator& a, const ConeGenerators& cone, double tol) {
  DualTest out;
  out.member = true;
  out.residual = 0.0;
  bool first = true;
  for (std::size_t g = 0; g < cone.generators.size(); ++g) {
    const double n = cone.generators[g].norm();
    if (n == 0.0) continue;
    const double pairing = hs_inner(a, cone.generators[g]) / n;
    if (first || pairing < out.residual) {
      out.residual = pairing;
      out.worst = g;
      first = false;
    }
  }
  out.member = out.residual >= -tol;
  return out;
}

namespace {

bool same_ensemble(const Ensemble& a, const Ensemble& b, double tol) {
  if (!(a.dims == b.dims) || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.prior(i) - b.prior(i)) > tol) return false;
    if (max_abs(a.state(i).matrix() - b.state(i).matrix()) > tol) return false;
  }
  return true;
}

}  // namespace

ConeGenerators sep_cone_generators_example(const Ensemble& e, ExampleKind which, std::size_t i) {
  ConeGenerators cone;
  cone.dims = e.dims;
  if (which == ExampleKind::example1) {
    if (!same_ensemble(e, build_example1().ensemble, 1e-12))
      throw Error("ensemble does not match example1");
    if (i > 2) throw Error("example1 has three states");
    using example1::mu;
    const HermitianOperator one = StateVector::basis(2, 1).projector();
    const HermitianOperator mp = mu(+1).projector(), mm = mu(-1).projector();
    switch (i) {
      case 0:
        cone.add_product({mp, mm});
        cone.add_product({mm, mp});
        break;
      case 1:
        cone.add_product({mp, one});
        cone.add_product({one, mp});
        break;
      default:
        cone.add_product({mm, one});
        cone.add_product({one, mm});
        break;
    }
  } else {
    const int d = e.dims[0];
    if (d < 3 || !same_ensemble(e, build_example2(d).ensemble, 1e-12))
      throw Error("ensemble does not match example2");
    if (i >= static_cast<std::size_t>(d)) throw Error("state index out of range for example2");
    const HermitianOperator local = StateVector::basis(d, static_cast<int>(i)).projector();
    cone.add_product(std::vector<HermitianOperator>(d - 1, local));
  }

  // every generator must lie in Pos_i
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (j == i) continue;
    for (const auto& g : cone.generators)
      if (std::abs(hs_inner(e.state(j), g)) > 1e-10) throw Error("generator outside Pos_i");
  }
  return cone;
}

std::vector<ConeGenerators> sep_cones_example(const Ensemble& e, ExampleKind which) {
  std::vector<ConeGenerators> out;
  for (std::size_t i = 0; i < e.size(); ++i) out.push_back(sep_cone_generators_example(e, which, i));
  return out;
}

PptResult ppt_check(const HermitianOperator& a, const Cut& cut, double tol) {
  if (cut.sites.empty() || cut.sites.size() >= a.dims().sites())
    throw Error("invalid cut: both sides must be nonempty");
  const Matrix pt = partial_transpose(a.matrix(), a.dims(), cut.sites);
  PptResult out;
  out.min_eigenvalue = min_eigenvalue(HermitianOperator(pt, a.dims()));
  out.ppt = out.min_eigenvalue >= -tol;
  return out;
}

std::vector<Cut> all_cuts(const DimVector& dims) {
  std::vector<Cut> out;
  const std::size_t m = dims.sites();
  if (m < 2) return out;
  // subsets containing site 0, excluding the full set
  for (std::size_t mask = 1; mask < (std::size_t{1} << m) - 1; ++mask) {
    if (!(mask & 1)) continue;
    Cut c;
    for (std::size_t k = 0; k < m; ++k)
      if (mask & (std::size_t{1} << k)) c.sites.push_back(k);
    out.push_back(std::move(c));
  }
  return out;
}

Separability classify_separability(const HermitianOperator& a,
                                   const std::optional<SeparableDecomposition>& decomposition,
                                   double tol) {
  if (decomposition) {
    bool factors_psd = true;
    for (const auto& t : decomposition->terms)
      for (const auto& f : t.factors) factors_psd = factors_psd && is_psd(f, tol);
    if (factors_psd && max_abs(decomposition->reconstruct(a.dims()).matrix() - a.matrix()) <= tol)
      return Separability::certified_separable;
  }
  for (const Cut& c : all_cuts(a.dims()))
    if (!ppt_check(a, c, tol).ppt) return Separability::certified_entangled;
  return Separability::unknown;
}

bool is_product_state(const StateVector& psi, double tol) {
  const DimVector& dims = psi.dims();
  const Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  for (std::size_t k = 0; k < dims.sites(); ++k) {
    std::vector<std::size_t> others;
    for (std::size_t s = 0; s < dims.sites(); ++s)
      if (s != k) others.push_back(s);
    const Matrix marginal = partial_trace(rho, dims, others);
    if (marginal.rows() < 2) continue;
    const Spectrum sp = eig_hermitian(marginal);
    if (sp.values(1) > tol) return false;
  }
  return true;
}

std::string to_string(RayVerdict v) {
  switch (v) {
    case RayVerdict::unique:
      return "unique";
    case RayVerdict::not_unique:
      return "not unique";
    default:
      return "inconclusive";
  }
}

RayCertificate certify_unique_product_ray(const StateVector& v1, const StateVector& v2, double tol,
                                          std::size_t samples, std::uint64_t seed) {
  if (!(v1.dims() == v2.dims())) throw Error("vectors have different dims");
  if (!is_product_state(v1, tol)) throw Error("first vector is not a product state");
  if (std::abs(inner(v1, v2)) > std::sqrt(tol)) throw Error("vectors are not orthogonal");

  const DimVector& dims = v1.dims();
  const Matrix cross = outer(v1, v2);
  RayCertificate out;
  // |v1><v2| must vanish under every proper partial trace for the marginals
  // of a superposition to split into a convex mixture
  const std::size_t m = dims.sites();
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < m; ++k)
      if (mask & (std::size_t{1} << k)) traced.push_back(k);
    out.cross_trace_residual = std::max(out.cross_trace_residual, max_abs(partial_trace(cross, dims, traced)));
  }
  out.v2_product = is_product_state(v2, tol);
  if (out.v2_product) {
    out.verdict = RayVerdict::not_unique;
    return out;
  }
  if (m < 2 || out.cross_trace_residual > tol) {
    out.verdict = RayVerdict::inconclusive;
    return out;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    Complex c1(gauss(rng), gauss(rng)), c2(gauss(rng), gauss(rng));
    const double n = std::sqrt(std::norm(c1) + std::norm(c2));
    c1 /= n;
    c2 /= n;
    if (std::abs(c2) <= tol) continue;
    ++out.samples_checked;
    const StateVector psi(v1.amplitudes() * c1 + v2.amplitudes() * c2, dims, true);
    if (is_product_state(psi, tol)) ++out.samples_product;
  }
  out.verdict = out.samples_product == 0 ? RayVerdict::unique : RayVerdict::not_unique;
  return out;
}

}  // namespace udbound
