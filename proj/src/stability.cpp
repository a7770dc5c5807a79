#include "stablecyl/stability.hpp"

#include "fem.hpp"
#include "stablecyl/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stablecyl {

Eigen::SparseMatrix<double> StabilityForm::mass_matrix() const {
  Eigen::SparseMatrix<double> M(mass.size(), mass.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < mass.size(); ++i) t.emplace_back(i, i, mass[i]);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

CylinderField StabilityForm::embed(const Eigen::VectorXd& phi) const {
  if (phi.size() != static_cast<int>(dofs.size())) throw ArgumentError("embed: wrong test-space length");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->size());
  for (size_t i = 0; i < dofs.size(); ++i) v[dofs[i]] = phi[static_cast<int>(i)];
  return CylinderField(grid, std::move(v));
}

Eigen::VectorXd StabilityForm::restrict(const CylinderField& phi) const {
  if (!phi.grid().same_as(*grid)) throw ArgumentError("restrict: field on a different grid");
  Eigen::VectorXd v(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) v[static_cast<int>(i)] = phi[dofs[i]];
  return v;
}

StabilityForm assemble_I(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                         double cap_height) {
  const auto& grid = u.grid();
  StructuralReport structural;
  try {
    std::vector<double> ys;
    for (double y : grid.y_nodes())
      if (y > 0.0) ys.push_back(y);
    const VectorField g = gradient(u);
    double tmax = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      double s = 0.0;
      for (const auto& c : g.components) s += c[i] * c[i];
      tmax = std::max(tmax, std::sqrt(s));
    }
    std::vector<double> ts{0.0};
    for (int k = 1; k <= 8; ++k) ts.push_back(tmax * k / 8.0);
    structural = check_structural(model, ys, ts);
  } catch (const DomainError& e) {
    throw ModelError(std::string("assemble_I: ") + e.what());
  }
  if (!structural.ellipticity_ok) throw ModelError("assemble_I: ellipticity fails on the range of (y, |grad u|)");

  StabilityForm form;
  form.grid = u.grid_ptr();
  const fem::Assembly sys = fem::assemble(grid, u.values(), model, reaction, {false, true, true});

  std::vector<int> index(grid.size(), -1);
  for (int i = 0; i < grid.size(); ++i) {
    const int iy = grid.iy_of(i);
    if (iy == grid.ny() - 1) continue;
    if (cap_height >= 0.0 && grid.y_nodes()[iy] >= cap_height) continue;
    index[i] = static_cast<int>(form.dofs.size());
    form.dofs.push_back(i);
  }
  const int n = static_cast<int>(form.dofs.size());
  if (n == 0) throw ArgumentError("assemble_I: empty test space");

  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < sys.jacobian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.jacobian, k); it; ++it) {
      const int r = index[it.row()], c = index[it.col()];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  form.energy.resize(n, n);
  form.energy.setFromTriplets(triplets.begin(), triplets.end());
  // Symmetrize away assembly roundoff.
  Eigen::SparseMatrix<double> Et = form.energy.transpose();
  form.energy = 0.5 * (form.energy + Et);

  const Eigen::VectorXd wb = slice_weights(grid);
  const Eigen::VectorXd w = bulk_weights(grid);
  form.mass.resize(n);
  double lower = 0.0;
  for (int i = 0; i < n; ++i) {
    const int node = form.dofs[i];
    const int iy = grid.iy_of(node);
    double potential = 0.0;
    form.mass[i] = sys.a_mass[node];
    if (!reaction.g_zero) potential += w[node] * reaction.g_u(grid.y_nodes()[iy], u[node]);
    if (iy == 0) {
      const double wbi = wb[node / grid.ny()];
      form.mass[i] += wbi;
      potential -= wbi * reaction.f_prime(u[node]);
    }
    if (!(form.mass[i] > 0.0)) throw ModelError("assemble_I: nonpositive mass");
    lower = std::min(lower, potential / form.mass[i]);
  }
  form.shift_hint = lower;
  return form;
}

namespace {

void normalize_sign(Eigen::VectorXd& v) {
  const double s = v.sum();
  if (std::abs(s) > 1e-8 * v.cwiseAbs().sum()) {
    if (s < 0) v = -v;
    return;
  }
  Eigen::Index idx;
  v.cwiseAbs().maxCoeff(&idx);
  if (v[idx] < 0) v = -v;
}

double pair_residual(const StabilityForm& form, const Eigen::VectorXd& phi, double mu) {
  const Eigen::VectorXd Aphi = form.energy * phi;
  const Eigen::VectorXd Mphi = form.mass.cwiseProduct(phi);
  const double scale = std::max(Aphi.norm(), Mphi.norm());
  return scale > 0.0 ? (Aphi - mu * Mphi).norm() / scale : 0.0;
}

EigenPair make_pair(const StabilityForm& form, double mu, Eigen::VectorXd phi) {
  // Mass normalization.
  phi /= std::sqrt(phi.dot(form.mass.cwiseProduct(phi)));
  normalize_sign(phi);
  EigenPair p;
  p.value = mu;
  p.residual = pair_residual(form, phi, mu);
  p.field = form.embed(phi);
  p.vector = std::move(phi);
  return p;
}

}  // namespace

std::vector<EigenPair> min_rayleigh(const StabilityForm& form, int k) {
  const int n = static_cast<int>(form.mass.size());
  if (k < 1 || k >= n) throw ArgumentError("min_rayleigh: need 1 <= k < dimension");

  const Eigen::VectorXd dinv = form.mass.cwiseSqrt().cwiseInverse();
  Eigen::SparseMatrix<double> C = dinv.asDiagonal() * form.energy * dinv.asDiagonal();

  double sigma = form.shift_hint - 0.01 * (1.0 + std::abs(form.shift_hint));
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  for (int attempt = 0;; ++attempt) {
    Eigen::SparseMatrix<double> S = C;
    for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= sigma;
    llt.compute(S);
    if (llt.info() == Eigen::Success) break;
    if (attempt > 60) throw SolverError("min_rayleigh: shifted operator never became positive definite");
    sigma = 2.0 * sigma - 1.0;
  }

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i) start[i] = unif(rng);

  double worst = std::numeric_limits<double>::infinity();
  for (int m = std::min(n, std::max(2 * k + 20, 40));; m = std::min(n, 2 * m)) {
    Eigen::MatrixXd V(n, m);
    Eigen::VectorXd alpha(m), beta(m);
    V.col(0) = start.normalized();
    int steps = m;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = llt.solve(V.col(j));
      alpha[j] = V.col(j).dot(w);
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
      beta[j] = w.norm();
      if (j + 1 == m) break;
      if (beta[j] < 1e-14) {
        steps = j + 1;
        break;
      }
      V.col(j + 1) = w / beta[j];
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int found = std::min(k, steps);
    std::vector<EigenPair> pairs;
    worst = 0.0;
    for (int r = 0; r < found; ++r) {
      const int col = steps - 1 - r;  // largest theta first
      const double theta = es.eigenvalues()[col];
      const Eigen::VectorXd psi = V.leftCols(steps) * es.eigenvectors().col(col);
      if (!(theta > 0.0)) continue;
      // Rayleigh quotient in the original pencil.
      Eigen::VectorXd phi = dinv.cwiseProduct(psi);
      const double rq = phi.dot(form.energy * phi) / phi.dot(form.mass.cwiseProduct(phi));
      pairs.push_back(make_pair(form, rq, phi));
      worst = std::max(worst, pairs.back().residual);
    }
    if (static_cast<int>(pairs.size()) == k && worst <= 1e-8) {
      std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
      return pairs;
    }
    if (m == n) break;
  }
  throw SolverError("min_rayleigh: eigen-residual " + std::to_string(worst) + " above 1e-8", {worst});
}

std::vector<EigenPair> min_rayleigh_dense(const StabilityForm& form, int k) {
  const int n = static_cast<int>(form.mass.size());
  if (k < 1 || k >= n) throw ArgumentError("min_rayleigh_dense: need 1 <= k < dimension");
  const Eigen::MatrixXd A = Eigen::MatrixXd(form.energy);
  const Eigen::MatrixXd M = form.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  if (es.info() != Eigen::Success) throw SolverError("min_rayleigh_dense: eigensolve failed");
  std::vector<EigenPair> pairs;
  for (int r = 0; r < k; ++r) pairs.push_back(make_pair(form, es.eigenvalues()[r], es.eigenvectors().col(r)));
  return pairs;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Stable: return "Stable";
    case Classification::Unstable: return "Unstable";
    case Classification::Marginal: return "Marginal";
  }
  return "?";
}

void to_json(nlohmann::json& j, const StabilityReport& report) {
  const auto& g = report.ground_state.grid();
  j = nlohmann::json{{"mu1", report.mu1},
                     {"classification", to_string(report.classification)},
                     {"tol", report.tol},
                     {"eigen_residual", report.eigen_residual},
                     {"grid", {{"domain", to_string(g.domain().kind)},
                               {"nx", g.nx()},
                               {"nz", g.nz()},
                               {"ny", g.ny()},
                               {"y_max", g.y_max()}}}};
}

double default_stability_tol(const StabilityForm& form) {
  double rho = 0.0;
  for (int k = 0; k < form.energy.outerSize(); ++k) {
    double row = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.energy, k); it; ++it) row += std::abs(it.value());
    rho = std::max(rho, row / form.mass[k]);
  }
  return 1e-6 * rho;
}

Classification classify_mu(double mu1, double tol) {
  if (mu1 >= -tol) return Classification::Stable;
  if (mu1 < -tol && std::abs(mu1) > tol) return Classification::Unstable;
  return Classification::Marginal;
}

StabilityReport classify(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction,
                         double tol) {
  const StabilityForm form = assemble_I(u, model, reaction);
  if (!(tol > 0.0)) tol = default_stability_tol(form);
  const auto pairs = min_rayleigh(form, 1);
  StabilityReport r;
  r.mu1 = pairs[0].value;
  r.ground_state = pairs[0].field;
  r.eigen_residual = pairs[0].residual;
  r.tol = tol;
  r.classification = classify_mu(r.mu1, tol);
  return r;
}

StabilityReport classify(const CylinderField& u, const CoefficientModel& model, const ReactionSpec& reaction) {
  return classify(u, model, reaction, 0.0);
}

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::StrictlyPositive: return "StrictlyPositive";
    case SignClass::StrictlyNegative: return "StrictlyNegative";
    case SignClass::IdenticallyZero: return "IdenticallyZero";
    case SignClass::Mixed: return "Mixed";
  }
  return "?";
}

SignClass sign_trichotomy(const CylinderField& ground_state, double tol) {
  const auto& grid = ground_state.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.iy_of(i) == grid.ny() - 1) continue;
    lo = std::min(lo, ground_state[i]);
    hi = std::max(hi, ground_state[i]);
  }
  if (lo >= -tol && hi <= tol) return SignClass::IdenticallyZero;
  if (lo >= -tol) return SignClass::StrictlyPositive;
  if (hi <= tol) return SignClass::StrictlyNegative;
  return SignClass::Mixed;
}

namespace {

struct FormSums {
  double b_energy = 0.0;
  double a_energy = 0.0;
  double j = 0.0;
};

FormSums form_sums(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi) {
  if (!u.grid().same_as(phi.grid())) throw ArgumentError("stability forms: fields on different grids");
  const bool smooth = !model.t_independent();
  FormSums s;
  fem::for_each_gauss_point(u.grid(), u.values(), [&](const fem::GaussPoint& gp) {
    Eigen::VectorXd gphi = Eigen::VectorXd::Zero(gp.grad_u.size());
    for (size_t c = 0; c < gp.nodes.size(); ++c)
      gphi += phi[gp.nodes[c]] * gp.shape_grad.row(static_cast<int>(c)).transpose();
    const double t = gp.grad_u.norm();
    const double t_eval = smooth ? std::sqrt(t * t + fem::kGradEps * fem::kGradEps) : t;
    const double a = eval_a(model, gp.y, t_eval);
    const double ratio = smooth ? eval_a_t(model, gp.y, t_eval) / t_eval : 0.0;
    const double proj = gp.grad_u.dot(gphi);
    const double gg = gphi.squaredNorm();
    s.a_energy += gp.weight * a * gg;
    s.b_energy += gp.weight * (a * gg + ratio * proj * proj);
    s.j -= gp.weight * ratio * proj * proj;
  });
  return s;
}

}  // namespace

double form_J(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi) {
  return form_sums(u, model, phi).j;
}

double form_B_energy(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi) {
  return form_sums(u, model, phi).b_energy;
}

double form_a_energy(const CylinderField& u, const CoefficientModel& model, const CylinderField& phi) {
  return form_sums(u, model, phi).a_energy;
}

double convexity_gap(const Eigen::VectorXd& u_bottom, const ReactionSpec& reaction, double c) {
  if (reaction.convexity == Convexity::Unset) throw PreconditionError("convexity_gap: reaction has no convexity flag");
  if (u_bottom.size() == 0) throw ArgumentError("convexity_gap: empty bottom field");
  const double fc = reaction.f(c);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < u_bottom.size(); ++i) {
    const double u = u_bottom[i];
    gap = std::min(gap, (reaction.f(u) + reaction.f_prime(u) * (c - u)) * (c - u) - fc * (c - u));
  }
  return gap;
}

}  // namespace stablecyl
