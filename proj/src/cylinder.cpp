#include "stablecyl/cylinder.hpp"

#include "stablecyl/errors.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace stablecyl {

DomainSpec DomainSpec::interval(double x_min, double x_max) {
  if (!(x_max > x_min)) throw ArgumentError("interval needs x_max > x_min");
  DomainSpec d;
  d.kind = Kind::Interval;
  d.x_min = x_min;
  d.x_max = x_max;
  return d;
}

DomainSpec DomainSpec::rectangle(double x_min, double x_max, double z_min, double z_max) {
  if (!(x_max > x_min) || !(z_max > z_min)) throw ArgumentError("rectangle needs positive side lengths");
  DomainSpec d;
  d.kind = Kind::Rectangle;
  d.x_min = x_min;
  d.x_max = x_max;
  d.z_min = z_min;
  d.z_max = z_max;
  return d;
}

std::string to_string(DomainSpec::Kind kind) {
  return kind == DomainSpec::Kind::Interval ? "Interval" : "Rectangle";
}

std::string to_string(TopCondition top) { return top == TopCondition::Neumann ? "Neumann" : "Dirichlet"; }

TopCondition top_condition_from_string(const std::string& name) {
  if (name == "Neumann") return TopCondition::Neumann;
  if (name == "Dirichlet") return TopCondition::Dirichlet;
  throw ArgumentError("unknown top condition '" + name + "'");
}

namespace {

std::vector<double> uniform_nodes(double a, double b, int count) {
  std::vector<double> nodes(count);
  for (int i = 0; i < count; ++i) nodes[i] = a + (b - a) * i / (count - 1);
  nodes.back() = b;
  return nodes;
}

}  // namespace

CylinderGrid::CylinderGrid(DomainSpec domain, int nx, int nz, std::vector<double> y_nodes)
    : domain_(domain), nx_(nx), nz_(domain.kind == DomainSpec::Kind::Interval ? 1 : nz),
      y_nodes_(std::move(y_nodes)) {
  if (nx < 3) throw ArgumentError("grid needs at least 3 x nodes");
  if (domain.kind == DomainSpec::Kind::Rectangle && nz < 3) throw ArgumentError("grid needs at least 3 z nodes");
  if (y_nodes_.size() < 3) throw ArgumentError("grid needs at least 3 y nodes");
  if (y_nodes_.front() != 0.0) throw ArgumentError("first y node must be 0");
  for (size_t j = 1; j < y_nodes_.size(); ++j) {
    if (!(y_nodes_[j] > y_nodes_[j - 1])) throw ArgumentError("y nodes must be strictly increasing");
  }
  x_nodes_ = uniform_nodes(domain.x_min, domain.x_max, nx_);
  z_nodes_ = domain.kind == DomainSpec::Kind::Interval ? std::vector<double>{0.0}
                                                        : uniform_nodes(domain.z_min, domain.z_max, nz_);
}

const std::vector<double>& CylinderGrid::axis_nodes(int axis) const {
  if (axis == dim() - 1) return y_nodes_;
  if (axis == 0) return x_nodes_;
  if (axis == 1 && n() == 2) return z_nodes_;
  throw ArgumentError("axis out of range");
}

Point CylinderGrid::point(int node) const {
  return {x_nodes_[ix_of(node)], z_nodes_[iz_of(node)], y_nodes_[iy_of(node)]};
}

int CylinderGrid::stride(int axis) const {
  if (axis == dim() - 1) return 1;
  if (axis == 0) return nz_ * ny();
  return ny();
}

int CylinderGrid::axis_index(int node, int axis) const {
  if (axis == dim() - 1) return iy_of(node);
  if (axis == 0) return ix_of(node);
  return iz_of(node);
}

bool CylinderGrid::is_lateral(int node) const {
  const int ix = ix_of(node);
  if (ix == 0 || ix == nx_ - 1) return true;
  if (n() == 2) {
    const int iz = iz_of(node);
    return iz == 0 || iz == nz_ - 1;
  }
  return false;
}

bool CylinderGrid::same_as(const CylinderGrid& other) const {
  return this == &other || (domain_ == other.domain_ && nx_ == other.nx_ && nz_ == other.nz_ &&
                            y_nodes_ == other.y_nodes_);
}

double CylinderGrid::max_spacing() const {
  double h = 0.0;
  for (int axis = 0; axis < dim(); ++axis) {
    const auto& nodes = axis_nodes(axis);
    for (size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
  }
  return h;
}

GridPtr build_grid(const DomainSpec& domain, int nx, int ny, double y_max, double grading) {
  if (nx < 3 || ny < 3) throw ArgumentError("build_grid: node counts must be >= 3");
  if (!(y_max > 0.0)) throw ArgumentError("build_grid: Y_max must be positive");
  if (!(grading >= 0.0)) throw ArgumentError("build_grid: grading must be nonnegative");
  std::vector<double> ys(ny);
  for (int j = 0; j < ny; ++j) ys[j] = y_max * std::pow(static_cast<double>(j) / (ny - 1), 1.0 + grading);
  ys.front() = 0.0;
  ys.back() = y_max;
  return std::make_shared<const CylinderGrid>(domain, nx, nx, std::move(ys));
}

CylinderField::CylinderField(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ArgumentError("field without grid");
  if (values_.size() != grid_->size()) throw ArgumentError("field length does not match grid");
  if (!values_.allFinite()) throw ArgumentError("field contains non-finite values");
}

CylinderField::CylinderField(GridPtr grid, double constant)
    : grid_(std::move(grid)), values_(Eigen::VectorXd::Constant(grid_->size(), constant)) {}

CylinderField sample(const GridPtr& grid, const std::function<double(const Point&)>& fn) {
  Eigen::VectorXd values(grid->size());
  for (int i = 0; i < grid->size(); ++i) values[i] = fn(grid->point(i));
  return CylinderField(grid, std::move(values));
}

namespace {

// Derivative weights at x[k] for the three-point stencil on (x[i0], x[i0+1], x[i0+2]).
void three_point_weights(const std::vector<double>& x, int i0, int k, double w[3]) {
  const double a = x[i0], b = x[i0 + 1], c = x[i0 + 2];
  const double t = x[k];
  w[0] = ((t - b) + (t - c)) / ((a - b) * (a - c));
  w[1] = ((t - a) + (t - c)) / ((b - a) * (b - c));
  w[2] = ((t - a) + (t - b)) / ((c - a) * (c - b));
}

}  // namespace

Eigen::VectorXd axis_derivative(const CylinderGrid& grid, const Eigen::VectorXd& values, int axis) {
  const auto& nodes = grid.axis_nodes(axis);
  const int count = static_cast<int>(nodes.size());
  const int stride = grid.stride(axis);
  // Stencil weights depend only on the position along the axis.
  std::vector<std::array<double, 3>> weights(count);
  std::vector<int> first(count);
  for (int k = 0; k < count; ++k) {
    const int i0 = k == 0 ? 0 : (k == count - 1 ? count - 3 : k - 1);
    first[k] = i0;
    three_point_weights(nodes, i0, k, weights[k].data());
  }
  Eigen::VectorXd out(values.size());
  for (int node = 0; node < grid.size(); ++node) {
    const int k = grid.axis_index(node, axis);
    const int base = node + (first[k] - k) * stride;
    const auto& w = weights[k];
    out[node] = w[0] * values[base] + w[1] * values[base + stride] + w[2] * values[base + 2 * stride];
  }
  return out;
}

VectorField gradient(const CylinderGrid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.size()) throw ArgumentError("gradient: length mismatch");
  VectorField g;
  for (int axis = 0; axis < grid.dim(); ++axis) g.components.push_back(axis_derivative(grid, values, axis));
  return g;
}

VectorField gradient(const CylinderField& u) { return gradient(u.grid(), u.values()); }

Eigen::VectorXd trace_bottom(const CylinderField& u) {
  const auto& grid = u.grid();
  Eigen::VectorXd out(grid.slice_size());
  for (int ix = 0; ix < grid.nx(); ++ix)
    for (int iz = 0; iz < grid.nz(); ++iz) out[grid.slice_index(ix, iz)] = u[grid.index(ix, iz, 0)];
  return out;
}

namespace {

Eigen::VectorXd trapezoid_weights(const std::vector<double>& nodes) {
  const int count = static_cast<int>(nodes.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
  for (int i = 0; i + 1 < count; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

Eigen::VectorXd y_weights(const CylinderGrid& grid, double theta) {
  const auto& ys = grid.y_nodes();
  if (theta == 0.0) return trapezoid_weights(ys);
  const int count = static_cast<int>(ys.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
  for (int j = 0; j + 1 < count; ++j) {
    const double y0 = ys[j], y1 = ys[j + 1], h = y1 - y0;
    const double m0 = (std::pow(y1, theta + 1.0) - std::pow(y0, theta + 1.0)) / (theta + 1.0);
    const double m1 = (std::pow(y1, theta + 2.0) - std::pow(y0, theta + 2.0)) / (theta + 2.0);
    // \int y^theta (y1 - y)/h and \int y^theta (y - y0)/h over the cell.
    w[j] += (y1 * m0 - m1) / h;
    w[j + 1] += (m1 - y0 * m0) / h;
  }
  return w;
}

Eigen::VectorXd slice_weights(const CylinderGrid& grid) {
  const Eigen::VectorXd wx = trapezoid_weights(grid.x_nodes());
  Eigen::VectorXd w(grid.slice_size());
  if (grid.n() == 1) return wx;
  const Eigen::VectorXd wz = trapezoid_weights(grid.z_nodes());
  for (int ix = 0; ix < grid.nx(); ++ix)
    for (int iz = 0; iz < grid.nz(); ++iz) w[grid.slice_index(ix, iz)] = wx[ix] * wz[iz];
  return w;
}

Eigen::VectorXd bulk_weights(const CylinderGrid& grid, double theta) {
  const Eigen::VectorXd ws = slice_weights(grid);
  const Eigen::VectorXd wy = y_weights(grid, theta);
  Eigen::VectorXd w(grid.size());
  for (int s = 0; s < grid.slice_size(); ++s)
    for (int j = 0; j < grid.ny(); ++j) w[s * grid.ny() + j] = ws[s] * wy[j];
  return w;
}

double integrate(const Eigen::VectorXd& values, Region region, const CylinderGrid& grid) {
  switch (region) {
    case Region::Bulk: {
      if (values.size() != grid.size()) throw ArgumentError("integrate(Bulk): length mismatch");
      return bulk_weights(grid).dot(values);
    }
    case Region::BottomBoundary: {
      if (values.size() != grid.slice_size()) throw ArgumentError("integrate(BottomBoundary): length mismatch");
      return slice_weights(grid).dot(values);
    }
    case Region::LateralBoundary: {
      if (values.size() != grid.size()) throw ArgumentError("integrate(LateralBoundary): length mismatch");
      const Eigen::VectorXd wy = y_weights(grid);
      double total = 0.0;
      if (grid.n() == 1) {
        for (int ix : {0, grid.nx() - 1})
          for (int j = 0; j < grid.ny(); ++j) total += wy[j] * values[grid.index(ix, 0, j)];
        return total;
      }
      const Eigen::VectorXd wx = trapezoid_weights(grid.x_nodes());
      const Eigen::VectorXd wz = trapezoid_weights(grid.z_nodes());
      for (int j = 0; j < grid.ny(); ++j) {
        for (int ix : {0, grid.nx() - 1})
          for (int iz = 0; iz < grid.nz(); ++iz) total += wy[j] * wz[iz] * values[grid.index(ix, iz, j)];
        for (int iz : {0, grid.nz() - 1})
          for (int ix = 0; ix < grid.nx(); ++ix) total += wy[j] * wx[ix] * values[grid.index(ix, iz, j)];
      }
      return total;
    }
  }
  return 0.0;
}

void write_csv(std::ostream& os, const CylinderField& field, const std::string& value_name) {
  const auto& grid = field.grid();
  os << (grid.n() == 1 ? "x,y," : "x,z,y,") << value_name << '\n';
  os << std::setprecision(17);
  for (int i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    os << p.x << ',';
    if (grid.n() == 2) os << p.z << ',';
    os << p.y << ',' << field[i] << '\n';
  }
}

void write_csv(const std::string& path, const CylinderField& field, const std::string& value_name) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  write_csv(os, field, value_name);
}

}  // namespace stablecyl
