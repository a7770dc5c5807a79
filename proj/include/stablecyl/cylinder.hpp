#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace stablecyl {

// Cross-section Omega of the half-cylinder: an interval (n = 1) or an
// axis-aligned rectangle (n = 2). Both are convex.
struct DomainSpec {
  enum class Kind { Interval, Rectangle };

  Kind kind = Kind::Interval;
  double x_min = 0.0;
  double x_max = 1.0;
  double z_min = 0.0;
  double z_max = 0.0;

  static DomainSpec interval(double x_min, double x_max);
  static DomainSpec rectangle(double x_min, double x_max, double z_min, double z_max);

  int n() const { return kind == Kind::Interval ? 1 : 2; }
  double length_x() const { return x_max - x_min; }
  double length_z() const { return z_max - z_min; }
  double measure() const { return kind == Kind::Interval ? length_x() : length_x() * length_z(); }
  bool operator==(const DomainSpec&) const = default;
};

std::string to_string(DomainSpec::Kind kind);

enum class TopCondition { Neumann, Dirichlet };
std::string to_string(TopCondition top);
TopCondition top_condition_from_string(const std::string& name);

struct Point {
  double x = 0.0;
  double z = 0.0;
  double y = 0.0;
};

// Tensor grid on Omega x (0, Y_max). Nodes are ordered lexicographically in
// (x[, z], y), i.e. y runs fastest:  index = (ix * nz + iz) * ny + iy.
class CylinderGrid {
 public:
  CylinderGrid(DomainSpec domain, int nx, int nz, std::vector<double> y_nodes);

  const DomainSpec& domain() const { return domain_; }
  int n() const { return domain_.n(); }
  int dim() const { return domain_.n() + 1; }
  int nx() const { return nx_; }
  int nz() const { return nz_; }
  int ny() const { return static_cast<int>(y_nodes_.size()); }
  double y_max() const { return y_nodes_.back(); }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& z_nodes() const { return z_nodes_; }
  const std::vector<double>& y_nodes() const { return y_nodes_; }
  // Node coordinates along axis 0 (x), 1 (z, rectangles only) or the last
  // axis (y).
  const std::vector<double>& axis_nodes(int axis) const;
  int axis_count(int axis) const { return static_cast<int>(axis_nodes(axis).size()); }

  int slice_size() const { return nx_ * nz_; }
  int size() const { return slice_size() * ny(); }
  int index(int ix, int iz, int iy) const { return (ix * nz_ + iz) * ny() + iy; }
  int slice_index(int ix, int iz) const { return ix * nz_ + iz; }
  Point point(int node) const;
  int iy_of(int node) const { return node % ny(); }
  int ix_of(int node) const { return node / (nz_ * ny()); }
  int iz_of(int node) const { return (node / ny()) % nz_; }
  // Stride between neighbours along an axis in the node numbering.
  int stride(int axis) const;
  int axis_index(int node, int axis) const;
  bool is_lateral(int node) const;

  bool same_as(const CylinderGrid& other) const;
  double max_spacing() const;

 private:
  DomainSpec domain_;
  int nx_;
  int nz_;
  std::vector<double> x_nodes_;
  std::vector<double> z_nodes_;
  std::vector<double> y_nodes_;
};

using GridPtr = std::shared_ptr<const CylinderGrid>;

// y_nodes[j] = Y_max (j/(ny-1))^{1+grading}; uniform x (and z) nodes with nx
// nodes per side.
GridPtr build_grid(const DomainSpec& domain, int nx, int ny, double y_max, double grading = 0.0);

class CylinderField {
 public:
  CylinderField() = default;
  CylinderField(GridPtr grid, Eigen::VectorXd values);
  explicit CylinderField(GridPtr grid, double constant = 0.0);

  const GridPtr& grid_ptr() const { return grid_; }
  const CylinderGrid& grid() const { return *grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](int i) const { return values_[i]; }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

CylinderField sample(const GridPtr& grid, const std::function<double(const Point&)>& fn);

// Components (d/dx[, d/dz], d/dy) at every node.
struct VectorField {
  std::vector<Eigen::VectorXd> components;
  int dim() const { return static_cast<int>(components.size()); }
};

// Three-point derivative along one axis: centered in the interior, one-sided
// at the two ends; second order on graded meshes.
Eigen::VectorXd axis_derivative(const CylinderGrid& grid, const Eigen::VectorXd& values, int axis);
VectorField gradient(const CylinderField& u);
VectorField gradient(const CylinderGrid& grid, const Eigen::VectorXd& values);

Eigen::VectorXd trace_bottom(const CylinderField& u);

enum class Region { Bulk, BottomBoundary, LateralBoundary };

// Trapezoidal tensor quadrature. Bulk and LateralBoundary take a full nodal
// array (lateral reads only the lateral nodes); BottomBoundary takes one value
// per Omega node.
double integrate(const Eigen::VectorXd& values, Region region, const CylinderGrid& grid);

// Quadrature weights for \int_0^{Y} y^theta F(y) dy with F piecewise linear:
// exact moments of y^theta against the hat functions (trapezoid for theta=0).
Eigen::VectorXd y_weights(const CylinderGrid& grid, double theta = 0.0);
// Trapezoid weights on the Omega slice.
Eigen::VectorXd slice_weights(const CylinderGrid& grid);
// Full tensor weights for \int y^theta F over the bulk.
Eigen::VectorXd bulk_weights(const CylinderGrid& grid, double theta = 0.0);

// One row per node: coordinates then value.
void write_csv(std::ostream& os, const CylinderField& field, const std::string& value_name = "value");
void write_csv(const std::string& path, const CylinderField& field, const std::string& value_name = "value");

}  // namespace stablecyl
