#ifndef PCL_FORCE_HPP
#define PCL_FORCE_HPP

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pcl/geometry.hpp"

namespace pcl {

namespace expr {
struct Node;
using NodePtr = std::shared_ptr<const Node>;
// Tiny arithmetic parser: + - * / ^, parentheses, x, y, r (distance to the
// origin), numbers, and sin cos exp sqrt abs. Throws InvalidConfig on junk.
NodePtr parse(const std::string& text);
double eval(const NodePtr& n, double x, double y);
}  // namespace expr

// The force field f, plus the integrability exponent used for admissibility
// checks (q may be infinity for bounded kinds).
struct ForceSpec {
  struct Constant {
    double value = 1.0;
  };
  struct Radial {
    Vec2 center{0.0, 0.0};
    std::vector<std::pair<double, double>> profile;  // (radius, value), ascending
  };
  struct Grid {
    Vec2 origin{0.0, 0.0};
    double dx = 1.0, dy = 1.0;
    int nx = 0, ny = 0;
    std::vector<double> values;  // row-major, ny rows of nx
  };
  struct Expression {
    std::string text;
    expr::NodePtr ast;
  };

  std::variant<Constant, Radial, Grid, Expression> kind = Constant{};
  double q = std::numeric_limits<double>::infinity();

  double operator()(const Vec2& p) const;
  bool is_zero() const;
};

ForceSpec make_constant_force(double value, double q = std::numeric_limits<double>::infinity());
ForceSpec make_expression_force(const std::string& text,
                                double q = std::numeric_limits<double>::infinity());

}  // namespace pcl

#endif
