// Scalar-field expressions over bundle coordinates (x1..xn, y1..ym).
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dgeom/jet.hpp"

namespace dgeom {

struct BundleShape {
  int n = 1;
  int m = 1;
  int dim() const { return n + m; }
  bool operator==(const BundleShape&) const = default;
};

// Throws ConfigError unless 1 <= n, m and n + m <= 6.
void validate(const BundleShape& s);

namespace expr {
struct Node;
}

class ScalarField {
public:
  ScalarField();  // the constant 0
  static ScalarField constant(double v, BundleShape shape);

  const std::string& source() const { return source_; }
  const BundleShape& shape() const { return shape_; }

  double eval(std::span<const double> u) const;
  Jet eval_jet(std::span<const double> u, int order) const;

  // Canonical text form; re-parses to an equivalent field.
  std::string to_string() const;

  // True when the field is a literal constant (no coordinate dependence).
  bool is_constant() const;

private:
  friend ScalarField parse_field(const std::string&, BundleShape);
  std::shared_ptr<const expr::Node> root_;
  BundleShape shape_;
  std::string source_;
};

// Grammar: numbers, x1..x6, y1..y6, + - * /, ^ with an integer exponent,
// unary minus, sin cos tan exp log sqrt, parentheses.
ScalarField parse_field(const std::string& src, BundleShape shape);

// Jets of a list of fields at one point.
std::vector<Jet> eval_jets(const std::vector<ScalarField>& fs, std::span<const double> u, int order);

}  // namespace dgeom
