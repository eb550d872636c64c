#pragma once

#include "kp/field.hpp"

#include <memory>
#include <string>

namespace kp {

struct InitialDataSpec {
    std::string name = "sym"; // sym | asym | custom
    std::string expression;   // for custom: arithmetic over x, y
};

// Samples the requested profile, then projects out the kx = 0 modes so the
// data is an exact x-derivative on the grid. The removed magnitude is
// reported through projection_magnitude when non-null.
SpectralField build_initial_data(const InitialDataSpec& spec, const GridSpec& grid,
                                 double* projection_magnitude = nullptr);

// Expression support: numbers, x, y, pi, + - * / ^, parentheses, unary minus,
// and the functions exp, sech, tanh, sin, cos.
class Expression {
  public:
    explicit Expression(const std::string& text); // throws bad_input on parse failure
    ~Expression();
    Expression(Expression&&) noexcept;
    double eval(double x, double y) const;

    struct Node;

  private:
    std::unique_ptr<Node> root_;
};

double u0_sym(double x, double y);
double u0_asym(double x, double y);

} // namespace kp
