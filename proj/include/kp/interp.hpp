#pragma once

#include <cstddef>
#include <vector>

namespace kp {

// Shape-preserving monotone cubic interpolant (Fritsch-Carlson slopes) over
// strictly increasing abscissae.
class Pchip {
  public:
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const; // clamps outside [x front, x back]
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, d_;
};

} // namespace kp
