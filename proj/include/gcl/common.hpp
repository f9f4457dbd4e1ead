#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcl {

using Vec = std::vector<double>;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kTwoPiI{0.0, 2.0 * kPi};

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can catch one type; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

class DecayError : public Error {
 public:
  using Error::Error;
};

class WeightError : public Error {
 public:
  using Error::Error;
};

class MissingDataError : public Error {
 public:
  using Error::Error;
};

class SignConsistencyError : public Error {
 public:
  using Error::Error;
};

class SupportError : public Error {
 public:
  using Error::Error;
};

// Configuration problems carry every violation found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Axis-aligned closed box. A zero-dimensional box contains the empty point.
struct Box {
  Vec lo;
  Vec hi;

  static Box cube(std::size_t dim, double radius);
  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> p) const;
};

double max_abs(std::span<const double> a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
std::string format_point(std::span<const double> p);

// Worker count used by the parallel kernels. Output never depends on it:
// every parallel loop writes disjoint outputs and each output is reduced
// sequentially in a fixed order.
void set_worker_count(int workers);
int worker_count();

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

// Small dense linear algebra on row-major square matrices.
Vec solve_linear(Vec a, Vec b, std::size_t dim);
double determinant(Vec a, std::size_t dim);

}  // namespace gcl
