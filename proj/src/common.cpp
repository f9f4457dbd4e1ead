#include "gcl/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace gcl {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) {
    out += "\n  - ";
    out += s;
  }
  return out;
}

std::atomic<int> g_workers{1};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

Box Box::cube(std::size_t dim, double radius) {
  return Box{Vec(dim, -radius), Vec(dim, radius)};
}

bool Box::contains(std::span<const double> p) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= lo[i] && p[i] <= hi[i])) return false;
  }
  return true;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

std::string format_point(std::span<const double> p) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

void set_worker_count(int workers) { g_workers.store(std::max(1, workers)); }

int worker_count() { return g_workers.load(); }

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  if (workers <= 1) {
    if (count) body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

Vec solve_linear(Vec a, Vec b, std::size_t dim) {
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r) {
      if (std::abs(a[r * dim + col]) > std::abs(a[pivot * dim + col])) pivot = r;
    }
    if (std::abs(a[pivot * dim + col]) <= 1e-14 * std::max(scale, 1e-300)) {
      throw SingularJacobianError("singular Jacobian in linear solve");
    }
    if (pivot != col) {
      for (std::size_t k = 0; k < dim; ++k) std::swap(a[col * dim + k], a[pivot * dim + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a[r * dim + col] / a[col * dim + col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < dim; ++k) a[r * dim + k] -= f * a[col * dim + k];
      b[r] -= f * b[col];
    }
  }
  Vec x(dim);
  for (std::size_t i = dim; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < dim; ++k) s -= a[i * dim + k] * x[k];
    x[i] = s / a[i * dim + i];
  }
  return x;
}

double determinant(Vec a, std::size_t dim) {
  double det = 1.0;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r) {
      if (std::abs(a[r * dim + col]) > std::abs(a[pivot * dim + col])) pivot = r;
    }
    if (a[pivot * dim + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t k = 0; k < dim; ++k) std::swap(a[col * dim + k], a[pivot * dim + k]);
      det = -det;
    }
    det *= a[col * dim + col];
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double f = a[r * dim + col] / a[col * dim + col];
      for (std::size_t k = col; k < dim; ++k) a[r * dim + k] -= f * a[col * dim + k];
    }
  }
  return det;
}

}  // namespace gcl
