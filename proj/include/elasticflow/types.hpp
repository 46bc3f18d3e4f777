#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace elasticflow {

/// Failure categories. The CLI prints category() so scripts can branch on it.
enum class ErrorKind {
  NonRegularCurve,
  StencilTooWide,
  LengthMismatch,
  MissingDerivativeOrder,
  NotGeometricallyAdmissible,
  InadmissibleInitial,
  SingularMatrix,
  StabilityViolation,
  DegenerateBoundary,
  NewtonDiverged,
  SingularJacobian,
  InsufficientRecords,
  GridMismatch,
  ParseError,
  InvalidValue,
  IoError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonRegularCurve: return "NonRegularCurve";
    case ErrorKind::StencilTooWide: return "StencilTooWide";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MissingDerivativeOrder: return "MissingDerivativeOrder";
    case ErrorKind::NotGeometricallyAdmissible: return "NotGeometricallyAdmissible";
    case ErrorKind::InadmissibleInitial: return "InadmissibleInitial";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::InsufficientRecords: return "InsufficientRecords";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* category() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

template <typename T>
struct Vec2 {
  T x{};
  T y{};

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(const T& s) { x *= s; y *= s; return *this; }

  T operator[](int c) const { return c == 0 ? x : y; }
  T& operator[](int c) { return c == 0 ? x : y; }
};

template <typename T> Vec2<T> operator+(Vec2<T> a, const Vec2<T>& b) { return a += b; }
template <typename T> Vec2<T> operator-(Vec2<T> a, const Vec2<T>& b) { return a -= b; }
template <typename T> Vec2<T> operator-(const Vec2<T>& a) { return {-a.x, -a.y}; }
template <typename T> Vec2<T> operator*(Vec2<T> a, const T& s) { return a *= s; }
template <typename T> Vec2<T> operator*(const T& s, Vec2<T> a) { return a *= s; }
template <typename T> Vec2<T> operator/(const Vec2<T>& a, const T& s) { return {a.x / s, a.y / s}; }
// Mixed scalar forms so Vec2<Dual> can be scaled by stencil weights.
template <typename T, typename S>
  requires(!std::is_same_v<T, S> && std::is_arithmetic_v<S>)
Vec2<T> operator*(const Vec2<T>& a, S s) { return {a.x * s, a.y * s}; }
template <typename T, typename S>
  requires(!std::is_same_v<T, S> && std::is_arithmetic_v<S>)
Vec2<T> operator*(S s, const Vec2<T>& a) { return {a.x * s, a.y * s}; }

template <typename T> T dot(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.x + a.y * b.y; }
/// det(a, b) = a.x b.y - a.y b.x
template <typename T> T cross(const Vec2<T>& a, const Vec2<T>& b) { return a.x * b.y - a.y * b.x; }
template <typename T> T norm(const Vec2<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }
/// Anticlockwise rotation by pi/2.
template <typename T> Vec2<T> rotate_ccw(const Vec2<T>& a) { return {-a.y, a.x}; }

using Point = Vec2<double>;

/// Curve sampled on the uniform grid x_i = i/N, i = 0..N.
class DiscreteCurve {
 public:
  static constexpr std::size_t kMinIntervals = 8;

  DiscreteCurve() = default;
  explicit DiscreteCurve(std::vector<Point> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < kMinIntervals + 1)
      throw Error(ErrorKind::StencilTooWide,
                  "a curve needs at least " + std::to_string(kMinIntervals + 1) + " nodes");
  }

  std::size_t intervals() const noexcept { return nodes_.size() - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double h() const noexcept { return 1.0 / static_cast<double>(intervals()); }

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  std::vector<Point>& nodes() noexcept { return nodes_; }
  const Point& operator[](std::size_t i) const { return nodes_[i]; }
  Point& operator[](std::size_t i) { return nodes_[i]; }
  const Point& front() const { return nodes_.front(); }
  const Point& back() const { return nodes_.back(); }

  friend bool operator==(const DiscreteCurve& a, const DiscreteCurve& b) {
    if (a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i)
      if (a.nodes_[i].x != b.nodes_[i].x || a.nodes_[i].y != b.nodes_[i].y) return false;
    return true;
  }

 private:
  std::vector<Point> nodes_;
};

/// Largest nodewise Euclidean distance between two curves on the same grid.
inline double max_node_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::GridMismatch, "curves have different node counts");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]));
  return m;
}

}  // namespace elasticflow
