#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenobs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline Vec2 operator*(Vec2 a, double c) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
// rotate by +90 degrees
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

enum class ErrorKind {
  Argument,     // bad argument / precondition violated
  Range,        // requested value outside the reachable range
  Config,       // malformed configuration file
  Numeric,      // solver failure, non-finite values
  Resource,     // memory / size budget exceeded
  Unsupported,  // operation not available for this input kind
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& field, const std::string& msg)
      : Error(ErrorKind::Config,
              "config error (line " + std::to_string(line) +
                  (field.empty() ? "" : ", field '" + field + "'") + "): " + msg),
        line_(line),
        field_(field) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace eigenobs
