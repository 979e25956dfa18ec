#pragma once

#include <stdexcept>
#include <string>

namespace suav {

/// Base for every domain failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyGrid : public Error {
 public:
  EmptyGrid() : Error("no collision-free grid node exists") {}
};

class NoPath : public Error {
 public:
  explicit NoPath(const std::string& why = "goal unreachable") : Error("no path: " + why) {}
};

class NodeInObstacle : public Error {
 public:
  explicit NodeInObstacle(const std::string& which) : Error(which + " is not a free grid node") {}
};

class BatteryDepleted : public Error {
 public:
  BatteryDepleted(double energy, double floor)
      : Error("battery below floor: " + std::to_string(energy) + " J < " + std::to_string(floor) + " J"),
        energy(energy),
        floor(floor) {}
  double energy;
  double floor;
};

class Unreachable : public Error {
 public:
  Unreachable() : Error("start is not in any reachable layer within the time horizon") {}
};

class PlanningFailed : public Error {
 public:
  explicit PlanningFailed(const std::string& why) : Error("planning failed: " + why) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("parse error at line " + std::to_string(line) + ": " + message), line(line) {}
  int line;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& reason)
      : Error("invalid " + field + ": " + reason), field(field) {}
  std::string field;
};

}  // namespace suav
