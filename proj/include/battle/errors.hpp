#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace battle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document (map, scenario, record, transcript) could not be loaded.
/// `where()` names the offending feature, side, or JSON path.
class LoadError : public Error {
 public:
  LoadError(std::string where, const std::string& message)
      : Error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Rejected fork / merge / prune.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Unknown id, scenario, or action name.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace battle
