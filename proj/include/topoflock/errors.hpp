#pragma once

#include <stdexcept>
#include <string>

namespace topoflock {

/// Base class for all topoflock failures.
class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller violated a documented precondition (bad axis, bad range, ...).
class argument_error : public error {
public:
  explicit argument_error(const std::string& msg) : error(msg) {}
};

/// Config text could not be parsed; carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(const std::string& msg, int line)
      : error("parse error at line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// A resolved config value violates a constraint; names the offending key.
class constraint_error : public error {
public:
  constraint_error(const std::string& key, const std::string& msg)
      : error("constraint violation for '" + key + "': " + msg), key_(key) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

/// Density dipped to or below the vacuum floor; the kernel is undefined there.
class vacuum_error : public error {
public:
  explicit vacuum_error(const std::string& msg) : error(msg) {}
};

/// x == y handed to a pairwise geometric quantity.
class degenerate_pair_error : public error {
public:
  explicit degenerate_pair_error(const std::string& msg) : error(msg) {}
};

/// Kernel evaluation requested at zero separation.
class singular_point_error : public error {
public:
  explicit singular_point_error(const std::string& msg) : error(msg) {}
};

/// A kernel cache was used with a density it was not built from.
class consistency_error : public error {
public:
  explicit consistency_error(const std::string& msg) : error(msg) {}
};

/// Non-finite values appeared during time stepping; records when and where.
class blowup_error : public error {
public:
  blowup_error(double t, const std::string& field)
      : error("non-finite values in '" + field + "' at t = " + std::to_string(t)),
        t_(t), field_(field) {}
  double t() const { return t_; }
  const std::string& field() const { return field_; }

private:
  double t_;
  std::string field_;
};

/// Operation only defined in one spatial dimension.
class unsupported_dimension_error : public error {
public:
  explicit unsupported_dimension_error(const std::string& msg) : error(msg) {}
};

class io_error : public error {
public:
  explicit io_error(const std::string& msg) : error(msg) {}
};

} // namespace topoflock
