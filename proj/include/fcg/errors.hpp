#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fcg {

/// Base of every error thrown by the toolkit. `error_class()` is a stable,
/// machine-parsable tag that the command-line front end maps to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* error_class() const noexcept { return "error"; }
};

#define FCG_DEFINE_ERROR(Name, tag)                                                   \
  class Name : public Error {                                                         \
   public:                                                                            \
    using Error::Error;                                                               \
    [[nodiscard]] const char* error_class() const noexcept override { return tag; }   \
  }

/// Argument outside the validity range of a formula or type invariant.
FCG_DEFINE_ERROR(DomainError, "domain");
/// Operand shapes disagree.
FCG_DEFINE_ERROR(ShapeError, "shape");
/// Zero crack driving force: the crack cannot advance (infinite life).
FCG_DEFINE_ERROR(NonPropagatingError, "non_propagating");
/// Both SIFs vanish, so the kink direction is undefined.
FCG_DEFINE_ERROR(UndefinedDirectionError, "undefined_direction");
/// Training loss became non-finite.
FCG_DEFINE_ERROR(DivergenceError, "divergence");
/// Regression targets have zero variance.
FCG_DEFINE_ERROR(DegenerateTargetError, "degenerate_target");
/// A non-finite gradient reached the optimizer.
FCG_DEFINE_ERROR(PoisonedUpdateError, "poisoned_update");
/// Filesystem failure (unwritable directory, unreadable file).
FCG_DEFINE_ERROR(IoError, "io");

#undef FCG_DEFINE_ERROR

/// Invalid configuration value; `field()` is the dotted path, e.g. `slicing.n_slices`.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  [[nodiscard]] const char* error_class() const noexcept override { return "config"; }
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Failure while reading a library or model bundle from disk.
class LoadError : public Error {
 public:
  enum class Kind { version_mismatch, truncated, checksum, missing_part, malformed };

  LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const char* error_class() const noexcept override {
    switch (kind_) {
      case Kind::version_mismatch: return "version_mismatch";
      case Kind::truncated: return "truncated";
      case Kind::checksum: return "checksum";
      case Kind::missing_part: return "missing_part";
      case Kind::malformed: return "malformed";
    }
    return "load";
  }

 private:
  Kind kind_;
};

}  // namespace fcg
