#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oddevo {

// Base for every error raised by the library. `code()` is the stable
// identifier used on the wire ("validation", "conflict", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error("validation", join(problems)), problems_(std::move(problems)) {}
  explicit ValidationError(const std::string& problem)
      : ValidationError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& message) : Error("conflict", message) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error("not_found", message) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message) : Error("integrity", message) {}
};

class EnactmentError : public Error {
 public:
  explicit EnactmentError(const std::string& message) : Error("enactment", message) {}
};

// Transport-level failure talking to a remote warehouse; callers may retry.
class UnavailableError : public Error {
 public:
  explicit UnavailableError(const std::string& message) : Error("unavailable", message) {}
};

}  // namespace oddevo
