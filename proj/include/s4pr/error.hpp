#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace s4pr {

// Domain error with a stable machine-readable code (used verbatim by the CLI).
class error : public std::runtime_error {
public:
  error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// Parse/IO failures map to a distinct process exit code; keep them apart.
class parse_error : public error {
public:
  parse_error(const std::string& message) : error("PARSE_ERROR", message) {}
};

class io_error : public error {
public:
  io_error(const std::string& message) : error("IO_ERROR", message) {}
};

// Non-fatal validation finding.
struct diagnostic {
  std::string code;
  std::string message;
};

} // namespace s4pr
