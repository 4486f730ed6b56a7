#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chnc {

enum class ErrorKind {
  config,     // bad parameters or an unsatisfiable configuration
  data,       // malformed input files, IO failures
  invariant,  // contract violation inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void config_error(const std::string& msg) {
  throw Error(ErrorKind::config, msg);
}

[[noreturn]] inline void data_error(const std::string& msg) {
  throw Error(ErrorKind::data, msg);
}

[[noreturn]] inline void contract_violation(const std::string& msg) {
  throw Error(ErrorKind::invariant, msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) contract_violation(msg);
}

/// Runs `fn`, prefixing the message of any chnc::Error with `stage`.
template <typename Fn>
decltype(auto) with_stage(const std::string& stage, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (const Error& e) {
    throw Error(e.kind(), "[" + stage + "] " + e.what());
  }
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::invariant: return 4;
  }
  return 4;
}

}  // namespace chnc
