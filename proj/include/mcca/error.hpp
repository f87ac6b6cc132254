#ifndef MCCA_ERROR_HPP
#define MCCA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mcca {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Usage = 1,      // bad configuration or arguments
  Data = 2,       // unreadable, malformed or inconsistent input data
  Numerical = 3,  // a decomposition or fit could not be carried out
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::Data, what}; }
inline Error numerical_error(const std::string& what) { return {ErrorKind::Numerical, what}; }

}  // namespace mcca

#endif  // MCCA_ERROR_HPP
