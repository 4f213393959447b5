#pragma once
#include <stdexcept>
#include <string>
#include <string_view>

namespace morsekit {

enum class Errc {
  domain,             // argument outside an operation's domain
  singular_parameter, // a recursion denominator vanished
  invalid_parameter,  // parameters outside the admissible region
  tra_inadmissible,   // A < -lambda^2 q^2 / 8
  wrong_branch,       // C = 0 vs C > 0 branch mismatch
  basis_exhausted,    // empty finite Jacobi basis at this energy
  not_found,          // target outside the fitted range
  insufficient_data,
  contract,
  numerical_failure
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
  case Errc::domain: return "domain";
  case Errc::singular_parameter: return "singular_parameter";
  case Errc::invalid_parameter: return "invalid_parameter";
  case Errc::tra_inadmissible: return "tra_inadmissible";
  case Errc::wrong_branch: return "wrong_branch";
  case Errc::basis_exhausted: return "basis_exhausted";
  case Errc::not_found: return "not_found";
  case Errc::insufficient_data: return "insufficient_data";
  case Errc::contract: return "contract";
  case Errc::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

//! Single exception type for the library; `code()` tells callers which
//! failure mode occurred. `index()` carries the offending eigen/level index
//! for numerical failures, -1 otherwise.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &what, int index = -1)
      : std::runtime_error(what), m_code(code), m_index(index) {}

  Errc code() const noexcept { return m_code; }
  int index() const noexcept { return m_index; }

private:
  Errc m_code;
  int m_index;
};

} // namespace morsekit
