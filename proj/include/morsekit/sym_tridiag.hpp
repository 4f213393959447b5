#pragma once
#include "morsekit/error.hpp"
#include <cstddef>
#include <vector>

namespace morsekit {

//! Real symmetric tridiagonal matrix: `diag` has n entries, `sub` has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> sub;

  SymTridiag() = default;
  SymTridiag(std::vector<double> d, std::vector<double> s)
      : diag(std::move(d)), sub(std::move(s)) {
    if (diag.empty() || sub.size() + 1 != diag.size())
      throw Error(Errc::contract, "SymTridiag: need n >= 1 diagonal and n-1 "
                                  "subdiagonal entries");
  }

  std::size_t size() const noexcept { return diag.size(); }

  //! Leading k x k block.
  SymTridiag leading(std::size_t k) const {
    if (k == 0 || k > size())
      throw Error(Errc::contract, "SymTridiag::leading: bad block size");
    return {std::vector<double>(diag.begin(), diag.begin() + long(k)),
            std::vector<double>(sub.begin(), sub.begin() + long(k - 1))};
  }
};

} // namespace morsekit
