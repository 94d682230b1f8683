#pragma once

#include <stdexcept>
#include <string>

namespace tds {

// Input outside the stated parameter range. The message names the bound.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Point lies on a multi-valued edge of the parameter cube; the caller has to
// pick a limit explicitly (see limit_state).
class singular_limit_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Canonical point without a heralding preimage (p >= d, d = 0 or q = 0).
class no_preimage_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class non_convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tds
