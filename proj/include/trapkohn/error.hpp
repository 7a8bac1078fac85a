#pragma once

#include <stdexcept>
#include <string>

namespace trapkohn {

/// Input outside the domain of a formula (bad parameters, positions outside
/// the Fermi sea, unstable couplings, coarse grids).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A response function evaluated exactly on a real-axis pole, or a closed-form
/// expression evaluated where it is singular.
class PoleError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Time-domain integration failed (CFL violation, NaN, transient not decayed).
class IntegrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace trapkohn
