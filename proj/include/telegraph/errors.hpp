#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace telegraph {

/// Invalid parameters or arguments outside the supported domain.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A result would not be representable as a finite double.
class overflow_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A series did not reach its tolerance within the term budget.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double achieved, std::size_t terms)
      : std::runtime_error(what + " (achieved relative bound " + std::to_string(achieved) +
                           " after " + std::to_string(terms) + " terms)"),
        achieved_(achieved),
        terms_(terms) {}

  double achieved() const noexcept { return achieved_; }
  std::size_t terms() const noexcept { return terms_; }

 private:
  double achieved_;
  std::size_t terms_;
};

/// Quadrature or other numerical procedure failed to meet its tolerance.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The damped process has no stationary law unless lambda*v == mu*c.
class no_stationary_law : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw domain_error(msg);
}

}  // namespace detail
}  // namespace telegraph
