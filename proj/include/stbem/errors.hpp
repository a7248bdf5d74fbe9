// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Error taxonomy. Exception classes are grouped by how the CLI reports
// them: configuration problems (exit 2), protocol infeasibility (exit 3)
// and numerical failures (exit 4).

#ifndef STBEM_ERRORS_HPP
#define STBEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stbem {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration input: unknown keys, unparsable values, missing files.
class config_error : public error {
 public:
  explicit config_error(const std::string& msg) : error(msg) {}
};

/// The requested protocol cannot be realized: grouping, pilot schedules,
/// identifiability, reciprocity mapping range.
class infeasibility_error : public error {
 public:
  explicit infeasibility_error(const std::string& msg) : error(msg) {}
};

/// Pilot schedule construction failure (index spacing, divisibility).
class schedule_error : public infeasibility_error {
 public:
  explicit schedule_error(const std::string& msg) : infeasibility_error(msg) {}
};

/// Not enough observations to identify the unknowns.
class identifiability_error : public infeasibility_error {
 public:
  explicit identifiability_error(const std::string& msg)
      : infeasibility_error(msg) {}
};

/// Scaled signature endpoint leaves the valid bin range.
class reciprocity_error : public infeasibility_error {
 public:
  explicit reciprocity_error(const std::string& msg)
      : infeasibility_error(msg) {}
};

/// Numerical failure during computation.
class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& msg) : error(msg) {}
};

/// Rank-deficient least-squares system.
class rank_error : public numerical_error {
 public:
  explicit rank_error(const std::string& msg) : numerical_error(msg) {}
};

/// Sampling too slow for the requested Doppler band.
class aliasing_error : public numerical_error {
 public:
  explicit aliasing_error(const std::string& msg) : numerical_error(msg) {}
};

/// Matrix or vector dimensions violate an operation's contract.
class invalid_dimension : public numerical_error {
 public:
  explicit invalid_dimension(const std::string& msg) : numerical_error(msg) {}
};

/// Index outside its valid range.
class index_error : public numerical_error {
 public:
  explicit index_error(const std::string& msg) : numerical_error(msg) {}
};

/// Argument value outside the operation's domain.
class domain_error : public numerical_error {
 public:
  explicit domain_error(const std::string& msg) : numerical_error(msg) {}
};

/// Input is degenerate for the requested operation (e.g. all-zero vector).
class degenerate_input : public numerical_error {
 public:
  explicit degenerate_input(const std::string& msg) : numerical_error(msg) {}
};

}  // namespace stbem

#endif  // STBEM_ERRORS_HPP
