#ifndef PMET_ERROR_HPP
#define PMET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pmet {

/** Raised on malformed or out-of-range input. */
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/** A value that would have to be clamped to stay inside [0, top]. */
class RangeError : public InputError {
 public:
  using InputError::InputError;
};

/** A resource guard was hit (state-space size, pair count, enumeration size). */
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pmet

#endif
