#ifndef SDL_ERROR_HPP
#define SDL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sdl {

// Exit codes of the command line tool map onto these three families.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace sdl

#endif
