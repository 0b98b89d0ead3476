#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ridepool {

enum class Errc {
  io_error,
  parse_error,
  invalid_argument,
  malformed_record,
  duplicate_arc,
  self_loop,
  nonpositive_length,
  node_gap,
  nonpositive_speed,
  unreachable,
  bin_not_covered,
  missing_arc_prize,
  instance_too_large,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ridepool
