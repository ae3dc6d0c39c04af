#pragma once

#include <stdexcept>
#include <string>

#include "fmpp/fmpp.h"

namespace fmppcli {

/// CLI-side failure carrying the status code used as the exit code.
class CliError : public std::runtime_error {
 public:
  CliError(fmpp_status code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  fmpp_status code() const { return code_; }

 private:
  fmpp_status code_;
};

/// Raises when a library call failed, forwarding code and message.
inline void check(fmpp_status s) {
  if (s != FMPP_OK) throw CliError(s, fmpp_last_error_message());
}

}  // namespace fmppcli
