#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cuelex {

/// Raised when caller-supplied data violates an operation's contract
/// (bad file, unknown token, degenerate input). The CLI maps it to exit 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Judge verdict attached to candidate words and graph nodes.
enum class Status { unrated, accepted, rejected };

std::string_view to_string(Status s);
Status parse_status(std::string_view text);

/// ASCII lowercase folding. Multibyte UTF-8 sequences pass through unchanged.
std::string fold(std::string_view text);

std::string_view trim(std::string_view text);

constexpr std::string_view kVersion = "0.4.1";

}  // namespace cuelex
