#include "cuelex/common.hpp"

#include <algorithm>

namespace cuelex {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::accepted: return "accepted";
    case Status::rejected: return "rejected";
    case Status::unrated: break;
  }
  return "unrated";
}

Status parse_status(std::string_view text) {
  const std::string t = fold(trim(text));
  if (t == "accepted" || t == "pos") return Status::accepted;
  if (t == "rejected" || t == "neg") return Status::rejected;
  if (t == "unrated" || t.empty()) return Status::unrated;
  throw InputError("unknown status '" + std::string(text) + "'");
}

std::string fold(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = text.find_last_not_of(ws);
  return text.substr(b, e - b + 1);
}

}  // namespace cuelex
