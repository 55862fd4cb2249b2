#ifndef CESR_TEXT_HPP
#define CESR_TEXT_HPP

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace cesr::text {

/// Shortest round-trip representation; byte-stable for identical values.
inline std::string format_double(double value)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{})
    return "nan";
  return std::string(buf, end);
}

inline std::string_view trim(std::string_view s)
{
  const auto* ws = " \t\r\n";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos)
    return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Whitespace-separated tokens.
inline std::vector<std::string_view> tokens(std::string_view s)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
      ++i;
    auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r')
      ++i;
    if (i > start)
      out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::vector<std::string_view> lines(std::string_view s)
{
  auto out = split(s, '\n');
  if (!out.empty() && out.back().empty())
    out.pop_back();
  return out;
}

inline std::optional<double> parse_double(std::string_view s)
{
  s = trim(s);
  double value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return value;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s)
{
  s = trim(s);
  std::uint64_t value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return value;
}

inline std::optional<bool> parse_bool(std::string_view s)
{
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on")
    return true;
  if (s == "false" || s == "0" || s == "no" || s == "off")
    return false;
  return std::nullopt;
}

template<typename... Parts>
std::string join_csv(const Parts&... parts)
{
  std::string out;
  bool first = true;
  auto add = [&](const auto& p) {
    if (!first)
      out += ',';
    first = false;
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(p);
    else if constexpr (std::is_integral_v<T>)
      out += std::to_string(p);
    else
      out += p;
  };
  (add(parts), ...);
  out += '\n';
  return out;
}

} // namespace cesr::text

#endif // CESR_TEXT_HPP
