#ifndef CESR_ERROR_HPP
#define CESR_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace cesr {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

class TimeRegression : public Error
{
public:
  TimeRegression(double last, double now)
    : Error("time regression: " + std::to_string(now) + " < " + std::to_string(last))
  {}
};

class SelfBeacon : public Error
{
public:
  explicit SelfBeacon(std::uint32_t node)
    : Error("node " + std::to_string(node) + " received its own beacon")
  {}
};

class ExhaustedAttempts : public Error
{
public:
  explicit ExhaustedAttempts(std::uint32_t attempts)
    : Error("no connected placement found after " + std::to_string(attempts) + " attempts")
    , attempts_(attempts)
  {}
  std::uint32_t attempts() const { return attempts_; }

private:
  std::uint32_t attempts_;
};

class ZeroDelivery : public Error
{
public:
  explicit ZeroDelivery(std::uint32_t run_index)
    : Error("run " + std::to_string(run_index) + " delivered no traffic")
    , run_index_(run_index)
  {}
  std::uint32_t run_index() const { return run_index_; }

private:
  std::uint32_t run_index_;
};

class MismatchedRuns : public Error
{
public:
  using Error::Error;
};

class SchemaError : public Error
{
public:
  using Error::Error;
};

/// Bad configuration value. line is 1-based, 0 when the value did not come
/// from a file line (defaults, programmatic configs).
class ConfigError : public Error
{
public:
  ConfigError(std::string field, const std::string& message, int line = 0, std::string source = {})
    : Error(compose(source, line, field, message))
    , field_(std::move(field))
    , message_(message)
    , line_(line)
    , source_(std::move(source))
  {}

  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  const std::string& source() const { return source_; }

  ConfigError at(int line, const std::string& source) const
  {
    return ConfigError(field_, message_, line, source);
  }

private:
  static std::string compose(const std::string& source, int line, const std::string& field,
                             const std::string& message)
  {
    std::string out;
    if (!source.empty())
      out += source + ":";
    if (line > 0)
      out += std::to_string(line) + ":";
    if (!out.empty())
      out += " ";
    if (!field.empty())
      out += "'" + field + "': ";
    return out + message;
  }

  std::string field_;
  std::string message_;
  int line_;
  std::string source_;
};

} // namespace cesr

#endif // CESR_ERROR_HPP
