#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conman {

// Base of every error the toolkit throws on bad input. The CLI maps these
// to exit code 1; anything else escaping a subcommand is exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what);

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  IngestError(std::string offending_id, const std::string& what)
      : Error(what), offending_id_(std::move(offending_id)) {}

  const std::string& offending_id() const { return offending_id_; }

 private:
  std::string offending_id_;
};

class LedgerError : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

class UndefinedScore : public Error {
 public:
  using Error::Error;
};

class SweepFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace conman
