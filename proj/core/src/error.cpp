#include "conman/error.hpp"

#include <fmt/format.h>

namespace conman {

ParseError::ParseError(std::string path, std::size_t line, const std::string& what)
    : Error(fmt::format("{}:{}: {}", path, line, what)), path_(std::move(path)), line_(line) {}

}  // namespace conman
