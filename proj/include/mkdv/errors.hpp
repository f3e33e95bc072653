#pragma once

#include <stdexcept>
#include <string>

namespace mkdv {

// Exit-code taxonomy used by the CLI: input_error -> 2, numerical_error -> 3.
// Library code throws these; nothing here catches.

struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mkdv
