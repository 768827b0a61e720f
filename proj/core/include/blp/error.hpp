#pragma once

#include <stdexcept>
#include <string>

namespace blp {

/// A caller supplied a parameter outside its documented range.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on shapes or presence of inputs was violated.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), message_(what), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }
    /// The message without the epoch suffix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    int epoch_;
};

}  // namespace blp
