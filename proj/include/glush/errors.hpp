#ifndef glush_errors_hpp
#define glush_errors_hpp

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glush {

// Pattern could not be parsed. `offset` is the byte offset at which the
// problem was detected (end of input for unterminated constructs).
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

// A caller violated a documented precondition (unsorted input set,
// wrong node kind, ...). Never thrown on well-formed calls.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Invalid index interval passed to a range query.
class RangeError : public std::logic_error {
public:
    explicit RangeError(const std::string& what) : std::logic_error(what) {}
};

} // namespace glush

#endif
