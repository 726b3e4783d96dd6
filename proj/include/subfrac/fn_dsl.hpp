// Test-function descriptor DSL.
//
// Grammar:  fn     := name '(' kv-list? ')'
//           kv-list:= kv (';' kv)*
//           kv     := key '=' value
//           value  := number | '[' number (',' number)* ']' | fn
// Numbers are decimal; parse errors carry the byte offset.  The parser and
// TestFunction::descriptor() round-trip: parse(print) = id.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "subfrac/hgroup.hpp"
#include "subfrac/testfun.hpp"

namespace subfrac {

class DslError : public std::runtime_error {
  public:
    DslError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " at byte " + std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Parse a descriptor into a test function bound to the group (needed for
// shift lengths and translation).  Known names: gaussian, poly_gauss,
// koranyi_gauss, koranyi_gauss_x6, left_translate.
TestFunctionPtr parse_testfun(const GroupConfig& g, const std::string& text);

}  // namespace subfrac
