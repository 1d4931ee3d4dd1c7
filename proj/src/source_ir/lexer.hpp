#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cogref/source_ir/token.hpp"

namespace cogref::source_ir::detail {

// One logical line: a run of tokens ended by a newline outside brackets.
struct LogicalLine {
    std::size_t first = 0;  // token index
    std::size_t last = 0;   // exclusive
    std::string indent;     // leading whitespace of the first physical line
    int line = 1;
};

struct LexedSource {
    TokenStream stream;
    std::vector<LogicalLine> lines;
};

LexedSource lex(std::string_view source);

}  // namespace cogref::source_ir::detail
