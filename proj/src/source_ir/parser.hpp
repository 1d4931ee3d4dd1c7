#pragma once

#include "cogref/source_ir/syntax.hpp"
#include "lexer.hpp"

namespace cogref::source_ir {

// Module-level Suite for a lexed source. Throws ParseError.
SyntaxNode parse_module(const detail::LexedSource &lexed, bool strict);

}  // namespace cogref::source_ir
