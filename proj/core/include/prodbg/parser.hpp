// Reader for the supported Prolog subset. Unsupported constructs (floats,
// strings, 0'c character codes) raise UnsupportedError; everything else that
// fails to parse raises ParseError with a 1-based source position.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace prodbg {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col),
        message(msg) {}
  int line;
  int col;
  std::string message;
};

class UnsupportedError : public ParseError {
 public:
  UnsupportedError(int line, int col, const std::string& construct)
      : ParseError(line, col, "unsupported construct: " + construct),
        construct(construct) {}
  std::string construct;
};

Program parse_program(const std::string& text);

// Parses a goal sequence terminated by '.'; an optional leading '?-' is
// accepted. Conjunctions are flattened into the returned goal list.
std::vector<TermPtr> parse_query(const std::string& text);

// Parses a single term terminated by '.' (no goal validation).
TermPtr parse_term_text(const std::string& text);

}  // namespace prodbg
