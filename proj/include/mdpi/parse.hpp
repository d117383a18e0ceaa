#pragma once

#include <stdexcept>
#include <string>

#include "mdpi/contract.hpp"
#include "mdpi/term.hpp"

namespace mdpi {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

/* Parses a system term ('#' starts a line comment).  Sort rules are
 * enforced: trace entities may not occur in monitor blocks, monitor-only
 * prefixes (query/sync/getI/setI/go/ok/fail) may not occur in plain
 * processes, and binder lists must be duplicate-free. */
TermPtr parse_system(const std::string& src);

/* Parses a contract expression; sum-binders are expanded into choices
 * (set elements in textual order, left-nested). */
ContractPtr parse_contract(const std::string& src);

}  // namespace mdpi
