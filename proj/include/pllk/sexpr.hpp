#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pllk {

struct SyntaxError : std::runtime_error {
    std::size_t offset;
    SyntaxError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " at byte " + std::to_string(off)), offset(off) {}
};

// Minimal s-expression tree. `(...)` and `[...]` are distinct list kinds so
// sequents can be written as bracketed lists inside proof terms.
struct Sexp {
    enum class Type { Atom, List, Bracket };
    Type type = Type::Atom;
    std::string atom;
    std::vector<Sexp> items;
    std::size_t offset = 0;

    bool is_atom() const { return type == Type::Atom; }
    bool is_list() const { return type == Type::List; }
    bool is_bracket() const { return type == Type::Bracket; }
    bool is_atom(std::string_view s) const { return is_atom() && atom == s; }
    // head atom of a list, or "" when absent
    const std::string& head() const;
};

// Parses exactly one expression (trailing whitespace and `;` comments allowed).
Sexp read_sexp(std::string_view text);
// Parses a sequence of top-level expressions.
std::vector<Sexp> read_all(std::string_view text);

}  // namespace pllk
