#include "pllk/sexpr.hpp"

#include <cctype>

namespace pllk {

const std::string& Sexp::head() const {
    static const std::string empty;
    if (is_atom() || items.empty() || !items.front().is_atom()) return empty;
    return items.front().atom;
}

namespace {

class Reader {
public:
    explicit Reader(std::string_view t) : s_(t) {}

    void skip() {
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i_;
            } else if (c == ';') {
                while (i_ < s_.size() && s_[i_] != '\n') ++i_;
            } else {
                break;
            }
        }
    }

    bool at_end() {
        skip();
        return i_ >= s_.size();
    }

    Sexp read() {
        skip();
        if (i_ >= s_.size()) throw SyntaxError("unexpected end of input", i_);
        Sexp e;
        e.offset = i_;
        char c = s_[i_];
        if (c == '(' || c == '[') {
            char close = c == '(' ? ')' : ']';
            e.type = c == '(' ? Sexp::Type::List : Sexp::Type::Bracket;
            ++i_;
            for (;;) {
                skip();
                if (i_ >= s_.size()) throw SyntaxError("unbalanced parenthesis: unexpected end of input", i_);
                if (s_[i_] == close) {
                    ++i_;
                    break;
                }
                if (s_[i_] == ')' || s_[i_] == ']') throw SyntaxError("mismatched closing bracket", i_);
                e.items.push_back(read());
            }
            return e;
        }
        if (c == ')' || c == ']') throw SyntaxError("unexpected closing bracket", i_);
        std::size_t start = i_;
        while (i_ < s_.size()) {
            char d = s_[i_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '[' || d == ']' ||
                d == ';')
                break;
            ++i_;
        }
        e.atom = std::string(s_.substr(start, i_ - start));
        return e;
    }

    std::size_t pos() const { return i_; }

private:
    std::string_view s_;
    std::size_t i_ = 0;
};

}  // namespace

Sexp read_sexp(std::string_view text) {
    Reader r(text);
    Sexp e = r.read();
    if (!r.at_end()) throw SyntaxError("trailing input", r.pos());
    return e;
}

std::vector<Sexp> read_all(std::string_view text) {
    Reader r(text);
    std::vector<Sexp> out;
    while (!r.at_end()) out.push_back(r.read());
    return out;
}

}  // namespace pllk
