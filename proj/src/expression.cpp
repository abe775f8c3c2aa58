#include "gaugetherm/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>

#include "gaugetherm/errors.hpp"

namespace gaugetherm {

namespace {

using Fn = std::function<Complex(double)>;

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    Fn parse() {
        Fn e = expr();
        skip_space();
        if (pos_ != src_.size()) {
            fail("unexpected trailing input");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw SchemaError("expression error at position " + std::to_string(pos_) + ": " +
                          what + " in '" + src_ + "'");
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    Fn expr() {
        Fn lhs = term();
        while (true) {
            if (consume('+')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double t) { return lhs(t) + rhs(t); };
            } else if (consume('-')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double t) { return lhs(t) - rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    Fn term() {
        Fn lhs = factor();
        while (true) {
            if (consume('*')) {
                Fn rhs = factor();
                lhs = [lhs, rhs](double t) { return lhs(t) * rhs(t); };
            } else if (consume('/')) {
                Fn rhs = factor();
                lhs = [lhs, rhs](double t) { return lhs(t) / rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    // Power binds tighter than unary minus (-2^t is -(2^t)) and is
    // right-associative; the exponent may carry its own sign (2^-t).
    Fn factor() {
        if (consume('-')) {
            Fn inner = factor();
            return [inner](double t) { return -inner(t); };
        }
        if (consume('+')) return factor();
        return power();
    }

    Fn power() {
        Fn base = primary();
        if (consume('^')) {
            Fn exponent = factor();
            return [base, exponent](double t) { return std::pow(base(t), exponent(t)); };
        }
        return base;
    }

    Fn primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Fn inner = expr();
            if (!consume(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    Fn number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_ + 1;
            if (mark < src_.size() && (src_[mark] == '+' || src_[mark] == '-')) ++mark;
            if (mark < src_.size() && std::isdigit(static_cast<unsigned char>(src_[mark]))) {
                pos_ = mark;
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        try {
            value = std::stod(src_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            fail("malformed number");
        }
        return [value](double) { return Complex{value, 0.0}; };
    }

    Fn identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "t") return [](double t) { return Complex{t, 0.0}; };
        if (name == "i") return [](double) { return kImag; };
        if (name == "pi") return [](double) { return Complex{M_PI, 0.0}; };
        if (name == "e") return [](double) { return Complex{M_E, 0.0}; };

        if (!consume('(')) fail("unknown constant '" + name + "'");
        Fn arg = expr();
        if (!consume(')')) fail("missing ')' after " + name);
        if (name == "exp") return [arg](double t) { return std::exp(arg(t)); };
        if (name == "sin") return [arg](double t) { return std::sin(arg(t)); };
        if (name == "cos") return [arg](double t) { return std::cos(arg(t)); };
        if (name == "sqrt") return [arg](double t) { return std::sqrt(arg(t)); };
        fail("unknown function '" + name + "'");
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

}  // namespace

ScalarFn parse_scalar_expression(const std::string& source) {
    Parser parser(source);
    return ScalarFn(parser.parse());
}

Complex eval_expression(const std::string& source, double t) {
    return parse_scalar_expression(source)(t);
}

}  // namespace gaugetherm
