#include "entangle/ket_parser.hpp"

#include "entangle/state_ops.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace entangle {

namespace {

// ---------- ket expression tokenizer ----------

struct Token {
    enum Kind { Number, Imag, Sqrt, Dims, Ket, Plus, Minus, Star, Slash, LParen, RParen, Colon, Semi, End };
    Kind kind = End;
    std::string text;   // digits for Ket
    double number = 0.0;
    int line = 1;
    int column = 1;
};

const char* kind_name(Token::Kind k) {
    switch (k) {
        case Token::Number: return "number";
        case Token::Imag: return "'i'";
        case Token::Sqrt: return "'sqrt'";
        case Token::Dims: return "'dims'";
        case Token::Ket: return "ket";
        case Token::Plus: return "'+'";
        case Token::Minus: return "'-'";
        case Token::Star: return "'*'";
        case Token::Slash: return "'/'";
        case Token::LParen: return "'('";
        case Token::RParen: return "')'";
        case Token::Colon: return "':'";
        case Token::Semi: return "';'";
        case Token::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                t.kind = Token::End;
                out.push_back(t);
                return out;
            }
            const char c = text_[pos_];
            if (c == '|') {
                advance();
                std::string digits;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    digits.push_back(text_[pos_]);
                    advance();
                }
                if (digits.empty())
                    throw SyntaxError("expected digits inside ket", line_, column_);
                if (pos_ >= text_.size() || text_[pos_] != '>')
                    throw SyntaxError("unterminated ket, expected '>'", line_, column_);
                advance();
                t.kind = Token::Ket;
                t.text = std::move(digits);
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                t.kind = Token::Number;
                t.number = lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                std::string word;
                while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
                    word.push_back(text_[pos_]);
                    advance();
                }
                if (word == "i") t.kind = Token::Imag;
                else if (word == "sqrt") t.kind = Token::Sqrt;
                else if (word == "dims") t.kind = Token::Dims;
                else throw SyntaxError("unknown word '" + word + "'", t.line, t.column);
            } else {
                switch (c) {
                    case '+': t.kind = Token::Plus; break;
                    case '-': t.kind = Token::Minus; break;
                    case '*': t.kind = Token::Star; break;
                    case '/': t.kind = Token::Slash; break;
                    case '(': t.kind = Token::LParen; break;
                    case ')': t.kind = Token::RParen; break;
                    case ':': t.kind = Token::Colon; break;
                    case ';': t.kind = Token::Semi; break;
                    default:
                        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, column_);
                }
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
                advance();
            else
                break;
        }
    }

    double lex_number(const Token& at) {
        std::string digits;
        bool any_digit = false;
        auto take_digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                digits.push_back(text_[pos_]);
                any_digit = true;
                advance();
            }
        };
        take_digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            digits.push_back('.');
            advance();
            take_digits();
        }
        if (!any_digit) throw SyntaxError("malformed number", at.line, at.column);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            int save_line = line_, save_col = column_;
            std::string exp(1, text_[pos_]);
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                exp.push_back(text_[pos_]);
                advance();
            }
            bool exp_digit = false;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                exp.push_back(text_[pos_]);
                exp_digit = true;
                advance();
            }
            if (exp_digit) {
                digits += exp;
            } else {
                pos_ = save;  // the 'e' belongs to something else
                line_ = save_line;
                column_ = save_col;
            }
        }
        try {
            return std::stod(digits);
        } catch (const std::out_of_range&) {
            throw SyntaxError("number literal out of range", at.line, at.column);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

// ---------- evaluation values ----------

// A partially evaluated expression: either a scalar or a sparse state with
// amplitudes keyed by digit strings (one char per party).
struct Value {
    bool is_state = false;
    Complex scalar{0.0, 0.0};
    int arity = 0;
    std::map<std::string, Complex> terms;
};

class KetParser {
public:
    KetParser(std::vector<Token> tokens, const Limits& limits)
        : tokens_(std::move(tokens)), limits_(limits) {}

    ParsedState run() {
        std::vector<int> header_dims;
        bool have_header = false;
        if (peek().kind == Token::Dims) {
            have_header = true;
            next();
            expect(Token::Colon);
            while (peek().kind == Token::Number) {
                const Token t = next();
                const double d = t.number;
                if (d != std::floor(d) || d < 2 || d > 1e9)
                    throw SyntaxError("dimension must be an integer >= 2", t.line, t.column);
                header_dims.push_back(static_cast<int>(d));
            }
            if (header_dims.empty())
                throw SyntaxError("dims header needs at least one dimension", peek().line, peek().column);
            expect(Token::Semi);
        }

        Value v = parse_sum();
        if (peek().kind != Token::End)
            throw SyntaxError(std::string("unexpected ") + kind_name(peek().kind), peek().line,
                              peek().column);
        if (!v.is_state)
            throw SyntaxError("expression evaluates to a scalar, expected at least one ket", 1, 1);

        return build_state(v, have_header ? &header_dims : nullptr);
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token next() { return tokens_[pos_++]; }

    Token expect(Token::Kind kind) {
        if (peek().kind != kind)
            throw SyntaxError(std::string("expected ") + kind_name(kind) + ", found " +
                                  kind_name(peek().kind),
                              peek().line, peek().column);
        return next();
    }

    Value parse_sum() {
        double sign = 1.0;
        if (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            if (next().kind == Token::Minus) sign = -1.0;
        }
        Value v = scale(parse_product(), sign);
        while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            const Token op = next();
            const Token rhs_at = peek();  // report mismatches at the offending term
            Value rhs = parse_product();
            v = add(std::move(v), std::move(rhs), op.kind == Token::Minus, rhs_at);
        }
        return v;
    }

    Value parse_product() {
        Value v = parse_atom();
        while (peek().kind == Token::Star || peek().kind == Token::Slash) {
            const Token op = next();
            Value rhs = parse_atom();
            if (op.kind == Token::Star) {
                v = multiply(std::move(v), std::move(rhs), op);
            } else {
                if (rhs.is_state)
                    throw SyntaxError("'/' needs a scalar divisor", op.line, op.column);
                if (std::abs(rhs.scalar) == 0.0)
                    throw SyntaxError("division by zero", op.line, op.column);
                v = scale(std::move(v), 1.0 / rhs.scalar);
            }
        }
        return v;
    }

    Value parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Number: {
                Value v;
                v.scalar = next().number;
                return v;
            }
            case Token::Imag: {
                next();
                Value v;
                v.scalar = Complex(0.0, 1.0);
                return v;
            }
            case Token::Sqrt: {
                next();
                expect(Token::LParen);
                Value inner = parse_sum();
                const Token close = expect(Token::RParen);
                if (inner.is_state)
                    throw SyntaxError("sqrt() needs a scalar argument", close.line, close.column);
                Value v;
                v.scalar = std::sqrt(inner.scalar);
                return v;
            }
            case Token::Ket: {
                const Token ket = next();
                Value v;
                v.is_state = true;
                v.arity = static_cast<int>(ket.text.size());
                check_arity_cap(v.arity, ket);
                v.terms.emplace(ket.text, Complex(1.0, 0.0));
                return v;
            }
            case Token::LParen: {
                next();
                Value v = parse_sum();
                expect(Token::RParen);
                return v;
            }
            default:
                throw SyntaxError(std::string("expected '|', '(', number, 'i' or 'sqrt', found ") +
                                      kind_name(t.kind),
                                  t.line, t.column);
        }
    }

    static Value scale(Value v, Complex factor) {
        if (v.is_state) {
            for (auto& [key, amp] : v.terms) amp *= factor;
        } else {
            v.scalar *= factor;
        }
        return v;
    }

    Value add(Value a, Value b, bool subtract, const Token& at) {
        if (!a.is_state && !b.is_state) {
            a.scalar += subtract ? -b.scalar : b.scalar;
            return a;
        }
        if (a.is_state != b.is_state)
            throw SyntaxError("cannot add a scalar and a state", at.line, at.column);
        if (a.arity != b.arity)
            throw ArityMismatchError("cannot add kets with " + std::to_string(a.arity) + " and " +
                                         std::to_string(b.arity) + " parties",
                                     at.line, at.column);
        const Complex s = subtract ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
        for (const auto& [key, amp] : b.terms) a.terms[key] += s * amp;
        return a;
    }

    Value multiply(Value a, Value b, const Token& at) {
        if (!a.is_state && !b.is_state) {
            a.scalar *= b.scalar;
            return a;
        }
        if (!a.is_state) return scale(std::move(b), a.scalar);
        if (!b.is_state) return scale(std::move(a), b.scalar);

        // tensor product of two sparse states
        check_arity_cap(a.arity + b.arity, at);
        if (a.terms.size() * b.terms.size() > limits_.max_total_dim)
            throw SizeLimitError("tensor product expands past the configured size cap (at line " +
                                 std::to_string(at.line) + ")");
        Value out;
        out.is_state = true;
        out.arity = a.arity + b.arity;
        for (const auto& [ka, va] : a.terms)
            for (const auto& [kb, vb] : b.terms) out.terms[ka + kb] += va * vb;
        return out;
    }

    // Every party has dimension >= 2, so n parties need at least 2^n
    // amplitudes; reject early, before any dense allocation.
    void check_arity_cap(int arity, const Token& at) const {
        if (arity > 63 || (std::uint64_t{1} << arity) > limits_.max_total_dim)
            throw SizeLimitError("ket with " + std::to_string(arity) +
                                 " parties exceeds the configured size cap (at line " +
                                 std::to_string(at.line) + ")");
    }

    ParsedState build_state(const Value& v, const std::vector<int>* header_dims) {
        const int n = v.arity;
        std::vector<int> dims;
        if (header_dims) {
            if (static_cast<int>(header_dims->size()) != n)
                throw ArityMismatchError("dims header lists " + std::to_string(header_dims->size()) +
                                             " parties but kets have " + std::to_string(n),
                                         1, 1);
            dims = *header_dims;
        } else {
            dims.assign(static_cast<std::size_t>(n), 2);
        }
        for (const auto& [key, amp] : v.terms) {
            for (int k = 0; k < n; ++k) {
                const int digit = key[static_cast<std::size_t>(k)] - '0';
                if (header_dims) {
                    if (digit >= dims[static_cast<std::size_t>(k)])
                        throw SyntaxError("ket digit " + std::to_string(digit) +
                                              " exceeds declared dimension " +
                                              std::to_string(dims[static_cast<std::size_t>(k)]) +
                                              " of party " + std::to_string(k + 1),
                                          1, 1);
                } else if (digit + 1 > dims[static_cast<std::size_t>(k)]) {
                    dims[static_cast<std::size_t>(k)] = digit + 1;
                }
            }
        }

        SystemShape shape(dims, limits_);
        Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(shape.total_dim()));
        for (const auto& [key, amp] : v.terms) {
            std::size_t index = 0;
            for (int k = 0; k < n; ++k)
                index += static_cast<std::size_t>(key[static_cast<std::size_t>(k)] - '0') * shape.stride(k);
            amps(static_cast<Eigen::Index>(index)) += amp;
        }

        ParsedState out{normalize(shape, amps), amps.norm()};
        return out;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Limits limits_;
};

// ---------- amplitude table ----------

// Strips a trailing comment and surrounding whitespace.
std::string clean_line(std::string line) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    return line.substr(start);
}

}  // namespace

ParsedState parse_ket_expression(std::string_view text, const Limits& limits) {
    Lexer lexer(text);
    KetParser parser(lexer.run(), limits);
    return parser.run();
}

ParsedState parse_amplitude_table(std::string_view text, const Limits& limits) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;

    std::vector<int> dims;
    bool have_header = false;
    std::optional<SystemShape> shape;
    Eigen::VectorXcd amps;
    std::unordered_set<std::size_t> seen;

    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = clean_line(raw);
        if (line.empty()) continue;

        if (!have_header) {
            if (line.rfind("dims:", 0) != 0)
                throw BadHeaderError("first line must be a 'dims: d_1 ... d_n' header", lineno, 1);
            std::istringstream ls(line.substr(5));
            long d = 0;
            while (ls >> d) {
                if (d < 2) throw BadHeaderError("every dimension must be >= 2", lineno, 1);
                dims.push_back(static_cast<int>(d));
            }
            if (!ls.eof())
                throw BadHeaderError("dims header contains a non-integer token", lineno, 1);
            if (dims.empty()) throw BadHeaderError("dims header lists no dimensions", lineno, 1);
            shape.emplace(dims, limits);
            amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(shape->total_dim()));
            have_header = true;
            continue;
        }

        std::istringstream ls(line);
        const int n = shape->num_parties();
        std::size_t index = 0;
        for (int k = 0; k < n; ++k) {
            long i = 0;
            if (!(ls >> i))
                throw SyntaxError("expected " + std::to_string(n) + " indices and re/im values", lineno, 1);
            if (i < 0 || i >= shape->dim(k))
                throw IndexOutOfRangeError("index " + std::to_string(i) + " out of range for party " +
                                               std::to_string(k + 1) + " (dimension " +
                                               std::to_string(shape->dim(k)) + ")",
                                           lineno, 1);
            index += static_cast<std::size_t>(i) * shape->stride(k);
        }
        double re = 0.0, im = 0.0;
        if (!(ls >> re >> im))
            throw SyntaxError("expected real and imaginary amplitude values", lineno, 1);
        std::string extra;
        if (ls >> extra)
            throw SyntaxError("unexpected trailing token '" + extra + "'", lineno, 1);
        if (!seen.insert(index).second)
            throw DuplicateEntryError("duplicate amplitude entry for this index tuple", lineno, 1);
        amps(static_cast<Eigen::Index>(index)) = Complex(re, im);
    }

    if (!have_header) throw BadHeaderError("input has no 'dims:' header line", lineno ? lineno : 1, 1);
    return ParsedState{normalize(*shape, amps), amps.norm()};
}

std::string serialize_state(const PureState& state, double threshold) {
    std::ostringstream out;
    const SystemShape& shape = state.shape();
    out << "dims:";
    for (int d : shape.dims()) out << ' ' << d;
    out << '\n';

    char buf[64];
    for (std::size_t x = 0; x < shape.total_dim(); ++x) {
        const Complex a = state.amplitude(x);
        if (std::abs(a) < threshold) continue;
        for (int k = 0; k < shape.num_parties(); ++k) {
            if (k) out << ' ';
            out << shape.digit(x, k);
        }
        std::snprintf(buf, sizeof buf, " %.17g %.17g", a.real(), a.imag());
        out << buf << '\n';
    }
    return out.str();
}

}  // namespace entangle
