#include "flowlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "flowlab/errors.hpp"

namespace flowlab {

struct Expr::Node {
    enum class Op { Num, Var, Neg, Not, Add, Sub, Mul, Div, Mod, Pow, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Cond, Call };
    Op op = Op::Num;
    double value = 0.0;
    std::size_t slot = 0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> kids) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    NodePtr parse() {
        NodePtr r = ternary();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return r;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw DomainError("expression '" + s_ + "': " + msg + " at offset " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(const char* tok) {
        skip();
        std::size_t n = std::char_traits<char>::length(tok);
        if (s_.compare(i_, n, tok) == 0) {
            i_ += n;
            return true;
        }
        return false;
    }

    NodePtr ternary() {
        NodePtr c = logic_or();
        if (eat("?")) {
            NodePtr a = ternary();
            if (!eat(":")) fail("expected ':'");
            NodePtr b = ternary();
            return make(Op::Cond, {c, a, b});
        }
        return c;
    }
    NodePtr logic_or() {
        NodePtr l = logic_and();
        while (eat("||")) l = make(Op::Or, {l, logic_and()});
        return l;
    }
    NodePtr logic_and() {
        NodePtr l = compare();
        while (eat("&&")) l = make(Op::And, {l, compare()});
        return l;
    }
    NodePtr compare() {
        NodePtr l = additive();
        if (eat("<=")) return make(Op::Le, {l, additive()});
        if (eat(">=")) return make(Op::Ge, {l, additive()});
        if (eat("==")) return make(Op::Eq, {l, additive()});
        if (eat("!=")) return make(Op::Ne, {l, additive()});
        if (eat("<")) return make(Op::Lt, {l, additive()});
        if (eat(">")) return make(Op::Gt, {l, additive()});
        return l;
    }
    NodePtr additive() {
        NodePtr l = multiplicative();
        for (;;) {
            if (eat("+")) l = make(Op::Add, {l, multiplicative()});
            else if (eat("-")) l = make(Op::Sub, {l, multiplicative()});
            else return l;
        }
    }
    NodePtr multiplicative() {
        NodePtr l = unary();
        for (;;) {
            if (eat("*")) l = make(Op::Mul, {l, unary()});
            else if (eat("/")) l = make(Op::Div, {l, unary()});
            else if (eat("%")) l = make(Op::Mod, {l, unary()});
            else return l;
        }
    }
    NodePtr unary() {
        if (eat("-")) return make(Op::Neg, {unary()});
        if (eat("+")) return unary();
        skip();
        if (i_ < s_.size() && s_[i_] == '!' && (i_ + 1 >= s_.size() || s_[i_ + 1] != '=')) {
            ++i_;
            return make(Op::Not, {unary()});
        }
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (eat("^")) return make(Op::Pow, {base, unary()});
        return base;
    }
    NodePtr primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            NodePtr r = ternary();
            if (!eat(")")) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + i_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            i_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Expr::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            std::string id = s_.substr(start, i_ - start);
            if (eat("(")) {
                auto n = std::make_shared<Expr::Node>();
                n->op = Op::Call;
                n->fn = id;
                if (!eat(")")) {
                    do n->kids.push_back(ternary());
                    while (eat(","));
                    if (!eat(")")) fail("expected ')' after arguments");
                }
                check_call(*n);
                return n;
            }
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (vars_[v] == id) {
                    auto n = std::make_shared<Expr::Node>();
                    n->op = Op::Var;
                    n->slot = v;
                    return n;
                }
            }
            auto n = std::make_shared<Expr::Node>();
            if (id == "pi") n->value = std::numbers::pi;
            else if (id == "e") n->value = std::numbers::e;
            else fail("unknown identifier '" + id + "'");
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
    void check_call(const Expr::Node& n) const {
        static const char* unary_fns[] = {"abs", "sqrt", "exp", "log", "floor", "ceil", "sin", "cos"};
        for (const char* f : unary_fns)
            if (n.fn == f) {
                if (n.kids.size() != 1) fail(n.fn + " takes one argument");
                return;
            }
        if (n.fn == "pow" || n.fn == "min" || n.fn == "max") {
            if (n.kids.size() != 2) fail(n.fn + " takes two arguments");
            return;
        }
        fail("unknown function '" + n.fn + "'");
    }
};

double eval_node(const Expr::Node& n, const std::vector<double>& v) {
    auto k = [&](std::size_t i) { return eval_node(*n.kids[i], v); };
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var: return v[n.slot];
        case Op::Neg: return -k(0);
        case Op::Not: return k(0) == 0.0 ? 1.0 : 0.0;
        case Op::Add: return k(0) + k(1);
        case Op::Sub: return k(0) - k(1);
        case Op::Mul: return k(0) * k(1);
        case Op::Div: return k(0) / k(1);
        case Op::Mod: return std::fmod(k(0), k(1));
        case Op::Pow: return std::pow(k(0), k(1));
        case Op::Lt: return k(0) < k(1);
        case Op::Le: return k(0) <= k(1);
        case Op::Gt: return k(0) > k(1);
        case Op::Ge: return k(0) >= k(1);
        case Op::Eq: return k(0) == k(1);
        case Op::Ne: return k(0) != k(1);
        case Op::And: return (k(0) != 0.0 && k(1) != 0.0) ? 1.0 : 0.0;
        case Op::Or: return (k(0) != 0.0 || k(1) != 0.0) ? 1.0 : 0.0;
        case Op::Cond: return k(0) != 0.0 ? k(1) : k(2);
        case Op::Call: {
            const std::string& f = n.fn;
            if (f == "abs") return std::abs(k(0));
            if (f == "sqrt") return std::sqrt(k(0));
            if (f == "exp") return std::exp(k(0));
            if (f == "log") return std::log(k(0));
            if (f == "floor") return std::floor(k(0));
            if (f == "ceil") return std::ceil(k(0));
            if (f == "sin") return std::sin(k(0));
            if (f == "cos") return std::cos(k(0));
            if (f == "pow") return std::pow(k(0), k(1));
            if (f == "min") return std::min(k(0), k(1));
            if (f == "max") return std::max(k(0), k(1));
            break;
        }
    }
    throw InternalError("bad expression node");
}

}  // namespace

Expr Expr::parse(const std::string& src, const std::vector<std::string>& variables) {
    Expr e;
    e.src_ = src;
    e.arity_ = variables.size();
    e.root_ = Parser(src, variables).parse();
    return e;
}

double Expr::eval(const std::vector<double>& values) const {
    if (!root_) throw DomainError("empty expression");
    if (values.size() < arity_) throw InternalError("expression evaluated with too few variables");
    return eval_node(*root_, values);
}

}  // namespace flowlab
