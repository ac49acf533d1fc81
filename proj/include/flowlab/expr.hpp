#pragma once

#include <memory>
#include <string>
#include <vector>

namespace flowlab {

// Arithmetic expressions over named variables, used for parametric schedules in config files.
// Supports + - * / % ^, comparisons, && || !, c ? a : b, and the functions abs sqrt exp log
// floor ceil sin cos pow min max. Constants: pi, e.
class Expr {
public:
    struct Node;

    Expr() = default;
    // Variables are bound positionally: eval(values) reads values[i] for variables[i].
    static Expr parse(const std::string& src, const std::vector<std::string>& variables);

    double eval(const std::vector<double>& values) const;
    double operator()(double v0) const { return eval({v0}); }
    const std::string& source() const { return src_; }
    bool valid() const { return static_cast<bool>(root_); }

private:
    std::shared_ptr<const Node> root_;
    std::string src_;
    std::size_t arity_ = 0;
};

}  // namespace flowlab
