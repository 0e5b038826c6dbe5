#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "number_format.hpp"
#include "xml.hpp"

namespace cryptsim::mathml {

inline constexpr std::string_view kNamespace = "http://www.w3.org/1998/Math/MathML";

class MathError : public Error {
public:
    explicit MathError(const std::string& what) : Error("schema", "MathML: " + what) {}
};

/// Content-MathML expression: a coordinate variable, a numeric or boolean
/// constant, or an operator applied to arguments.
struct Expr {
    enum class Kind { Variable, Number, Boolean, Apply };

    Kind kind = Kind::Number;
    std::string name; // variable name or operator
    double value = 0; // Number: value; Boolean: 0 or 1
    std::vector<Expr> args;

    friend bool operator==(const Expr&, const Expr&) = default;
};

inline Expr var(std::string name) { return {Expr::Kind::Variable, std::move(name), 0, {}}; }
inline Expr num(double v) { return {Expr::Kind::Number, {}, v, {}}; }
inline Expr boolean(bool b) { return {Expr::Kind::Boolean, {}, b ? 1.0 : 0.0, {}}; }
inline Expr call(std::string op, std::vector<Expr> args) { return {Expr::Kind::Apply, std::move(op), 0, std::move(args)}; }
inline Expr cmp(std::string op, Expr lhs, Expr rhs) { return call(std::move(op), {std::move(lhs), std::move(rhs)}); }
inline Expr all_of(std::vector<Expr> args) { return call("and", std::move(args)); }
inline Expr any_of(std::vector<Expr> args) { return call("or", std::move(args)); }

inline bool is_comparison(std::string_view op) {
    return op == "eq" || op == "neq" || op == "lt" || op == "leq" || op == "gt" || op == "geq";
}

inline bool is_logical(std::string_view op) { return op == "and" || op == "or" || op == "not" || op == "xor"; }

inline bool is_arithmetic(std::string_view op) {
    return op == "plus" || op == "minus" || op == "times" || op == "divide" || op == "power" || op == "abs" ||
           op == "root";
}

inline bool is_known_operator(std::string_view op) {
    return is_comparison(op) || is_logical(op) || is_arithmetic(op);
}

struct Point {
    double x = 0, y = 0, z = 0;
};

/// Numeric evaluation; booleans evaluate to 0 or 1.
inline double evaluate(const Expr& e, const Point& p) {
    switch (e.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Boolean: return e.value;
    case Expr::Kind::Variable:
        if (e.name == "x") return p.x;
        if (e.name == "y") return p.y;
        if (e.name == "z") return p.z;
        throw MathError("unbound variable '" + e.name + "'");
    case Expr::Kind::Apply: break;
    }
    const auto& op = e.name;
    const auto& a = e.args;
    auto arg = [&](std::size_t i) { return evaluate(a.at(i), p); };
    if (is_comparison(op)) {
        if (a.size() != 2) throw MathError("'" + op + "' takes two arguments");
        const double l = arg(0), r = arg(1);
        if (op == "eq") return l == r;
        if (op == "neq") return l != r;
        if (op == "lt") return l < r;
        if (op == "leq") return l <= r;
        if (op == "gt") return l > r;
        return l >= r;
    }
    if (op == "and") {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (arg(i) == 0) return 0;
        return 1;
    }
    if (op == "or") {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (arg(i) != 0) return 1;
        return 0;
    }
    if (op == "xor") {
        bool acc = false;
        for (std::size_t i = 0; i < a.size(); ++i) acc ^= (arg(i) != 0);
        return acc;
    }
    if (op == "not") return arg(0) == 0;
    if (op == "plus") {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += arg(i);
        return s;
    }
    if (op == "times") {
        double s = 1;
        for (std::size_t i = 0; i < a.size(); ++i) s *= arg(i);
        return s;
    }
    if (op == "minus") return a.size() == 1 ? -arg(0) : arg(0) - arg(1);
    if (op == "divide") return arg(0) / arg(1);
    if (op == "power") return std::pow(arg(0), arg(1));
    if (op == "abs") return std::fabs(arg(0));
    if (op == "root") return std::sqrt(arg(0));
    throw MathError("unsupported operator '" + op + "'");
}

inline bool holds(const Expr& e, const Point& p) { return evaluate(e, p) != 0; }

/// True when the expression only combines comparisons between one of the
/// coordinates x, y, z and a constant using and/or/not.
inline bool is_axis_comparison_formula(const Expr& e) {
    if (e.kind == Expr::Kind::Boolean) return true;
    if (e.kind != Expr::Kind::Apply) return false;
    if (e.name == "and" || e.name == "or" || e.name == "not")
        return !e.args.empty() && std::all_of(e.args.begin(), e.args.end(), is_axis_comparison_formula);
    if (!is_comparison(e.name) || e.args.size() != 2) return false;
    auto is_axis = [](const Expr& v) {
        return v.kind == Expr::Kind::Variable && (v.name == "x" || v.name == "y" || v.name == "z");
    };
    auto is_const = [](const Expr& v) { return v.kind == Expr::Kind::Number; };
    return (is_axis(e.args[0]) && is_const(e.args[1])) || (is_const(e.args[0]) && is_axis(e.args[1]));
}

inline std::string to_infix(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Number: return format_number(e.value);
    case Expr::Kind::Boolean: return e.value != 0 ? "true" : "false";
    case Expr::Kind::Variable: return e.name;
    case Expr::Kind::Apply: break;
    }
    static const std::array<std::pair<std::string_view, std::string_view>, 13> symbols = {{
        {"eq", "=="}, {"neq", "!="}, {"lt", "<"}, {"leq", "<="}, {"gt", ">"}, {"geq", ">="}, {"and", "and"},
        {"or", "or"}, {"xor", "xor"}, {"plus", "+"}, {"minus", "-"}, {"times", "*"}, {"divide", "/"},
    }};
    if (e.name == "not") return "not (" + to_infix(e.args.at(0)) + ")";
    std::string sym = e.name;
    for (const auto& [op, s] : symbols)
        if (op == e.name) sym = s;
    if (e.args.size() == 1) return e.name + "(" + to_infix(e.args[0]) + ")";
    std::string out;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += " " + sym + " ";
        const bool wrap = e.args[i].kind == Expr::Kind::Apply;
        out += wrap ? "(" + to_infix(e.args[i]) + ")" : to_infix(e.args[i]);
    }
    return out;
}

inline Expr from_xml(const xml::Element& e) {
    const auto local = xml::local_name(e.name);
    if (local == "math") {
        if (e.children.size() != 1) throw MathError("<math> must hold exactly one expression");
        return from_xml(e.children.front());
    }
    if (local == "ci") {
        if (e.text.empty()) throw MathError("empty <ci>");
        return var(e.text);
    }
    if (local == "true") return boolean(true);
    if (local == "false") return boolean(false);
    if (local == "cn") {
        const auto* type = e.attribute_local("type");
        if (type && (*type == "rational" || *type == "e-notation")) {
            if (e.children.size() != 1 || xml::local_name(e.children[0].name) != "sep")
                throw MathError("<cn type=\"" + *type + "\"> needs one <sep/>");
            auto a = parse_number(e.text);
            auto b = parse_number(e.children[0].tail);
            if (!a || !b) throw MathError("malformed <cn> parts");
            return num(*type == "rational" ? *a / *b : *a * std::pow(10.0, *b));
        }
        auto v = parse_number(e.text);
        if (!v) throw MathError("malformed <cn> '" + e.text + "'");
        return num(*v);
    }
    if (local == "apply") {
        if (e.children.empty()) throw MathError("empty <apply>");
        std::string op(xml::local_name(e.children.front().name));
        if (!is_known_operator(op)) throw MathError("unsupported operator '" + op + "'");
        std::vector<Expr> args;
        for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(from_xml(e.children[i]));
        return call(std::move(op), std::move(args));
    }
    throw MathError("unsupported element <" + e.name + ">");
}

inline xml::Element to_xml_body(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Number: {
        auto cn = xml::make_element("cn");
        cn.text = format_number(e.value);
        return cn;
    }
    case Expr::Kind::Boolean: return xml::make_element(e.value != 0 ? "true" : "false");
    case Expr::Kind::Variable: {
        auto ci = xml::make_element("ci");
        ci.text = e.name;
        return ci;
    }
    case Expr::Kind::Apply: break;
    }
    auto node = xml::make_element("apply");
    node.add(xml::make_element(e.name));
    for (const auto& a : e.args) node.add(to_xml_body(a));
    return node;
}

/// Wraps the expression in a namespaced <math> element.
inline xml::Element to_xml(const Expr& e) {
    auto math = xml::make_element("math");
    math.set("xmlns", std::string(kNamespace));
    math.add(to_xml_body(e));
    return math;
}

} // namespace cryptsim::mathml
