#pragma once

// Minimal element tree over expat, plus a deterministic pretty-printer.

#include <expat.h>

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace cryptsim::xml {

class XmlSyntaxError : public Error {
public:
    XmlSyntaxError(long line, long column, const std::string& what)
        : Error("xml_syntax", "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    long line() const noexcept { return line_; }
    long column() const noexcept { return column_; }

private:
    long line_;
    long column_;
};

/// Element with ElementTree-style text: `text` precedes the first child,
/// each child's `tail` follows it. Both are whitespace-trimmed.
struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;
    std::string tail;

    friend bool operator==(const Element&, const Element&) = default;

    const std::string* attribute(std::string_view qualified) const {
        for (const auto& [k, v] : attributes)
            if (k == qualified) return &v;
        return nullptr;
    }

    /// Attribute lookup by local name, ignoring any namespace prefix.
    const std::string* attribute_local(std::string_view local) const;

    Element& set(std::string key, std::string value) {
        attributes.emplace_back(std::move(key), std::move(value));
        return *this;
    }

    Element& add(Element child) {
        children.push_back(std::move(child));
        return children.back();
    }
};

inline std::string_view local_name(std::string_view qualified) noexcept {
    auto pos = qualified.rfind(':');
    return pos == std::string_view::npos ? qualified : qualified.substr(pos + 1);
}

inline std::string_view prefix_of(std::string_view qualified) noexcept {
    auto pos = qualified.rfind(':');
    return pos == std::string_view::npos ? std::string_view{} : qualified.substr(0, pos);
}

inline const std::string* Element::attribute_local(std::string_view local) const {
    for (const auto& [k, v] : attributes)
        if (local_name(k) == local && prefix_of(k) != "xmlns" && k != "xmlns") return &v;
    return nullptr;
}

inline Element make_element(std::string name) {
    Element e;
    e.name = std::move(name);
    return e;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

struct Builder {
    std::vector<Element> stack;
    std::vector<std::string> pending; // raw text per open element
    std::unique_ptr<Element> root;

    void flush_text() {
        if (stack.empty()) return;
        Element& top = stack.back();
        std::string t = trim(pending.back());
        pending.back().clear();
        if (t.empty()) return;
        std::string& dest = top.children.empty() ? top.text : top.children.back().tail;
        if (!dest.empty()) dest += ' ';
        dest += t;
    }

    static void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
        auto* self = static_cast<Builder*>(user);
        self->flush_text();
        Element e;
        e.name = name;
        for (int i = 0; attrs[i]; i += 2) e.attributes.emplace_back(attrs[i], attrs[i + 1]);
        self->stack.push_back(std::move(e));
        self->pending.emplace_back();
    }

    static void on_end(void* user, const XML_Char*) {
        auto* self = static_cast<Builder*>(user);
        self->flush_text();
        Element done = std::move(self->stack.back());
        self->stack.pop_back();
        self->pending.pop_back();
        if (self->stack.empty())
            self->root = std::make_unique<Element>(std::move(done));
        else
            self->stack.back().children.push_back(std::move(done));
    }

    static void on_text(void* user, const XML_Char* s, int len) {
        auto* self = static_cast<Builder*>(user);
        if (!self->pending.empty()) self->pending.back().append(s, static_cast<std::size_t>(len));
    }
};

inline void escape_into(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) out += "&quot;";
            else out += c;
            break;
        default: out += c;
        }
    }
}

inline void write_element(std::string& out, const Element& e, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent;
    out += '<';
    out += e.name;
    for (const auto& [k, v] : e.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        escape_into(out, v, true);
        out += '"';
    }
    if (e.children.empty() && e.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (e.children.empty()) {
        escape_into(out, e.text, false);
    } else {
        out += '\n';
        if (!e.text.empty()) {
            out += indent + "  ";
            escape_into(out, e.text, false);
            out += '\n';
        }
        for (const auto& child : e.children) {
            write_element(out, child, depth + 1);
            if (!child.tail.empty()) {
                out += indent + "  ";
                escape_into(out, child.tail, false);
                out += '\n';
            }
        }
        out += indent;
    }
    out += "</";
    out += e.name;
    out += ">\n";
}

} // namespace detail

/// Parses a complete UTF-8 document into its root element.
inline Element parse(std::string_view text) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr), &XML_ParserFree);
    if (!parser) throw Error("xml_parser", "could not create XML parser");
    detail::Builder builder;
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), &detail::Builder::on_start, &detail::Builder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &detail::Builder::on_text);
    if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) == XML_STATUS_ERROR) {
        throw XmlSyntaxError(static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                             static_cast<long>(XML_GetCurrentColumnNumber(parser.get())) + 1,
                             XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!builder.root) throw XmlSyntaxError(1, 1, "no root element");
    return std::move(*builder.root);
}

/// Serializes with an XML declaration, two-space indentation and attributes
/// in stored order. Equal trees give identical bytes.
inline std::string serialize(const Element& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    detail::write_element(out, root, 0);
    return out;
}

} // namespace cryptsim::xml
