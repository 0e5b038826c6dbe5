#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cryptsim {

/// Base of every error raised by the library. `code()` is a stable
/// snake_case token meant for machine-readable error lines.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct Violation {
    std::string code;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Result of a structural check. Violations are data, not errors.
class ValidationReport {
public:
    bool ok() const noexcept { return violations_.empty(); }
    const std::vector<Violation>& violations() const noexcept { return violations_; }

    void add(std::string code, std::string message) {
        violations_.push_back({std::move(code), std::move(message)});
    }

    bool has(const std::string& code) const {
        for (const auto& v : violations_)
            if (v.code == code) return true;
        return false;
    }

    std::string to_string() const {
        if (ok()) return "ok\n";
        std::string out;
        for (const auto& v : violations_) out += v.code + ": " + v.message + "\n";
        return out;
    }

private:
    std::vector<Violation> violations_;
};

/// An error that carries a full validation report.
class ReportError : public Error {
public:
    ReportError(std::string code, const std::string& message, ValidationReport report)
        : Error(std::move(code), message + "\n" + report.to_string()), report_(std::move(report)) {}

    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

} // namespace cryptsim
