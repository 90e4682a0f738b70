#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

namespace rlnc::csv {

// Shortest round-trip decimal formatting; locale-free, '.' decimal point,
// identical across runs so CSV outputs stay byte-reproducible.
inline std::string format_double(double value) {
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

// Comma-separated rows with '#'-prefixed header comments.
class Writer {
public:
    void comment(std::string_view text) { out_ << "# " << text << '\n'; }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        (write_field(first, fields), ...);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    template <typename T>
    void write_field(bool& first, const T& value) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, float>) {
            out_ << format_double(value);
        } else if constexpr (std::is_same_v<T, bool>) {
            out_ << (value ? 1 : 0);
        } else {
            out_ << value;
        }
    }

    std::ostringstream out_;
};

}  // namespace rlnc::csv
