#ifndef DDR_TEXT_HPP
#define DDR_TEXT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ddr {

/// Shortest decimal text that parses back to exactly `v`.
std::string to_text(double v);

/// Locale-independent parse of the whole (trimmed) field; nullopt on failure.
std::optional<double> parse_double(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

/// 16 lowercase hex digits.
std::string to_hex(std::uint64_t v);

} // namespace ddr

#endif
