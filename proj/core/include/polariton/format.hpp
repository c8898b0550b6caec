#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace polariton {

/// Twelve significant digits in scientific notation, independent of the
/// global locale. Non-finite values print as nan / inf / -inf.
std::string format_number(double value);

/// Serializes `doc` with every floating-point number passed through
/// format_number. Object keys keep nlohmann's sorted order, so equal
/// documents always produce identical bytes.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

void write_json(std::ostream& out, const nlohmann::json& doc);

}  // namespace polariton
