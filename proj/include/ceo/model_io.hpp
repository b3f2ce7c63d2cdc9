#pragma once

#include "ceo/model.hpp"

#include <optional>
#include <string>

namespace ceo::io {

/// Raised on malformed input; the message names the offending key.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFile {
    CeoModel model;
    std::optional<TestChannelGains> omegas;
};

/// Parses a JSON model document:
///   {"mode": "real"|"complex", "sigma_x": [[..]],
///    "agents": [{"H": [[..]], "sigma": [[..]]}, ...],
///    "omegas": [[[..]], ...] (optional)}
ModelFile parse_model_json(const std::string& text);
ModelFile load_model_file(const std::string& path);

/// Gains document: either a bare JSON array of matrices or an object with
/// an "omegas" key.
TestChannelGains parse_omegas_json(const std::string& text);
TestChannelGains load_omegas_file(const std::string& path);

}  // namespace ceo::io
