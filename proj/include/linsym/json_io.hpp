#pragma once

// JSON helpers shared by the file formats.

#include "linsym/errors.hpp"
#include "linsym/expr.hpp"
#include "linsym/fields.hpp"
#include "linsym/parse.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace linsym {

using Json = nlohmann::json;

/// An expression given as a string in the grammar, a number, or null (zero).
Expr expr_from_json(const Json& j, const ParseContext& ctx);
Json expr_to_json(const Expr& e);

GeneratorCoeffs field_from_json(const Json& j, const ParseContext& ctx);
Json field_to_json(const GeneratorCoeffs& g);

Declarations declarations_from_json(const Json& j);

} // namespace linsym
