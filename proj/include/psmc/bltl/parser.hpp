#pragma once

#include <span>
#include <string>
#include <string_view>

#include "psmc/bltl/formula.hpp"

namespace psmc::bltl {

/// Parses BLTL text. Grammar, loosest binding first:
///
///     formula  := or ('->' formula)?            a -> b  reads as  !a | b
///     or       := and ('|' and)*
///     and      := until ('&' until)*
///     until    := unary ('U<=' T until)?
///     unary    := '!' unary | 'F<=' T unary | 'G<=' T unary | primary
///     primary  := 'true' | 'false' | '[' L '<=' name '<=' U ']' | '(' formula ')'
///
/// Throws ParseError with line and column on malformed text, unknown state
/// names, L > U, or a negative bound.
Formula parse(std::string_view text, std::span<const std::string> state_names);

}  // namespace psmc::bltl
