#pragma once

#include <string>
#include <string_view>

#include "rawtypes/diagnostic.h"
#include "rawtypes/model.h"
#include "rawtypes/structure.h"

namespace rawtypes {

// Concrete syntax (`.rt` files):
//
//   field f : Init;                       # also allowed inside a class
//   class C extends D {
//     init(arg: T) pre T post T ret T { 0: super(arg); 1: return this; }
//     method m(arg: T) pre T post T ret T {
//       0: x <- this.f;
//       1: return x;
//       handler 0 np -> 1;
//     }
//   }
//   main C;
//
// Types: Init | Raw | Raw(C). Instructions: `x <- e`, `x.f <- y`,
// `x <- new C(y)`, `if * jmp N`, `super(y)`, `x <- r.D::m(y)`, `return x`,
// `setinit`, `x <- (Init) y`, `x <- (Raw(C)) y`. `#` starts a comment.

// Syntax only: no name resolution, no defaults.
Result<PartialProgram> parse_partial(std::string_view text,
                                     const std::string& file = "<input>");

// Parses, resolves names, applies default annotations and validates the
// structure. On success the Program satisfies validate_structure.
Result<Program> parse(std::string_view text,
                      const std::string& file = "<input>");

// Canonical, fully annotated text; parse(pretty_print(p)) == p.
std::string pretty_print(const Program& p);

}  // namespace rawtypes
