#ifndef TAMC_MODELSPEC_HPP
#define TAMC_MODELSPEC_HPP

// Text format for networks (.tam) and query files (.tq).
//
//   model    := decl* template+ system
//   decl     := "clock" ids ";" | "int" ("[" c "," c "]")? ids ";"
//             | "chan" ids ";" | "broadcast" "chan" ids ";"
//   template := "process" NAME "{" locdecl+ "init" NAME ";" edge* "}"
//   locdecl  := ("urgent"|"committed")? "loc" NAME ("inv" conj)? ";"
//   edge     := NAME "->" NAME "{" ("guard" conj ";")? ("sync" NAME ("!"|"?") ";")?
//               ("assign" updates ";")? "}"
//   system   := "system" NAME ("," NAME)* ";"
//
// Comments run from "//" to the end of the line.

#include "tamc/network.hpp"
#include "tamc/verifier.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tamc {

struct SourceModel {
    Declarations decls;
    std::vector<Template> templates;
    std::vector<std::string> system;

    friend bool operator==(const SourceModel&, const SourceModel&) = default;
};

struct ParseDiagnostic {
    enum class Severity : std::uint8_t { Error, Warning };

    std::size_t line = 1;
    std::size_t column = 1;
    std::string message;
    Severity severity = Severity::Error;
};

std::string to_string(const ParseDiagnostic& d);

template <typename T>
struct ParseResult {
    std::optional<T> value;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return value.has_value(); }
};

ParseResult<SourceModel> parse_model(std::string_view text);
ParseResult<std::vector<Query>> parse_queries(std::string_view text);

std::string print_model(const SourceModel& m);

// Instantiates the system line; throws ModelError on invalid models.
Network to_network(const SourceModel& m);

// Parses and instantiates, throwing ModelError with all diagnostics.
Network load_network(std::string_view text);

}  // namespace tamc

#endif  // TAMC_MODELSPEC_HPP
