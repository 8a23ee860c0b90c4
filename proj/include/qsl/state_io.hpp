// state_io.hpp
// JSON state documents:
//   spectral  {"h":1.0,"levels":[{"e":0,"p":0.5},...]}
//   amplitude {"h":1.0,"basis":[{"e":0,"g":0,"re":0.7,"im":0},...]}
//   mixed     {"h":1.0,"mixture":[{"w":0.5,"state":{"levels":[...]}},...]}
// "h" is optional (default 1). Unknown keys are rejected.

#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "qsl/mixed.hpp"
#include "qsl/state.hpp"

namespace qsl {

using StateValue = std::variant<SpectralState, AmplitudeState, MixedEnsemble>;

struct StateDocument {
    Units units;
    StateValue value;
};

// Throws DomainError with a descriptive message on any schema violation.
StateDocument parse_state(std::string_view text);
StateDocument load_state_file(const std::string& path);

nlohmann::json to_json(const SpectralState& s, const Units& u = {});
nlohmann::json to_json(const AmplitudeState& s, const Units& u = {});

// Spectral view of a pure document; DomainError for mixtures.
SpectralState pure_spectral(const StateDocument& doc);

}  // namespace qsl
