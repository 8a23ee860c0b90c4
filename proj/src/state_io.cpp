#include "qsl/state_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace qsl {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
    if (!obj.is_object()) {
        throw DomainError(std::string(where) + ": expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) {
            throw DomainError(std::string(where) + ": unknown key \"" + key + "\"");
        }
    }
}

double number(const json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw DomainError(std::string(where) + ": missing \"" + key + "\"");
    }
    if (!it->is_number()) {
        throw DomainError(std::string(where) + ": \"" + key + "\" must be a number");
    }
    return it->get<double>();
}

double optional_number(const json& obj, const char* key, double fallback, std::string_view where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

const json& array_at(const json& obj, const char* key) {
    const json& a = obj.at(key);
    if (!a.is_array()) throw DomainError(std::string("\"") + key + "\" must be an array");
    return a;
}

void check_energy(double e) {
    if (e < 0.0) {
        std::ostringstream os;
        os << "negative energy " << e;
        throw DomainError(os.str());
    }
}

SpectralState parse_levels(const json& arr) {
    std::vector<Level> levels;
    for (const auto& item : arr) {
        reject_unknown(item, {"e", "p"}, "level");
        const double e = number(item, "e", "level");
        check_energy(e);
        levels.push_back({e, number(item, "p", "level")});
    }
    return SpectralState::from_levels(std::move(levels));
}

AmplitudeState parse_basis(const json& arr) {
    std::vector<AmplitudeState::Component> comps;
    for (const auto& item : arr) {
        reject_unknown(item, {"e", "g", "re", "im"}, "basis entry");
        const double e = number(item, "e", "basis entry");
        check_energy(e);
        int g = 0;
        if (item.contains("g")) {
            if (!item["g"].is_number_integer()) {
                throw DomainError("basis entry: \"g\" must be an integer");
            }
            g = item["g"].get<int>();
        }
        comps.push_back({{e, g},
                         {optional_number(item, "re", 0.0, "basis entry"),
                          optional_number(item, "im", 0.0, "basis entry")}});
    }
    return AmplitudeState::from_components(std::move(comps));
}

AmplitudeState parse_pure_as_amplitude(const json& obj) {
    reject_unknown(obj, {"levels", "basis"}, "mixture state");
    if (obj.contains("levels") == obj.contains("basis")) {
        throw DomainError("mixture state: exactly one of \"levels\" or \"basis\" required");
    }
    if (obj.contains("levels")) {
        // Real amplitudes on raw (unshifted) energies.
        std::vector<AmplitudeState::Component> comps;
        for (const auto& item : array_at(obj, "levels")) {
            reject_unknown(item, {"e", "p"}, "level");
            const double e = number(item, "e", "level");
            check_energy(e);
            const double p = number(item, "p", "level");
            if (p < 0.0) throw DomainError("negative probability");
            comps.push_back({{e, 0}, {std::sqrt(p), 0.0}});
        }
        return AmplitudeState::from_components(std::move(comps));
    }
    return parse_basis(array_at(obj, "basis"));
}

}  // namespace

StateDocument parse_state(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(doc, {"h", "levels", "basis", "mixture"}, "state");

    Units units;
    units.h = optional_number(doc, "h", 1.0, "state");
    validate(units);

    const int kinds = static_cast<int>(doc.contains("levels")) +
                      static_cast<int>(doc.contains("basis")) +
                      static_cast<int>(doc.contains("mixture"));
    if (kinds != 1) {
        throw DomainError("state: exactly one of \"levels\", \"basis\" or \"mixture\" required");
    }
    try {
        if (doc.contains("levels")) {
            return {units, parse_levels(array_at(doc, "levels"))};
        }
        if (doc.contains("basis")) {
            return {units, parse_basis(array_at(doc, "basis"))};
        }
        std::vector<MixedEnsemble::Member> members;
        for (const auto& item : array_at(doc, "mixture")) {
            reject_unknown(item, {"w", "state"}, "mixture entry");
            if (!item.contains("state")) throw DomainError("mixture entry: missing \"state\"");
            members.push_back({number(item, "w", "mixture entry"),
                               parse_pure_as_amplitude(item["state"])});
        }
        return {units, MixedEnsemble::from_members(std::move(members))};
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed state: ") + e.what());
    }
}

StateDocument load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open state file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state(buf.str());
}

json to_json(const SpectralState& s, const Units& u) {
    json levels = json::array();
    for (const auto& l : s.levels()) levels.push_back({{"e", l.energy}, {"p", l.probability}});
    return {{"h", u.h}, {"levels", std::move(levels)}};
}

json to_json(const AmplitudeState& s, const Units& u) {
    json basis = json::array();
    for (const auto& c : s.components()) {
        basis.push_back({{"e", c.label.energy},
                         {"g", c.label.degeneracy},
                         {"re", c.amplitude.real()},
                         {"im", c.amplitude.imag()}});
    }
    return {{"h", u.h}, {"basis", std::move(basis)}};
}

SpectralState pure_spectral(const StateDocument& doc) {
    if (const auto* s = std::get_if<SpectralState>(&doc.value)) return *s;
    if (const auto* a = std::get_if<AmplitudeState>(&doc.value)) return collapse_to_spectral(*a);
    throw DomainError("operation requires a pure state, got a mixture");
}

}  // namespace qsl
