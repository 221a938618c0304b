#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgh/error.hpp"
#include "dgh/map.hpp"
#include "dgh/structure.hpp"

namespace dgh {

/// JSON shape for a solution (keys in this order):
///
///   {
///     "d": 2, "g": 3, "h": "1=1", "epsilon": 5,
///     "path": [2, 3], "k_total": 5,
///     "triples": [{"q": "2", "r": "0", "delta": 5}],
///     "progression_step": "192", "image_step": "54"
///   }
///
/// Values that can outgrow native words (q, r, the two steps) are decimal
/// strings; everything else is a plain JSON number. ordered_json keeps the
/// key order stable so identical inputs serialize to identical bytes.
using json = nlohmann::ordered_json;

inline json to_json(const structure_solution& sol) {
    json out;
    out["d"] = sol.params().d();
    out["g"] = sol.params().g();
    out["h"] = format_h_table(sol.params().h_table());
    out["epsilon"] = sol.epsilon();
    out["path"] = sol.path().ks;
    out["k_total"] = sol.k_total();
    json triples = json::array();
    for (const residue_triple& t : sol.triples()) {
        json item;
        item["q"] = t.q.str();
        item["r"] = t.r.str();
        item["delta"] = t.delta;
        triples.push_back(std::move(item));
    }
    out["triples"] = std::move(triples);
    out["progression_step"] = sol.progression_step().str();
    out["image_step"] = sol.image_step().str();
    return out;
}

inline structure_solution solution_from_json(const json& in) {
    try {
        const std::int64_t d = in.at("d").get<std::int64_t>();
        const std::int64_t g = in.at("g").get<std::int64_t>();
        const map_params params =
            validate_params(d, g, parse_h_table(in.at("h").get<std::string>()));
        const std::int64_t epsilon = in.at("epsilon").get<std::int64_t>();
        path_spec path(in.at("path").get<std::vector<int>>());
        if (in.at("k_total").get<std::int64_t>() != path.k_total())
            fail(errc::parse_error, "k_total does not match the path");
        std::vector<residue_triple> triples;
        for (const json& item : in.at("triples")) {
            residue_triple t;
            t.q = Int(item.at("q").get<std::string>());
            t.r = Int(item.at("r").get<std::string>());
            t.delta = item.at("delta").get<std::int64_t>();
            triples.push_back(std::move(t));
        }
        structure_solution sol(params, epsilon, std::move(path), std::move(triples));
        if (in.contains("progression_step") &&
            Int(in.at("progression_step").get<std::string>()) != sol.progression_step())
            fail(errc::parse_error, "progression_step does not match d, g, and the path");
        if (in.contains("image_step") &&
            Int(in.at("image_step").get<std::string>()) != sol.image_step())
            fail(errc::parse_error, "image_step does not match d, g, and the path");
        return sol;
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        fail(errc::parse_error, std::string("bad solution JSON: ") + e.what());
    }
}

inline structure_solution solution_from_json_text(const std::string& text) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const std::exception& e) {
        fail(errc::parse_error, std::string("bad JSON: ") + e.what());
    }
    return solution_from_json(parsed);
}

} // namespace dgh
