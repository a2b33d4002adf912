#pragma once

#include <string>
#include <vector>

#include "vocalpersona/persona_model.hpp"

namespace vptest {

using namespace vocalpersona;

inline FeatureRegistry single_feature_registry(double min = -100, double max = 100)
{
    FeatureRegistry reg;
    reg.features.push_back({"z", "z", "unit", min, max, ""});
    return reg;
}

inline Persona single_feature_persona(std::string id, std::vector<MixtureComponent> comps, double lo,
                                      double hi)
{
    Persona p;
    p.id = std::move(id);
    p.name = p.id;
    p.pdfs.push_back({"z", std::move(comps), lo, hi});
    return p;
}

inline bool has_rule(const ValidationReport& r, const std::string& rule)
{
    for (const auto& v : r) {
        if (v.rule == rule) {
            return true;
        }
    }
    return false;
}

}  // namespace vptest
