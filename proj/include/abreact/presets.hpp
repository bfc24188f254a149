#pragma once

// Shipped experiment recipes. Values track the Rb-K parameter set used for
// the reference figures: Omega0/lambda = 20, lambda*tau = 20, gamma = 1,
// R = 1/2, 300 trajectories, t in [0, 100] / lambda.

#include <string>
#include <utility>
#include <vector>

namespace abreact {

struct Preset {
    std::string name;
    std::string description;
    std::vector<std::pair<std::string, std::string>> values;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<std::pair<std::string, std::string>> base = {
        {"omega0", "20"},      {"tau", "20"},          {"delta", "3"},
        {"gamma", "1"},        {"R", "0.5"},           {"n-total", "100000"},
        {"n-traj", "300"},     {"t-end", "100"},       {"report-points", "1001"},
        {"statistics", "bosonic"},
    };
    static const std::vector<Preset> all = [] {
        std::vector<Preset> v;
        v.push_back({"fig2",
                     "population standard-deviation study, bosonic, delta=3 "
                     "(rerun with --delta -3 for the contrast)",
                     base});
        v.push_back({"fig3a", "mean-population reproduction, bosonic, delta=3", base});
        auto bf = base;
        for (auto& kv : bf)
            if (kv.first == "statistics") kv.second = "bose-fermi";
        v.push_back({"fig3b",
                     "Bose-Fermi variant; supply --kinetic-ab and --kinetic-b (> 0)",
                     std::move(bf)});
        return v;
    }();
    return all;
}

inline const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace abreact
