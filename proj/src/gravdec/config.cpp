#include "gravdec/config.hpp"

#include <fstream>

namespace gravdec {

namespace {

using nlohmann::json;

// Fetch a numeric field, recording a violation instead of throwing.
double get_number(const json& obj, const std::string& group, const std::string& key,
                  std::vector<std::string>& bad, double fallback = 0.0) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        bad.push_back(group + "." + key);
        return fallback;
    }
    return obj[key].get<double>();
}

} // namespace

Model validate_model(const json& raw) {
    std::vector<std::string> bad;
    Model m;

    // scales
    if (!raw.contains("scales") || !raw["scales"].contains("units")) {
        bad.push_back("scales.units");
    } else {
        const std::string units = raw["scales"]["units"].get<std::string>();
        if (units == "natural") {
            m.scales = Scales::natural();
        } else if (units == "si") {
            double l0 = 1.0;
            if (raw["scales"].contains("si_length_scale"))
                l0 = raw["scales"]["si_length_scale"].get<double>();
            m.scales = Scales::si(l0);
        } else {
            bad.push_back("scales.units");
        }
    }

    // noise
    if (!raw.contains("noise")) {
        bad.push_back("noise");
    } else {
        const json& n = raw["noise"];
        m.noise.alpha = get_number(n, "noise", "alpha", bad);
        m.noise.tau_c = get_number(n, "noise", "tau_c", bad, 1.0);
        std::string kernel = n.value("kernel", std::string{});
        if (kernel == "gaussian") {
            m.noise.kernel = KernelKind::GaussianL;
            m.noise.L = get_number(n, "noise", "L", bad, 1.0);
        } else if (kernel == "delta") {
            m.noise.kernel = KernelKind::DeltaL3;
            m.noise.l = get_number(n, "noise", "l", bad, 1.0);
        } else {
            bad.push_back("noise.kernel");
        }
        if (n.contains("weights")) {
            const json& w = n["weights"];
            m.noise.weights.w00 = w.value("h00", 1.0);
            m.noise.weights.w0i = w.value("h0i", 0.0);
            m.noise.weights.wij = w.value("hij", 0.0);
        }
    }

    // mass
    if (!raw.contains("mass")) {
        bad.push_back("mass");
    } else {
        const json& g = raw["mass"];
        m.mass.M = get_number(g, "mass", "M", bad, 1.0);
        std::string kind = g.value("kind", std::string{});
        if (kind == "point") {
            m.mass.density = DensityKind::Point;
        } else if (kind == "gaussian") {
            m.mass.density = DensityKind::GaussianR;
            m.mass.R = get_number(g, "mass", "R", bad, 1.0);
        } else {
            bad.push_back("mass.kind");
        }
    }

    // grid
    if (!raw.contains("grid")) {
        bad.push_back("grid");
    } else {
        const json& g = raw["grid"];
        if (!g.contains("n") || !g["n"].is_number_integer()) {
            bad.push_back("grid.n");
        } else {
            m.grid.n = g["n"].get<int>();
        }
        m.grid.extent = get_number(g, "grid", "extent", bad, 1.0);
    }

    // value-range checks; collect rather than throw so one pass reports everything
    auto collect = [&bad](auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            bad.insert(bad.end(), e.violations().begin(), e.violations().end());
        }
    };
    collect([&] { m.noise.validate(); });
    collect([&] { m.mass.validate(); });
    collect([&] { m.grid.validate(); });

    if (!bad.empty()) throw ValidationError(std::move(bad));
    return m;
}

Model load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({"config: cannot open " + path});
    json raw;
    try {
        in >> raw;
    } catch (const std::exception& e) {
        throw ValidationError({std::string("config: parse error: ") + e.what()});
    }
    return validate_model(raw);
}

nlohmann::json model_to_json(const Model& m) {
    json j;
    j["scales"]["units"] = (m.scales.length_si == 1.0 && m.scales.time_si == 1.0) ? "natural" : "si";
    j["scales"]["si_length_scale"] = m.scales.length_si;
    j["noise"]["alpha"] = m.noise.alpha;
    j["noise"]["tau_c"] = m.noise.tau_c;
    j["noise"]["kernel"] = m.noise.kernel == KernelKind::GaussianL ? "gaussian" : "delta";
    j["noise"]["L"] = m.noise.L;
    j["noise"]["l"] = m.noise.l;
    j["noise"]["weights"]["h00"] = m.noise.weights.w00;
    j["noise"]["weights"]["h0i"] = m.noise.weights.w0i;
    j["noise"]["weights"]["hij"] = m.noise.weights.wij;
    j["mass"]["M"] = m.mass.M;
    j["mass"]["kind"] = m.mass.density == DensityKind::Point ? "point" : "gaussian";
    j["mass"]["R"] = m.mass.R;
    j["grid"]["n"] = m.grid.n;
    j["grid"]["extent"] = m.grid.extent;
    return j;
}

} // namespace gravdec
