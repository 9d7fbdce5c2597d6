#include "config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cqm::app {

using nlohmann::json;

const std::vector<std::pair<Scenario, std::string>>& scenario_names() {
    static const std::vector<std::pair<Scenario, std::string>> names{{Scenario::run1d, "run1d"},
                                                                     {Scenario::run2d, "run2d"},
                                                                     {Scenario::wigner_compare, "wigner-compare"},
                                                                     {Scenario::takabayasi, "takabayasi"}};
    return names;
}

std::string to_string(Scenario s) {
    for (const auto& [k, name] : scenario_names())
        if (k == s) return name;
    return "?";
}

SpatialGrid1D<double> GridConfig::build() const {
    if (x_min) return SpatialGrid1D<double>(n, *x_min, dx);
    return SpatialGrid1D<double>::centered(n, dx);
}

namespace {

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
    return out;
}

// Collects problems while reading; accessors return the default on error.
class Reader {
public:
    std::vector<std::string> problems;

    void fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

    const json* child(const json& obj, const std::string& key) {
        if (!obj.is_object()) return nullptr;
        const auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    double number(const json& obj, const std::string& key, const std::string& path, double fallback) {
        const json* v = child(obj, key);
        if (!v) return fallback;
        if (!v->is_number()) {
            fail(path, "expected a number, got " + std::string(v->type_name()));
            return fallback;
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) fail(path, "must be finite");
        return d;
    }

    long integer(const json& obj, const std::string& key, const std::string& path, long fallback) {
        const json* v = child(obj, key);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            fail(path, "expected an integer, got " + v->dump());
            return fallback;
        }
        return v->get<long>();
    }

    std::string text(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
        const json* v = child(obj, key);
        if (!v) return fallback;
        if (!v->is_string()) {
            fail(path, "expected a string, got " + std::string(v->type_name()));
            return fallback;
        }
        return v->get<std::string>();
    }

    std::array<double, 2> pair(const json& obj, const std::string& key, const std::string& path,
                               std::array<double, 2> fallback) {
        const json* v = child(obj, key);
        if (!v) return fallback;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            fail(path, "expected [number, number]");
            return fallback;
        }
        return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }

    std::complex<double> weight(const json& obj, const std::string& path) {
        const json* v = child(obj, "weight");
        if (!v) return {1.0, 0.0};
        if (v->is_number()) return {v->get<double>(), 0.0};
        const auto p = pair(obj, "weight", path, {1.0, 0.0});
        return {p[0], p[1]};
    }

    void positive(double v, const std::string& path) {
        if (!(v > 0.0)) fail(path, "must be positive (got " + format(v) + ")");
    }

    static std::string format(double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    }

    Gaussian gaussian(const json& obj, const std::string& path) {
        Gaussian g{number(obj, "x0", path + ".x0", 0.0), number(obj, "p0", path + ".p0", 0.0),
                   number(obj, "sigma", path + ".sigma", 1.0)};
        positive(g.sigma, path + ".sigma");
        return g;
    }

    Gaussian2D gaussian2d(const json& obj, const std::string& path) {
        Gaussian2D g{pair(obj, "x0", path + ".x0", {0, 0}), pair(obj, "p0", path + ".p0", {0, 0}),
                     pair(obj, "sigma", path + ".sigma", {1, 1}), number(obj, "r", path + ".r", 0.0)};
        for (int a = 0; a < 2; ++a) positive(g.sigma[a], path + ".sigma[" + std::to_string(a) + "]");
        if (!(std::abs(g.correlation) < 1.0)) fail(path + ".r", "must satisfy |r| < 1");
        return g;
    }

    StateSpec state(const json& obj, const std::string& path) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return Gaussian{};
        }
        const std::string type = text(obj, "type", path + ".type", "");
        if (type == "gaussian") return gaussian(obj, path);
        if (type == "harmonic") {
            HarmonicEigenstate h{static_cast<int>(integer(obj, "k", path + ".k", 0)),
                                 number(obj, "omega", path + ".omega", 1.0), number(obj, "mass", path + ".mass", 1.0)};
            if (h.k < 0) fail(path + ".k", "must be >= 0");
            positive(h.omega, path + ".omega");
            positive(h.mass, path + ".mass");
            return h;
        }
        if (type == "gaussian2d") return gaussian2d(obj, path);
        if (type == "superposition" || type == "superposition2d") {
            const json* terms = child(obj, "terms");
            if (!terms || !terms->is_array() || terms->empty()) {
                fail(path + ".terms", "expected a nonempty array");
                return Gaussian{};
            }
            Superposition s1;
            Superposition2D s2;
            for (std::size_t i = 0; i < terms->size(); ++i) {
                const std::string p = path + ".terms[" + std::to_string(i) + "]";
                const json& t = (*terms)[i];
                if (type == "superposition")
                    s1.terms.push_back({weight(t, p + ".weight"), gaussian(t, p)});
                else
                    s2.terms.push_back({weight(t, p + ".weight"), gaussian2d(t, p)});
            }
            if (type == "superposition") return s1;
            return s2;
        }
        fail(path + ".type", "unknown state type '" + type +
                                 "' (gaussian, superposition, harmonic, gaussian2d, superposition2d)");
        return Gaussian{};
    }

    Potential potential(const json& obj, const std::string& path) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return FreePotential{};
        }
        const std::string type = text(obj, "type", path + ".type", "free");
        if (type == "free") return FreePotential{};
        if (type == "harmonic") {
            HarmonicPotential h{number(obj, "mass", path + ".mass", 1.0), number(obj, "omega", path + ".omega", 1.0),
                                number(obj, "center", path + ".center", 0.0)};
            positive(h.mass, path + ".mass");
            positive(h.omega, path + ".omega");
            return h;
        }
        if (type == "barrier") {
            BarrierPotential b{number(obj, "height", path + ".height", 1.0),
                               number(obj, "half_width", path + ".half_width", 0.5),
                               number(obj, "center", path + ".center", 0.0)};
            if (!(b.half_width >= 0.0)) fail(path + ".half_width", "must be >= 0");
            return b;
        }
        if (type == "tabulated") {
            const json* v = child(obj, "values");
            TabulatedPotential t;
            if (!v || !v->is_array()) {
                fail(path + ".values", "expected an array of numbers");
                return t;
            }
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number() || !std::isfinite((*v)[i].get<double>())) {
                    fail(path + ".values[" + std::to_string(i) + "]", "expected a finite number");
                    continue;
                }
                t.values.push_back((*v)[i].get<double>());
            }
            return t;
        }
        fail(path + ".type", "unknown potential type '" + type + "' (free, harmonic, barrier, tabulated)");
        return FreePotential{};
    }

    GridConfig grid(const json& obj, const std::string& path) {
        GridConfig g;
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return g;
        }
        g.n = integer(obj, "n", path + ".n", g.n);
        if (child(obj, "x_min")) g.x_min = number(obj, "x_min", path + ".x_min", 0.0);
        g.dx = number(obj, "dx", path + ".dx", g.dx);
        if (g.n < 16 || !std::has_single_bit(static_cast<unsigned long>(g.n)))
            fail(path + ".n", "must be a power of two >= 16 (got " + std::to_string(g.n) + ")");
        positive(g.dx, path + ".dx");
        return g;
    }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config:\n" + join(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(const json& doc) {
    Reader r;
    ExperimentConfig c;
    c.source = doc;
    if (!doc.is_object()) throw ConfigError({"(root): expected a JSON object"});

    static const std::vector<std::string> known{"scenario", "state",      "potential",  "grid",
                                                "grid2",    "mass",       "epsilon",    "dt",
                                                "t_final",  "snapshot_stride", "checkpoint_every", "ensemble",
                                                "output",   "tolerances"};
    for (const auto& [key, value] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) r.fail(key, "unknown field");

    const std::string scenario = r.text(doc, "scenario", "scenario", "");
    bool found = false;
    for (const auto& [k, name] : scenario_names())
        if (name == scenario) c.scenario = k, found = true;
    if (!found) r.fail("scenario", "unknown scenario '" + scenario + "' (run1d, run2d, wigner-compare, takabayasi)");

    if (const json* s = r.child(doc, "state"))
        c.state = r.state(*s, "state");
    else
        r.fail("state", "missing");
    if (const json* p = r.child(doc, "potential")) c.potential = r.potential(*p, "potential");
    if (const json* g = r.child(doc, "grid")) c.grid = r.grid(*g, "grid");
    if (const json* g = r.child(doc, "grid2")) c.grid2 = r.grid(*g, "grid2");

    c.mass = r.number(doc, "mass", "mass", c.mass);
    r.positive(c.mass, "mass");
    c.epsilon = static_cast<int>(r.integer(doc, "epsilon", "epsilon", c.epsilon));
    if (c.epsilon != 1 && c.epsilon != -1) r.fail("epsilon", "must be +1 or -1 (got " + std::to_string(c.epsilon) + ")");
    c.dt = r.number(doc, "dt", "dt", c.dt);
    r.positive(c.dt, "dt");
    c.t_final = r.number(doc, "t_final", "t_final", c.t_final);
    if (!(c.t_final >= 0.0)) r.fail("t_final", "must be >= 0");
    c.snapshot_stride = r.integer(doc, "snapshot_stride", "snapshot_stride", c.snapshot_stride);
    if (c.snapshot_stride < 1) r.fail("snapshot_stride", "must be >= 1");
    c.checkpoint_every = r.number(doc, "checkpoint_every", "checkpoint_every", c.checkpoint_every);
    r.positive(c.checkpoint_every, "checkpoint_every");

    if (const json* e = r.child(doc, "ensemble")) {
        c.ensemble_size = r.integer(*e, "n", "ensemble.n", c.ensemble_size);
        if (c.ensemble_size < 1) r.fail("ensemble.n", "must be >= 1");
        const json* seed = r.child(*e, "seed");
        if (seed && !(seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<long>() >= 0)))
            r.fail("ensemble.seed", "expected a nonnegative integer, got " + seed->dump());
        else if (seed)
            c.seed = seed->get<std::uint64_t>();
        c.trajectories_written = r.integer(*e, "write", "ensemble.write", c.trajectories_written);
        if (c.trajectories_written < 0) r.fail("ensemble.write", "must be >= 0");
    }
    if (r.child(doc, "output")) c.output_dir = r.text(doc, "output", "output", c.output_dir.string());

    if (const json* t = r.child(doc, "tolerances")) {
        auto& tol = c.tolerances;
        tol.ks = r.number(*t, "ks", "tolerances.ks", tol.ks);
        tol.ks_2d = r.number(*t, "ks_2d", "tolerances.ks_2d", tol.ks_2d);
        tol.takabayasi_l1 = r.number(*t, "takabayasi_l1", "tolerances.takabayasi_l1", tol.takabayasi_l1);
        tol.wigner_l1 = r.number(*t, "wigner_l1", "tolerances.wigner_l1", tol.wigner_l1);
        tol.wigner_min = r.number(*t, "wigner_min", "tolerances.wigner_min", tol.wigner_min);
        tol.flagged_fraction = r.number(*t, "flagged_fraction", "tolerances.flagged_fraction", tol.flagged_fraction);
    }

    // cross-field checks
    const bool two_d = is_two_dimensional(c.state);
    if (c.scenario == Scenario::run2d && !two_d) r.fail("state.type", "run2d needs a gaussian2d or superposition2d state");
    if (c.scenario != Scenario::run2d && two_d) r.fail("state.type", to_string(c.scenario) + " needs a 1D state");
    if (c.grid2 && c.scenario != Scenario::run2d) r.fail("grid2", "only used by run2d");
    if (const auto* t = std::get_if<TabulatedPotential>(&c.potential))
        if (static_cast<long>(t->values.size()) != c.grid.n)
            r.fail("potential.values", "has " + std::to_string(t->values.size()) + " entries, grid.n is " +
                                           std::to_string(c.grid.n));
    if (c.scenario == Scenario::run2d && !std::holds_alternative<FreePotential>(c.potential) &&
        !std::holds_alternative<HarmonicPotential>(c.potential))
        r.fail("potential.type", "run2d supports free and harmonic (applied on both axes)");
    if (c.dt > 0 && c.snapshot_stride >= 1 && c.checkpoint_every > 0 && c.t_final >= 0) {
        auto whole = [](double r) { return std::abs(r - std::round(r)) <= 1e-6 * std::max(1.0, r); };
        const bool snapshots = c.scenario == Scenario::run1d || c.scenario == Scenario::takabayasi;
        const double frame = snapshots ? c.dt * double(c.snapshot_stride) : c.dt;
        if (!whole(c.t_final / frame))
            r.fail("t_final", snapshots ? "must be a whole multiple of dt * snapshot_stride" : "must be a whole number of dt steps");
        if (snapshots && (!whole(c.checkpoint_every / frame) || c.checkpoint_every < frame * (1 - 1e-9)))
            r.fail("checkpoint_every", "must be a whole multiple of dt * snapshot_stride");
    }

    if (!r.problems.empty()) throw ConfigError(r.problems);

    // preconditions that need the built objects
    try {
        const auto g1 = c.grid.build();
        if (two_d)
            (void)build<double>(c.state, g1, c.grid2 ? c.grid2->build() : g1);
        else
            (void)build<double>(c.state, g1);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        throw ConfigError({what.rfind("state", 0) == 0 ? what : "state: " + what});
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open"});
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
    return parse_config(doc);
}

}  // namespace cqm::app
