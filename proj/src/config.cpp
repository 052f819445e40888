#include "pmsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pmsim {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> keys;
};

using Document = std::map<std::string, Section>;

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& s) {
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_name(section)) fail(line_no, "bad section name '" + section + "'");
            auto [it, inserted] = doc.try_emplace(section, Section{line_no, {}});
            if (!inserted) it->second.line = std::min(it->second.line, line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) fail(line_no, "bad key name '" + key + "'");
        if (section.empty()) fail(line_no, "key '" + key + "' appears before any [section]");
        auto& sec = doc[section];
        if (sec.line == 0) sec.line = line_no;
        auto [it, inserted] = sec.keys.try_emplace(key, Entry{value, line_no});
        if (!inserted)
            fail(line_no, "duplicate key '" + key + "' in [" + section + "] (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return doc;
}

class Reader {
  public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    const Section* section(const std::string& name) {
        known_sections_.push_back(name);
        const auto it = doc_.find(name);
        return it == doc_.end() ? nullptr : &it->second;
    }

    const Entry* take(const Section* sec, const std::string& key) {
        if (!sec) return nullptr;
        const auto it = sec->keys.find(key);
        if (it == sec->keys.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void reject_unknown() const {
        for (const auto& [name, sec] : doc_) {
            const bool known = std::find(known_sections_.begin(), known_sections_.end(), name) !=
                                   known_sections_.end() ||
                               name.rfind("condition.", 0) == 0;
            if (!known) fail(sec.line, "unknown section [" + name + "]");
            for (const auto& [key, entry] : sec.keys)
                if (!entry.used)
                    fail(entry.line, "unknown key '" + key + "' in [" + name + "]");
        }
    }

  private:
    const Document& doc_;
    std::vector<std::string> known_sections_;
};

double to_double(const Entry& e, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(e.line, "value for '" + key + "' is not a number: '" + e.value + "'");
    return v;
}

long long to_int(const Entry& e, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(e.line, "value for '" + key + "' is not an integer: '" + e.value + "'");
    return v;
}

std::uint64_t to_u64(const Entry& e, const std::string& key) {
    if (!e.value.empty() && e.value.front() == '-')
        fail(e.line, "value for '" + key + "' must be non-negative: '" + e.value + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        fail(e.line, "value for '" + key + "' is not an unsigned integer: '" + e.value + "'");
    return v;
}

bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, "value for '" + key + "' must be true or false: '" + e.value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::vector<double> to_double_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : split_list(e.value)) {
        if (item.empty()) fail(e.line, "empty element in list for '" + key + "'");
        out.push_back(to_double(Entry{item, e.line}, key));
    }
    if (out.empty()) fail(e.line, "empty list for '" + key + "'");
    return out;
}

// Either "start:stop:count" (inclusive linear spacing) or a comma list.
std::vector<double> to_grid(const Entry& e, const std::string& key) {
    if (e.value.find(':') == std::string::npos) return to_double_list(e, key);
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(e.value);
    while (std::getline(in, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) fail(e.line, "grid for '" + key + "' must be start:stop:count");
    const double start = to_double(Entry{parts[0], e.line}, key);
    const double stop = to_double(Entry{parts[1], e.line}, key);
    const long long count = to_int(Entry{parts[2], e.line}, key);
    if (count < 1) fail(e.line, "grid count for '" + key + "' must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(start);
        return out;
    }
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (long long i = 0; i < count; ++i)
        out.push_back(i + 1 == count ? stop : start + step * static_cast<double>(i));
    return out;
}

void require_range(bool ok, const Entry& e, const std::string& key, const std::string& range) {
    if (!ok) fail(e.line, "value for '" + key + "' out of range (expected " + range + ")");
}

}  // namespace

std::map<std::string, AtmosphereCondition> builtin_conditions() {
    return {
        {"day1", {0.01, 1.64e-16, 0.9}},   {"day2", {0.05, 8.00e-16, 0.9}},
        {"day3", {0.10, 1.60e-15, 0.9}},   {"night1", {0.61, 1.12e-16, 0.9}},
        {"night2", {3.00, 5.50e-16, 0.9}}, {"night3", {6.10, 1.10e-15, 0.9}},
    };
}

const AtmosphereCondition& RunConfig::condition(const std::string& label) const {
    const auto it = conditions.find(label);
    if (it == conditions.end()) throw ConfigError("unknown weather preset '" + label + "'");
    return it->second;
}

RunConfig parse_config(const std::string& text) {
    const Document doc = tokenize(text);
    Reader reader(doc);
    RunConfig cfg;

    const Section* run = reader.section("run");
    const Entry* seed = reader.take(run, "seed");
    const Entry* condition = reader.take(run, "condition");
    if (!seed || !condition) {
        std::string missing;
        if (!seed) missing += "[run] seed";
        if (!condition) missing += std::string(missing.empty() ? "" : ", ") + "[run] condition";
        throw ConfigError("config: missing required keys: " + missing);
    }
    cfg.scan.seed = to_u64(*seed, "seed");
    cfg.condition_label = condition->value;
    if (const Entry* e = reader.take(run, "scenario")) {
        if (e->value == "loss-only")
            cfg.scan.scenario = Scenario::loss_only;
        else if (e->value == "noisy")
            cfg.scan.scenario = Scenario::noisy;
        else
            fail(e->line, "scenario must be loss-only or noisy: '" + e->value + "'");
    }
    if (const Entry* e = reader.take(run, "workers")) {
        const long long v = to_int(*e, "workers");
        require_range(v >= 1 && v <= 1024, *e, "workers", ">= 1");
        cfg.scan.workers = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(run, "dump_samples")) cfg.dump_samples = to_bool(*e, "dump_samples");

    cfg.scan.zenith_deg = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0,
                           40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0, 75.0};
    const Section* scan = reader.section("scan");
    const Entry* chi_ext_entry = nullptr;
    if (const Entry* e = reader.take(scan, "zenith_deg")) {
        cfg.scan.zenith_deg = to_grid(*e, "zenith_deg");
        for (double z : cfg.scan.zenith_deg)
            require_range(z >= 0.0 && z <= 75.0, *e, "zenith_deg", "[0, 75] degrees");
    }
    if (const Entry* e = reader.take(scan, "samples_per_point")) {
        const long long v = to_int(*e, "samples_per_point");
        require_range(v >= 1, *e, "samples_per_point", ">= 1");
        cfg.scan.samples_per_point = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(scan, "n_bins")) {
        const long long v = to_int(*e, "n_bins");
        require_range(v >= 1, *e, "n_bins", ">= 1");
        cfg.scan.n_bins = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(scan, "aperture_radius_m")) {
        cfg.scan.aperture_radius_m = to_double(*e, "aperture_radius_m");
        require_range(cfg.scan.aperture_radius_m > 0.0, *e, "aperture_radius_m", "> 0");
    }
    if (const Entry* e = reader.take(scan, "w0_m")) {
        cfg.scan.w0_m = to_double(*e, "w0_m");
        require_range(cfg.scan.w0_m > 0.0, *e, "w0_m", "> 0");
    }
    if (const Entry* e = reader.take(scan, "wavelength_m")) {
        cfg.scan.wavelength_m = to_double(*e, "wavelength_m");
        require_range(cfg.scan.wavelength_m > 0.0, *e, "wavelength_m", "> 0");
    }
    if (const Entry* e = reader.take(scan, "match_statistic")) {
        if (e->value == "mean")
            cfg.scan.match_statistic = MatchStatistic::mean;
        else if (e->value == "median")
            cfg.scan.match_statistic = MatchStatistic::median;
        else if (e->value == "mode")
            cfg.scan.match_statistic = MatchStatistic::mode;
        else
            fail(e->line, "match_statistic must be mean, median, or mode: '" + e->value + "'");
    }
    if (const Entry* e = reader.take(scan, "chi_ext")) {
        chi_ext_entry = e;
        cfg.scan.chi_ext_override = to_double_list(*e, "chi_ext");
        for (double chi : cfg.scan.chi_ext_override)
            require_range(chi > 0.0 && chi <= 1.0, *e, "chi_ext", "(0, 1]");
    }
    if (const Entry* e = reader.take(scan, "fiber_attenuation_db_per_km")) {
        cfg.scan.fiber_attenuation_db_per_km = to_double(*e, "fiber_attenuation_db_per_km");
        require_range(cfg.scan.fiber_attenuation_db_per_km > 0.0, *e,
                      "fiber_attenuation_db_per_km", "> 0");
    }
    if (chi_ext_entry && cfg.scan.chi_ext_override.size() != cfg.scan.zenith_deg.size())
        fail(chi_ext_entry->line, "chi_ext lists " +
                                      std::to_string(cfg.scan.chi_ext_override.size()) +
                                      " values for " + std::to_string(cfg.scan.zenith_deg.size()) +
                                      " zenith points");

    const Section* geometry = reader.section("geometry");
    if (const Entry* e = reader.take(geometry, "altitude_km")) {
        cfg.scan.geometry.altitude_km = to_double(*e, "altitude_km");
        require_range(cfg.scan.geometry.altitude_km > 0.0, *e, "altitude_km", "> 0");
    }
    if (const Entry* e = reader.take(geometry, "atmosphere_km")) {
        cfg.scan.geometry.atmosphere_km = to_double(*e, "atmosphere_km");
        require_range(cfg.scan.geometry.atmosphere_km > 0.0 &&
                          cfg.scan.geometry.atmosphere_km <= cfg.scan.geometry.altitude_km,
                      *e, "atmosphere_km", "(0, altitude_km]");
    }

    const Section* imperfections = reader.section("imperfections");
    if (const Entry* e = reader.take(imperfections, "mode_match"))
        cfg.scan.imperfections.mode_match = to_double(*e, "mode_match");
    if (const Entry* e = reader.take(imperfections, "phase_mismatch_rad"))
        cfg.scan.imperfections.phase_mismatch_rad = to_double(*e, "phase_mismatch_rad");
    if (const Entry* e = reader.take(imperfections, "dark_count"))
        cfg.scan.imperfections.dark_count = to_double(*e, "dark_count");
    if (const Entry* e = reader.take(imperfections, "detector_eff"))
        cfg.scan.imperfections.detector_eff = to_double(*e, "detector_eff");
    if (const Entry* e = reader.take(imperfections, "ec_inefficiency"))
        cfg.scan.imperfections.ec_inefficiency = to_double(*e, "ec_inefficiency");
    if (imperfections) {
        try {
            cfg.scan.imperfections.validate();
        } catch (const std::exception& ex) {
            fail(imperfections->line, std::string("[imperfections] rejected: ") + ex.what());
        }
    }

    const Section* optimizer = reader.section("optimizer");
    if (const Entry* e = reader.take(optimizer, "mu_min"))
        cfg.scan.optimizer.mu_min = to_double(*e, "mu_min");
    if (const Entry* e = reader.take(optimizer, "mu_max"))
        cfg.scan.optimizer.mu_max = to_double(*e, "mu_max");
    if (const Entry* e = reader.take(optimizer, "coarse_points")) {
        const long long v = to_int(*e, "coarse_points");
        require_range(v >= 8, *e, "coarse_points", ">= 8");
        cfg.scan.optimizer.coarse_points = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(optimizer, "tolerance"))
        cfg.scan.optimizer.tolerance = to_double(*e, "tolerance");
    if (optimizer) {
        try {
            cfg.scan.optimizer.validate();
        } catch (const std::exception& ex) {
            fail(optimizer->line, std::string("[optimizer] rejected: ") + ex.what());
        }
    }

    const Section* quadrature = reader.section("quadrature");
    if (const Entry* e = reader.take(quadrature, "n_radial")) {
        const long long v = to_int(*e, "n_radial");
        require_range(v >= 2 && v <= 512, *e, "n_radial", "[2, 512]");
        cfg.scan.quadrature.n_radial = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(quadrature, "n_angular")) {
        const long long v = to_int(*e, "n_angular");
        require_range(v >= 2 && v <= 512, *e, "n_angular", "[2, 512]");
        cfg.scan.quadrature.n_angular = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(quadrature, "tolerance")) {
        cfg.scan.quadrature.tolerance = to_double(*e, "tolerance");
        require_range(cfg.scan.quadrature.tolerance > 0.0, *e, "tolerance", "> 0");
    }

    const Section* provider = reader.section("provider");
    bool direct_provider = false;
    if (const Entry* e = reader.take(provider, "type")) {
        if (e->value == "direct")
            direct_provider = true;
        else if (e->value != "downlink")
            fail(e->line, "provider type must be downlink or direct: '" + e->value + "'");
    }
    if (const Entry* e = reader.take(provider, "pointing_error_rad")) {
        cfg.scan.provider_model.pointing_error_rad = to_double(*e, "pointing_error_rad");
        require_range(cfg.scan.provider_model.pointing_error_rad >= 0.0, *e,
                      "pointing_error_rad", ">= 0");
    }
    if (const Entry* e = reader.take(provider, "turb_broaden_coeff")) {
        cfg.scan.provider_model.turb_broaden_coeff = to_double(*e, "turb_broaden_coeff");
        require_range(cfg.scan.provider_model.turb_broaden_coeff >= 0.0, *e,
                      "turb_broaden_coeff", ">= 0");
    }
    if (const Entry* e = reader.take(provider, "wander_coeff")) {
        cfg.scan.provider_model.wander_coeff = to_double(*e, "wander_coeff");
        require_range(cfg.scan.provider_model.wander_coeff >= 0.0, *e, "wander_coeff", ">= 0");
    }
    if (const Entry* e = reader.take(provider, "scint_coeff")) {
        cfg.scan.provider_model.scint_coeff = to_double(*e, "scint_coeff");
        require_range(cfg.scan.provider_model.scint_coeff >= 0.0, *e, "scint_coeff", ">= 0");
    }
    if (const Entry* e = reader.take(provider, "scatter_cross_section_m2")) {
        cfg.scan.scatter_cross_section_m2 = to_double(*e, "scatter_cross_section_m2");
        require_range(cfg.scan.scatter_cross_section_m2 >= 0.0, *e, "scatter_cross_section_m2",
                      ">= 0");
    }

    const Section* moments = reader.section("moments");
    if (direct_provider && !moments)
        throw ConfigError("config: provider type 'direct' requires a [moments] section");
    if (moments && !direct_provider)
        fail(moments->line, "[moments] requires provider type = direct");
    if (moments) {
        BeamStatistics stats;
        const Entry* mean = reader.take(moments, "mean");
        const Entry* cov = reader.take(moments, "cov");
        if (!mean || !cov)
            fail(moments->line, "[moments] requires keys 'mean' (4 values) and 'cov' (16 values)");
        const std::vector<double> m = to_double_list(*mean, "mean");
        if (m.size() != 4) fail(mean->line, "mean must list 4 values");
        const std::vector<double> c = to_double_list(*cov, "cov");
        if (c.size() != 16) fail(cov->line, "cov must list 16 values (row-major)");
        std::copy(m.begin(), m.end(), stats.mean.begin());
        std::copy(c.begin(), c.end(), stats.cov.begin());
        stats.w0_m = cfg.scan.w0_m;
        if (const Entry* e = reader.take(moments, "w0_m")) {
            stats.w0_m = to_double(*e, "w0_m");
            require_range(stats.w0_m > 0.0, *e, "w0_m", "> 0");
        }
        cfg.scan.direct_moments = stats;
    }

    const Section* point = reader.section("point");
    if (const Entry* e = reader.take(point, "eta")) {
        cfg.point.eta = to_double(*e, "eta");
        require_range(cfg.point.eta > 0.0 && cfg.point.eta <= 1.0, *e, "eta", "(0, 1]");
    }
    if (const Entry* e = reader.take(point, "mu")) {
        cfg.point.mu = to_double(*e, "mu");
        require_range(cfg.point.mu > 0.0, *e, "mu", "> 0");
    }

    const Section* pdr = reader.section("pdr");
    if (const Entry* e = reader.take(pdr, "zenith_deg")) {
        cfg.pdr.zenith_deg = to_double(*e, "zenith_deg");
        require_range(cfg.pdr.zenith_deg >= 0.0 && cfg.pdr.zenith_deg <= 75.0, *e, "zenith_deg",
                      "[0, 75] degrees");
    }
    if (const Entry* e = reader.take(pdr, "fiber_km")) {
        cfg.pdr.fiber_km = to_double(*e, "fiber_km");
        require_range(cfg.pdr.fiber_km >= 0.0, *e, "fiber_km", ">= 0");
    }
    if (const Entry* e = reader.take(pdr, "n_samples")) {
        const long long v = to_int(*e, "n_samples");
        require_range(v >= 1, *e, "n_samples", ">= 1");
        cfg.pdr.n_samples = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(pdr, "batch_size")) {
        const long long v = to_int(*e, "batch_size");
        require_range(v >= 1, *e, "batch_size", ">= 1");
        cfg.pdr.batch_size = static_cast<int>(v);
    }
    if (const Entry* e = reader.take(pdr, "round_digits")) {
        const long long v = to_int(*e, "round_digits");
        require_range(v >= 0 && v <= 15, *e, "round_digits", "[0, 15]");
        cfg.pdr.round_digits = static_cast<int>(v);
    }

    cfg.beamwidth.w0_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
    cfg.beamwidth.conditions = {"day1", "day2", "day3", "night1", "night2", "night3"};
    const Section* beamwidth = reader.section("beamwidth");
    const Entry* bw_conditions_entry = nullptr;
    if (const Entry* e = reader.take(beamwidth, "w0_grid")) {
        cfg.beamwidth.w0_grid = to_grid(*e, "w0_grid");
        for (double w0 : cfg.beamwidth.w0_grid)
            require_range(w0 > 0.0 && w0 <= 0.35, *e, "w0_grid", "(0, 0.35] m");
    }
    if (const Entry* e = reader.take(beamwidth, "conditions")) {
        bw_conditions_entry = e;
        cfg.beamwidth.conditions = split_list(e->value);
        if (cfg.beamwidth.conditions.empty()) fail(e->line, "empty list for 'conditions'");
    }
    if (const Entry* e = reader.take(beamwidth, "samples_per_point")) {
        const long long v = to_int(*e, "samples_per_point");
        require_range(v >= 1, *e, "samples_per_point", ">= 1");
        cfg.beamwidth.samples_per_point = static_cast<int>(v);
    }

    cfg.conditions = builtin_conditions();
    for (const auto& [name, sec] : doc) {
        if (name.rfind("condition.", 0) != 0) continue;
        const std::string label = name.substr(10);
        if (label.empty()) fail(sec.line, "empty condition label");
        if (cfg.conditions.count(label))
            fail(sec.line, "condition '" + label + "' redefines a built-in preset");
        AtmosphereCondition cond;
        const Section* user = reader.section(name);
        const Entry* n0 = reader.take(user, "n0_per_m3");
        const Entry* cn2 = reader.take(user, "cn2");
        if (!n0 || !cn2)
            fail(sec.line, "[" + name + "] requires keys 'n0_per_m3' and 'cn2'");
        cond.n0_per_m3 = to_double(*n0, "n0_per_m3");
        require_range(cond.n0_per_m3 >= 0.0, *n0, "n0_per_m3", ">= 0");
        cond.cn2 = to_double(*cn2, "cn2");
        require_range(cond.cn2 >= 0.0, *cn2, "cn2", ">= 0");
        if (const Entry* e = reader.take(user, "extinction")) {
            cond.extinction = to_double(*e, "extinction");
            require_range(cond.extinction > 0.0 && cond.extinction <= 1.0, *e, "extinction",
                          "(0, 1]");
        }
        cfg.conditions.emplace(label, cond);
    }

    reader.reject_unknown();

    const auto cond_it = cfg.conditions.find(cfg.condition_label);
    if (cond_it == cfg.conditions.end())
        fail(condition->line, "unknown weather preset '" + cfg.condition_label + "'");
    cfg.scan.condition = cond_it->second;

    for (const std::string& label : cfg.beamwidth.conditions) {
        if (!cfg.conditions.count(label)) {
            const int line = bw_conditions_entry ? bw_conditions_entry->line : run->line;
            fail(line, "unknown weather preset '" + label + "' in beamwidth conditions");
        }
    }

    try {
        cfg.scan.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& ex) {
        throw ConfigError(path + ": " + ex.what());
    }
}

}  // namespace pmsim
