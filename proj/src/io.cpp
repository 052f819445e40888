#include "pmsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pmsim {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

nlohmann::json matrix_json(const Mat4& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 4; ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json imperfections_json(const ImperfectionParams& imp) {
    return {{"mode_match", imp.mode_match},
            {"phase_mismatch_rad", imp.phase_mismatch_rad},
            {"dark_count", imp.dark_count},
            {"detector_eff", imp.detector_eff},
            {"ec_inefficiency", imp.ec_inefficiency}};
}

const char* scenario_name(Scenario s) {
    return s == Scenario::loss_only ? "loss-only" : "noisy";
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_akr_csv(const std::string& path, const std::vector<AkrPoint>& points) {
    std::ofstream out = open_out(path);
    out << "zenith_deg,slant_km,fiber_km,mu_star,akr\n";
    for (const AkrPoint& p : points)
        out << format_value(p.zenith_deg) << ',' << format_value(p.slant_km) << ','
            << format_value(p.fiber_km) << ',' << format_value(p.mu_star) << ','
            << format_value(p.akr) << '\n';
}

void write_pdr_csv(const std::string& path, const PdrResult& result) {
    std::ofstream out = open_out(path);
    out << "rate_value,probability\n";
    for (std::size_t i = 0; i < result.rate_values.size(); ++i)
        out << format_value(result.rate_values[i]) << ','
            << format_value(result.probabilities[i]) << '\n';
}

void write_beamwidth_csv(const std::string& path, const std::vector<BeamwidthRow>& rows) {
    std::ofstream out = open_out(path);
    out << "w0_m,condition,mean_transmittance\n";
    for (const BeamwidthRow& r : rows)
        out << format_value(r.w0_m) << ',' << r.condition << ','
            << format_value(r.mean_transmittance) << '\n';
}

void write_samples_csv(const std::string& path, const std::vector<BeamParams>& beams,
                       const std::vector<double>& etas) {
    if (beams.size() != etas.size())
        throw std::invalid_argument("sample dump: beam and transmittance counts differ");
    std::ofstream out = open_out(path);
    out << "sample_index,x0,y0,w1,w2,orient,eta\n";
    for (std::size_t i = 0; i < beams.size(); ++i)
        out << i << ',' << format_value(beams[i].x0_m) << ',' << format_value(beams[i].y0_m)
            << ',' << format_value(beams[i].w1_m) << ',' << format_value(beams[i].w2_m) << ','
            << format_value(beams[i].orient_rad) << ',' << format_value(etas[i]) << '\n';
}

std::string rate_point_json(double eta, double mu, Scenario scenario,
                            const ImperfectionParams& imp, double rate) {
    nlohmann::json j{{"eta", eta}, {"mu", mu}, {"scenario", scenario_name(scenario)},
                     {"rate", rate}};
    if (scenario == Scenario::noisy) j["imperfections"] = imperfections_json(imp);
    return j.dump(2) + "\n";
}

std::string povm_debug_json(double eta, double mu, Scenario scenario,
                            const ImperfectionParams& imp) {
    const ImperfectionParams eff =
        scenario == Scenario::loss_only ? ImperfectionParams{1.0, 0.0, 0.0, 1.0, 1.0} : imp;
    const Povm4 povm =
        scenario == Scenario::loss_only
            ? lossonly_povm(eta, mu)
            : model_povm(mismatch_povm(eta, mu, eff.mode_match, eff.phase_mismatch_rad),
                         eff.dark_count);
    const AnnouncementStats stats = announcement_stats(eta, mu, eff);
    nlohmann::json j{{"eta", eta},
                     {"mu", mu},
                     {"scenario", scenario_name(scenario)},
                     {"imperfections", imperfections_json(eff)},
                     {"povm",
                      {{"plus", matrix_json(povm.plus)},
                       {"minus", matrix_json(povm.minus)},
                       {"inconclusive", matrix_json(povm.inconclusive)},
                       {"dustbin", matrix_json(povm.dustbin)}}},
                     {"announcements",
                      {{"p_plus", stats.p_plus},
                       {"p_minus", stats.p_minus},
                       {"eps_plus", stats.eps_plus},
                       {"eps_minus", stats.eps_minus}}}};
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
}

}  // namespace pmsim
