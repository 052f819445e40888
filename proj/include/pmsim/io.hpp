#pragma once

#include <string>
#include <vector>

#include "pmsim/keyrate.hpp"
#include "pmsim/scan.hpp"

namespace pmsim {

// 12 significant digits, shortest form.
std::string format_value(double v);

// All writers emit a header row, one record per line, `\n` endings, UTF-8.
// They throw std::runtime_error when the file cannot be opened.
void write_akr_csv(const std::string& path, const std::vector<AkrPoint>& points);
void write_pdr_csv(const std::string& path, const PdrResult& result);
void write_beamwidth_csv(const std::string& path, const std::vector<BeamwidthRow>& rows);
void write_samples_csv(const std::string& path, const std::vector<BeamParams>& beams,
                       const std::vector<double>& etas);

std::string rate_point_json(double eta, double mu, Scenario scenario,
                            const ImperfectionParams& imp, double rate);

// POVM elements and announcement statistics at one evaluation point.
std::string povm_debug_json(double eta, double mu, Scenario scenario,
                            const ImperfectionParams& imp);

void write_text(const std::string& path, const std::string& content);

}  // namespace pmsim
