#pragma once

#include "ican/datagen.hpp"
#include "ican/ican.hpp"
#include "ican/sample.hpp"

#include <string>

namespace ican {

// Two numeric comma-separated columns, optional single header line.
// Malformed rows report their 1-based line number. Does not normalize.
PairedSample load_csv(const std::string& path);

// Written with shortest round-trip decimals under an "x,y" header.
void save_csv(const PairedSample& sample, const std::string& path);

void save_truth_csv(const GroundTruth& truth, const std::string& path);

// Machine-checkable fit report:
// {decision, var_ratio, p_values, iterations, config, normalization,
//  t_hat, curve_eval}.
std::string report_json(const IcanResult& result, const IcanConfig& config,
                        const Normalization& normalization);

}  // namespace ican
