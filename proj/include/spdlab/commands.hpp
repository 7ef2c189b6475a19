#pragma once

#include "spdlab/config.hpp"
#include "spdlab/metrics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spdlab {

/// Runs the Monte-Carlo experiment and writes its outputs to `out_dir`.
void cmd_run(const ExperimentConfig& cfg, int workers, const std::string& out_dir,
             std::ostream& log);

/// Reads one SPD pair per line ("d", then the d*d entries of C1 and of C2,
/// row-major; blank lines and '#' comments skipped) and writes
/// "pair,metric,distance" rows. Parse errors name the line.
void cmd_metrics(std::istream& in, Metric metric, ProductWeight c, std::ostream& out);

/// One SPD tensor per line ("d" then d*d entries).
std::vector<SpdMat> read_tensors(std::istream& in);

/// Fréchet means of an ensemble under every metric, as a JSON document.
void cmd_means(const std::vector<SpdMat>& tensors, ProductWeight c, std::ostream& out);

/// CSV with header "sample,c11,c12,..." and one row of flattened entries per
/// realisation; n = 0 gives the header alone.
void cmd_sample(const ModelSpec& model, std::size_t n, std::uint64_t seed, int workers,
                std::ostream& out);

struct DistortionReport {
  double eta;
  double rho2;
  Mat reference;    ///< H
  Mat closed_form;  ///< hyd(H) + rho2 dev(H)
  Mat mc_mean;
  Mat standard_error;
  Mat deviation;    ///< |mc_mean - closed_form|
  bool pass;
};

/// Checks the distorted Euclidean mean of R H R^T against Monte Carlo over
/// n von Mises rotations. H is the log of the 2D orthotropic scenario
/// reference, or of 0.54 I when `isotropic`. Passes when every entry
/// deviates by at most 3 SE plus a rounding floor of 1e-12 max(1, |H|).
DistortionReport verify_distortion(double eta, std::size_t n, std::uint64_t seed, int workers,
                                   bool isotropic);
void print_report(const DistortionReport& r, std::ostream& out);

void cmd_mesh(const MeshSpec& spec, std::ostream& out);

}  // namespace spdlab
