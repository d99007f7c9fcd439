#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dyadic/verify.hpp"

namespace dyadic {

struct PlotOptions {
  int width = 720;
  int height = 540;
  std::string title = "operator norm against a2";
  std::string x_label = "a2 constant";
  std::string y_label = "weighted norm";
};

// Log-log scatter of the successful sweep rows, with the fitted power law
// drawn across the data range when a fit is supplied.
void write_loglog_plot(std::ostream& out, const std::vector<SweepRow>& rows,
                       const SlopeFit* fit, const PlotOptions& opts = {});

}  // namespace dyadic
