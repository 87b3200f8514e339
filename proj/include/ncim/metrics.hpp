#pragma once

#include <string>
#include <vector>

#include "ncim/detection.hpp"
#include "ncim/signal.hpp"

namespace ncim {

struct ErrorCounts {
  int missed = 0;       // Em
  int false_alarm = 0;  // Ef
  long bit_errors = 0;  // Bd, summed over slabs
};

struct TrialMetrics {
  double nmse = 0.0;
  double ader = 0.0;
  double ber_total = 0.0;
  ErrorCounts counts;
  int iterations = 0;
};

/// ||est - truth||_F / ||truth||_F (unsquared). Throws std::domain_error for a zero truth.
double nmse(const CMat& estimate, const CMat& truth);
double nmse_db(double linear_nmse);

ErrorCounts count_errors(const GroundTruth& gt, const Detection& det);

/// (Em + Ef) / K
double ader(int missed, int false_alarm, int num_devices);
double ader(const std::vector<int>& detected, const std::vector<int>& truth, int num_devices);

/// ((Em+Ef)*r*S + Bd) / ((Ka+Ef)*r*S) with r bits per selection and S selections per device.
double ber_total(const ErrorCounts& c, int num_active, int bits_per_selection, int selections_per_device = 1);

TrialMetrics evaluate(const GroundTruth& gt, const Detection& det, const CMat& truth);

struct ComplexityParams {
  double K = 0, I = 0, L = 0, M = 0, J = 1, N_tilde = 1, T = 0, Ka = 0, Q = 0;
};

/// Multiplication counts per algorithm id: "ae_jabid", "benchmark1", "gmmv_amp", "section_wise_amp",
/// "stf_jabid", "somp". Throws std::invalid_argument for anything else.
double complexity_count(const std::string& algorithm, const ComplexityParams& p);

/// -log10(BER) / log10(Cm); +inf for BER == 0.
double efficiency(double ber, double cm);

}  // namespace ncim
