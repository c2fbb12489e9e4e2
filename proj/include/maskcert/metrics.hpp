#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maskcert/certification.hpp"

namespace maskcert {

// Dataset-level certified metrics. mcb/mcr are lower medians; misclassified
// ("N/A") entries sort below every radius, and an absent value means the
// median itself fell on an uncertified text.
struct CertifiedSummary {
    double accuracy = 0.0;
    std::optional<int> mcb;
    std::optional<double> mcr;
};

CertifiedSummary median_certified(const std::vector<Certificate>& certificates);

struct PredictionRecord {
    std::string id;
    int gold = 0;
    int predicted = 0;
};

struct AttackRecord {
    std::string id;
    bool success = false;
};

// Clean accuracy, accuracy under attack, and attack success rate. Attacks
// must have been attempted exactly on the correctly-classified subset;
// succ = (cln - boa) / cln holds by construction.
struct EmpiricalSummary {
    double cln = 0.0;
    double boa = 0.0;
    double succ = 0.0;
};

EmpiricalSummary empirical_summary(const std::vector<PredictionRecord>& clean,
                                   const std::vector<AttackRecord>& attacked);

}  // namespace maskcert
