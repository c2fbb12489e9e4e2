#include "maskcert/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace maskcert {

CertifiedSummary median_certified(const std::vector<Certificate>& certificates) {
    if (certificates.empty())
        throw std::invalid_argument("median_certified requires at least one certificate");

    // Sort keys: uncertified entries (misclassified or no radius) sit below
    // every real radius, matching the "-inf certified robustness" rule.
    std::vector<long> radii;
    std::vector<double> rates;
    long correct = 0;
    for (const auto& cert : certificates) {
        if (cert.label) ++correct;
        if (cert.label && cert.radius) {
            radii.push_back(*cert.radius);
            rates.push_back(*cert.certified_rate);
        } else {
            radii.push_back(-1);
            rates.push_back(-1.0);
        }
    }
    std::sort(radii.begin(), radii.end());
    std::sort(rates.begin(), rates.end());
    const std::size_t median_index = (certificates.size() - 1) / 2;  // lower median

    CertifiedSummary summary;
    summary.accuracy = static_cast<double>(correct) / static_cast<double>(certificates.size());
    if (radii[median_index] >= 0) summary.mcb = static_cast<int>(radii[median_index]);
    if (rates[median_index] >= 0.0) summary.mcr = rates[median_index];
    return summary;
}

EmpiricalSummary empirical_summary(const std::vector<PredictionRecord>& clean,
                                   const std::vector<AttackRecord>& attacked) {
    if (clean.empty()) throw std::invalid_argument("empirical_summary requires predictions");

    std::unordered_set<std::string> correct_ids;
    for (const auto& record : clean) {
        if (record.predicted == record.gold)
            if (!correct_ids.insert(record.id).second)
                throw std::invalid_argument("duplicate prediction id: " + record.id);
    }

    // Attacks must cover exactly the correctly-classified subset.
    std::unordered_set<std::string> attacked_ids;
    long flipped = 0;
    for (const auto& record : attacked) {
        if (!attacked_ids.insert(record.id).second)
            throw std::invalid_argument("duplicate attack id: " + record.id);
        if (!correct_ids.count(record.id))
            throw std::invalid_argument("attack id not in the clean-correct subset: " + record.id);
        if (record.success) ++flipped;
    }
    if (attacked_ids.size() != correct_ids.size())
        throw std::invalid_argument("attack records must cover every clean-correct example");

    const auto total = static_cast<double>(clean.size());
    const auto correct = static_cast<double>(correct_ids.size());
    EmpiricalSummary summary;
    summary.cln = correct / total;
    summary.boa = (correct - static_cast<double>(flipped)) / total;
    summary.succ = correct > 0 ? static_cast<double>(flipped) / correct : 0.0;
    return summary;
}

}  // namespace maskcert
