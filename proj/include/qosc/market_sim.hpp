#pragma once

#include <cstdint>
#include <vector>

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qosc {

enum class TieBreak { LowestPrice, Truthful };
// SelfSelect: each user takes the best posted contract. Assigned: the SP
// observes the type and offers only the designated one (full information).
enum class ChoiceRule { SelfSelect, Assigned };

struct SimConfig {
    std::size_t n_users = 100000;
    std::uint64_t seed = 7;
    int menu_resolution = 256;  // posted contracts, evenly spaced in type
    TieBreak tie_break = TieBreak::LowestPrice;
    ChoiceRule choice = ChoiceRule::SelfSelect;
    bool record_users = false;
};

struct UserRecord {
    double delta;
    int choice_index;  // -1 when every posted contract has negative payoff
    double q;
    double p;
    double payoff;
    double profit;
};

struct SimOutcome {
    double realized_profit = 0.0;  // mean over users of p - C(q)
    double profit_std_error = 0.0;
    double truthfulness_rate = 0.0;
    double mean_user_payoff = 0.0;
    double participation_rate = 0.0;
    std::vector<long> per_type_histogram;  // choices per posted contract
    std::vector<UserRecord> users;         // filled when record_users
};

SimOutcome simulate(const ContractMenu& menu, const TypeDistribution& dist,
                    const ModelParams& params, const SimConfig& cfg);

struct ScenarioComparison {
    double hidden_profit;
    double benchmark_profit;
    double difference;  // benchmark - hidden
    double std_error;   // of the paired difference
};
ScenarioComparison compare_scenarios(const ModelParams& params,
                                     const TypeDistribution& dist,
                                     const SimConfig& cfg);

}  // namespace qosc
