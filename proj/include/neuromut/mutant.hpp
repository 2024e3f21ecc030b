#pragma once

#include <string>
#include <vector>

namespace neuromut {

// One beam-search hypothesis promoted to a mutant candidate: the abstract
// token stream (specials stripped), its total log-probability, and its
// 1-based rank within the beam.
struct MutantCandidate {
    std::vector<std::string> tokens;
    double log_prob = 0.0;
    int rank = 1;
    bool finished = true;  // ended with the end-of-sequence token

    bool operator==(const MutantCandidate& o) const {
        return tokens == o.tokens && log_prob == o.log_prob && rank == o.rank &&
               finished == o.finished;
    }
};

}  // namespace neuromut
