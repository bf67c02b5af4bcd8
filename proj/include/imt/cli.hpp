#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "imt/corpus_io.hpp"
#include "imt/decoder.hpp"
#include "imt/scorer.hpp"
#include "imt/simulator.hpp"

namespace imt {

// Exit codes of the imt tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one simulated session per corpus pair on `threads` workers. Results
// keep corpus order whatever order the workers finish in.
std::vector<SessionLog> simulate_corpus(const ParallelCorpus& corpus, const Scorer& scorer,
                                        const DecoderConfig& decoder_config, const SimConfig& sim_config,
                                        std::size_t threads = 1);

// Entry point of the `imt` tool (translate, simulate, score, tune-gap, serve).
// argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace imt
