#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pintrack::figdata {

// Canned synthetic experiment sweeps behind `figdata <name>`. Each one reruns
// a study on generated worlds and streams a plot-ready CSV: a `# seed=` audit
// line, a header row, then data rows. No plotting happens in-process.
enum class Experiment {
    fig4, // drive endpoint error vs route length
    fig5, // candidate-set narrowing per processed turn
    fig6, // flight matcher accuracy vs noise scale, departure unknown
    fig7, // same sweep with the departure airport pinned
    fig8, // seeded walk endpoint errors
    fig9, // drive recovery vs sampling rate
};

// Accepts the lowercase names above; raises UnknownExperiment otherwise.
Experiment parse_experiment(const std::string& name);
const char* to_string(Experiment e);

void run_experiment(Experiment e, std::uint64_t seed, std::ostream& out);

} // namespace pintrack::figdata
