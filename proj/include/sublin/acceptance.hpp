#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace sublin {

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    /// Fault injection: hands 1/t* to the identity checks in place of t*.
    bool invertTstar = false;
};

struct AcceptanceItem {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> details;  // one line per sub-check, "ok"/"FAIL" prefixed
    double seconds = 0.0;
};

/// Item ids in running order (1..9).
std::vector<int> acceptance_ids();
const char* acceptance_name(int id);

/// Runs one item. Exceptions from the pipeline are caught and reported as a
/// failed sub-check. Throws std::out_of_range for unknown ids.
AcceptanceItem run_acceptance_item(int id, const AcceptanceOptions& options = {});

/// One `PASS|FAIL <id> <name>` line per item followed by its indented
/// sub-checks. Timings are not printed so that tables are reproducible.
void print_acceptance_table(std::ostream& out, const std::vector<AcceptanceItem>& items);

}  // namespace sublin
