// Runs the acceptance items and prints one PASS/FAIL line per item.
// Usage: acceptance [item ...]; with no arguments every item runs.
#include "sublin/acceptance.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    std::vector<int> ids;
    for (int k = 1; k < argc; ++k) ids.push_back(std::atoi(argv[k]));
    if (ids.empty()) ids = sublin::acceptance_ids();

    std::vector<sublin::AcceptanceItem> items;
    bool ok = true;
    for (int id : ids) {
        items.push_back(sublin::run_acceptance_item(id));
        ok = ok && items.back().pass;
        std::cerr << "item " << id << ": " << std::fixed << std::setprecision(2) << items.back().seconds << " s\n";
    }
    sublin::print_acceptance_table(std::cout, items);
    return ok ? 0 : 1;
}
