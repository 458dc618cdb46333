// One line per acceptance criterion; exit status 1 if any fails.
// usage: acceptance [--seed N] [ID...]

#include <cstdlib>
#include <iostream>

#include "ifol/suite.hpp"

int main(int argc, char** argv) {
    uint64_t seed = 7;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
        else ids.push_back(std::atoi(a.c_str()));
    }
    if (ids.empty())
        for (auto& c : ifol::suite::criteria()) ids.push_back(c.id);
    bool all = true;
    for (int id : ids) {
        auto r = ifol::suite::run(id, seed);
        std::cout << ifol::suite::result_line(r) << std::endl;
        if (!r.pass && !r.counterexample.empty()) std::cout << "  counterexample:\n" << r.counterexample << std::endl;
        std::cerr << "  [" << r.id << "] " << r.seconds << " s" << std::endl;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
