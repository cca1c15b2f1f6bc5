#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spacing {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CNF formula: clauses are lists of DIMACS literals (+i / -i, 1-based).
struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;

    int num_clauses() const { return static_cast<int>(clauses.size()); }
};

/// Standard DIMACS cnf. Comment lines start with 'c'; the clause count in
/// the header is cross-checked; empty clauses are reported as errors.
inline Cnf parse_dimacs(std::istream& in) {
    Cnf cnf;
    bool have_header = false;
    int declared_clauses = 0;
    std::vector<int> current;
    std::string line;
    int line_no = 0;

    auto fail = [&](const std::string& msg) {
        throw ParseError("dimacs line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c')
            continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string p, fmt;
            if (!(ls >> p) || p != "p")
                fail("expected 'p cnf' header");
            if (!(ls >> fmt) || fmt != "cnf")
                fail("expected 'p cnf' header");
            if (!(ls >> cnf.num_vars >> declared_clauses) || cnf.num_vars < 0 ||
                declared_clauses < 0)
                fail("bad header counts");
            have_header = true;
            continue;
        }
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (current.empty())
                    fail("empty clause");
                cnf.clauses.push_back(current);
                current.clear();
            } else {
                if (std::abs(lit) > cnf.num_vars)
                    fail("literal out of range");
                current.push_back(lit);
            }
        }
        if (!ls.eof())
            fail("bad literal");
    }
    if (!have_header)
        throw ParseError("dimacs: missing 'p cnf' header");
    if (!current.empty())
        throw ParseError("dimacs: unterminated clause");
    if (cnf.num_clauses() != declared_clauses)
        throw ParseError("dimacs: header declares " +
                         std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(cnf.num_clauses()));
    return cnf;
}

inline Cnf parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline Cnf load_dimacs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read " + path);
    return parse_dimacs(in);
}

/// True when the positive-literal assignment encoded in `mask` satisfies
/// every clause (bit i-1 set means p_i true).
inline bool satisfies(const Cnf& cnf, std::uint32_t mask) {
    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (int lit : clause) {
            int v = std::abs(lit) - 1;
            if (((mask >> v) & 1) == (lit > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat)
            return false;
    }
    return true;
}

/// Exhaustive truth-table satisfiability check.
inline bool brute_sat(const Cnf& cnf) {
    if (cnf.num_vars > 24)
        throw std::invalid_argument("brute_sat: too many variables");
    std::uint32_t count = std::uint32_t{1} << cnf.num_vars;
    for (std::uint32_t mask = 0; mask < count; ++mask)
        if (satisfies(cnf, mask))
            return true;
    return false;
}

}  // namespace spacing
