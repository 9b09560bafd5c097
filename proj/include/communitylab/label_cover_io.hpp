#pragma once

// Text formats for formulas and Label Cover instances.
//
// DIMACS CNF: "c" comment lines, one "p cnf V C" header, clauses as
// 0-terminated literal lists. Every clause must have exactly three literals.
//
// Label Cover:
//   labelcover nA nB sigmaA sigmaB m
//   a b π(0) π(1) ... π(sigmaA-1)        (m lines)

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "communitylab/error.hpp"
#include "communitylab/label_cover.hpp"

namespace communitylab {

inline Cnf3 parse_dimacs(std::istream& in, const std::string& source = "<dimacs>") {
    Cnf3 f;
    bool have_header = false;
    std::size_t declared_clauses = 0;
    std::vector<int> current;
    std::size_t clause_line = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") continue;
        if (tok == "%") break;
        if (tok == "p") {
            std::string fmt;
            long long v = -1, c = -1;
            if (have_header) throw ParseError(source, lineno, "duplicate problem line");
            if (!(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0)
                throw ParseError(source, lineno, "expected 'p cnf <vars> <clauses>'");
            f.num_vars = static_cast<std::uint32_t>(v);
            declared_clauses = static_cast<std::size_t>(c);
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError(source, lineno, "clause before problem line");
        do {
            long long lit = 0;
            try {
                std::size_t used = 0;
                lit = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError(source, lineno, "invalid literal '" + tok + "'");
            }
            if (lit == 0) {
                if (current.size() != 3)
                    throw ParseError(source, clause_line ? clause_line : lineno,
                                     "clause has " + std::to_string(current.size()) + " literals, expected 3");
                f.clauses.push_back({current[0], current[1], current[2]});
                current.clear();
                clause_line = 0;
                continue;
            }
            if (static_cast<unsigned long long>(lit < 0 ? -lit : lit) > f.num_vars)
                throw ParseError(source, lineno, "literal " + tok + " exceeds declared variable count");
            if (current.empty()) clause_line = lineno;
            current.push_back(static_cast<int>(lit));
        } while (ls >> tok);
    }
    if (!have_header) throw ParseError(source, lineno, "missing problem line");
    if (!current.empty()) throw ParseError(source, clause_line, "unterminated clause");
    if (f.clauses.size() != declared_clauses)
        throw ParseError(source, lineno,
                         "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                             std::to_string(f.clauses.size()));
    return f;
}

inline Cnf3 parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline void write_dimacs(std::ostream& out, const Cnf3& f) {
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) out << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
}

inline LabelCoverInstance parse_label_cover(std::istream& in, const std::string& source = "<labelcover>") {
    LabelCoverInstance inst;
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(source, lineno, "empty label cover file");
    std::istringstream hs(line);
    std::string magic;
    long long nA, nB, sA, sB, m;
    if (!(hs >> magic >> nA >> nB >> sA >> sB >> m) || magic != "labelcover" || nA < 0 || nB < 0 || sA <= 0 ||
        sB <= 0 || m < 0)
        throw ParseError(source, lineno, "expected 'labelcover nA nB sigmaA sigmaB m'");
    inst.n_A = static_cast<std::uint32_t>(nA);
    inst.n_B = static_cast<std::uint32_t>(nB);
    inst.sigma_A = static_cast<std::uint32_t>(sA);
    inst.sigma_B = static_cast<std::uint32_t>(sB);
    for (long long i = 0; i < m; ++i) {
        if (!next_line()) throw ParseError(source, lineno, "expected " + std::to_string(m) + " edge lines");
        std::istringstream es(line);
        long long a, b;
        if (!(es >> a >> b) || a < 0 || b < 0 || a >= nA || b >= nB)
            throw ParseError(source, lineno, "edge endpoints missing or out of range");
        LcEdge e;
        e.a = static_cast<std::uint32_t>(a);
        e.b = static_cast<std::uint32_t>(b);
        for (long long k = 0; k < sA; ++k) {
            long long v;
            if (!(es >> v) || v < 0 || v >= sB) throw ParseError(source, lineno, "projection value missing or outside Σ_B");
            e.projection.push_back(static_cast<Label>(v));
        }
        std::string extra;
        if (es >> extra) throw ParseError(source, lineno, "trailing tokens on edge line");
        inst.edges.push_back(std::move(e));
    }
    if (next_line()) throw ParseError(source, lineno, "unexpected content after the last edge");
    return inst;
}

inline LabelCoverInstance parse_label_cover(const std::string& text) {
    std::istringstream in(text);
    return parse_label_cover(in);
}

inline void write_label_cover(std::ostream& out, const LabelCoverInstance& inst) {
    out << "labelcover " << inst.n_A << ' ' << inst.n_B << ' ' << inst.sigma_A << ' ' << inst.sigma_B << ' '
        << inst.edges.size() << '\n';
    for (const auto& e : inst.edges) {
        out << e.a << ' ' << e.b;
        for (auto v : e.projection) out << ' ' << v;
        out << '\n';
    }
}

} // namespace communitylab
