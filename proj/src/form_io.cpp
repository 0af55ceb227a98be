#include "formlab/form_io.hpp"

#include <sstream>
#include <vector>

namespace formlab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

QuadraticForm from_diag_entries(const std::vector<std::string>& toks) {
    std::vector<Scalar> diag;
    for (const auto& t : toks) diag.push_back(parse_scalar(t));
    if (diag.empty()) throw FormParseError("diagonal form needs at least one entry");
    return QuadraticForm::diagonal(diag);
}

}  // namespace

QuadraticForm parse_form_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> tokens;
    bool diag = false;
    int n = -1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> row;
        while (ls >> tok) {
            if (tok[0] == '#') break;
            row.push_back(tok);
        }
        if (row.empty()) continue;
        if (n < 0 && !diag) {
            if (row[0] == "diag") {
                diag = true;
                tokens.assign(row.begin() + 1, row.end());
                continue;
            }
            // header: rank alone, or "n <rank>"
            std::string rank_tok;
            if (row.size() == 1)
                rank_tok = row[0];
            else if (row.size() == 2 && row[0] == "n")
                rank_tok = row[1];
            else
                throw FormParseError("form text must start with the rank or 'diag <entries>'");
            try {
                size_t used = 0;
                n = std::stoi(rank_tok, &used);
                if (used != rank_tok.size()) throw FormParseError("bad rank '" + rank_tok + "'");
            } catch (const FormParseError&) {
                throw;
            } catch (const std::exception&) {
                throw FormParseError("bad rank '" + rank_tok + "'");
            }
            if (n <= 0 || n > 64) throw FormParseError("rank out of range");
            continue;
        }
        tokens.insert(tokens.end(), row.begin(), row.end());
    }
    if (diag) return from_diag_entries(tokens);
    if (n < 0) throw FormParseError("empty form text");
    if (static_cast<int>(tokens.size()) != n * n)
        throw FormParseError("expected " + std::to_string(n * n) + " entries, found " +
                             std::to_string(tokens.size()));
    SMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = parse_scalar(tokens[size_t(i) * n + j]);
    return QuadraticForm(std::move(m));
}

QuadraticForm parse_form_inline(const std::string& spec) {
    if (spec.rfind("diag:", 0) == 0) {
        return from_diag_entries(split(spec.substr(5), ','));
    }
    if (spec.rfind("mat:", 0) == 0) {
        const std::vector<std::string> rows = split(spec.substr(4), ';');
        const int n = static_cast<int>(rows.size());
        SMatrix m(n, n);
        for (int i = 0; i < n; ++i) {
            const std::vector<std::string> entries = split(rows[i], ',');
            if (static_cast<int>(entries.size()) != n)
                throw FormParseError("matrix row " + std::to_string(i) + " has " +
                                     std::to_string(entries.size()) + " entries, expected " +
                                     std::to_string(n));
            for (int j = 0; j < n; ++j) m.at(i, j) = parse_scalar(entries[j]);
        }
        return QuadraticForm(std::move(m));
    }
    throw FormParseError("inline form must start with 'diag:' or 'mat:'");
}

std::string emit_form_text(const QuadraticForm& f) {
    std::string out = "n " + std::to_string(f.n()) + "\n";
    for (int i = 0; i < f.n(); ++i) {
        for (int j = 0; j < f.n(); ++j) {
            if (j) out += ' ';
            out += f.at(i, j).str();
        }
        out += '\n';
    }
    return out;
}

std::string emit_form_inline(const QuadraticForm& f) {
    std::string out = "mat:";
    for (int i = 0; i < f.n(); ++i) {
        if (i) out += ';';
        for (int j = 0; j < f.n(); ++j) {
            if (j) out += ',';
            out += f.at(i, j).str();
        }
    }
    return out;
}

}  // namespace formlab
