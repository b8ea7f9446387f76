#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/kernels.hpp"
#include "ergomax/maxnorm.hpp"
#include "ergomax/opseq.hpp"

namespace ergomax {

// %.17g round-trips every finite double bit-exactly through strtod.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Structured text format. One matrix entry per "re im" pair, row-major:
//
//   ergomax-opseq v1
//   d 2
//   base -3
//   count 2
//   entry 0
//   <d lines of d "re im" pairs>
//   entry 1
//   ...
//
// Families wrap a member count around opseq blocks.
// ---------------------------------------------------------------------------

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }

    std::string expect_line(const std::string& what) {
        std::string line;
        if (!next(line)) throw ParseError("unexpected end of file, expected " + what, lineno_);
        return line;
    }

    std::size_t lineno() const { return lineno_; }

private:
    std::istream& in_;
    std::size_t lineno_ = 0;
};

inline long long parse_keyed_int(LineReader& r, const std::string& key) {
    std::istringstream ss(r.expect_line("'" + key + " <value>'"));
    std::string k;
    long long v = 0;
    if (!(ss >> k >> v) || k != key) throw ParseError("expected '" + key + " <value>'", r.lineno());
    return v;
}

inline double parse_double_token(std::istringstream& ss, LineReader& r, const std::string& field) {
    std::string tok;
    if (!(ss >> tok)) throw ParseError("missing field '" + field + "'", r.lineno());
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
        throw ParseError("field '" + field + "' is not a number: '" + tok + "'", r.lineno());
    }
    return v;
}

inline OpSequence load_opseq_body(LineReader& r) {
    const long long d = parse_keyed_int(r, "d");
    if (d < 1 || d > 4096) throw ParseError("implausible dimension " + std::to_string(d), r.lineno());
    const long long base = parse_keyed_int(r, "base");
    const long long count = parse_keyed_int(r, "count");
    if (count < 0) throw ParseError("negative count", r.lineno());
    std::vector<CMat> vals;
    vals.reserve(static_cast<std::size_t>(count));
    for (long long e = 0; e < count; ++e) {
        const long long idx = parse_keyed_int(r, "entry");
        if (idx != e) throw ParseError("entry index out of order", r.lineno());
        CMat m(d, d);
        for (long long row = 0; row < d; ++row) {
            std::istringstream ss(r.expect_line("matrix row"));
            for (long long col = 0; col < d; ++col) {
                const double re = parse_double_token(ss, r, "re");
                const double im = parse_double_token(ss, r, "im");
                m(row, col) = Cplx{re, im};
            }
            std::string extra;
            if (ss >> extra) throw ParseError("trailing token '" + extra + "' in matrix row", r.lineno());
        }
        vals.push_back(std::move(m));
    }
    return OpSequence(static_cast<int>(d), base, std::move(vals));
}

}  // namespace detail

inline void save_opseq(std::ostream& out, const OpSequence& f) {
    out << "ergomax-opseq v1\n";
    out << "d " << f.dim() << "\n";
    out << "base " << f.base() << "\n";
    out << "count " << f.size() << "\n";
    for (std::size_t e = 0; e < f.size(); ++e) {
        out << "entry " << e << "\n";
        const CMat& m = f.values()[e];
        for (int row = 0; row < f.dim(); ++row) {
            for (int col = 0; col < f.dim(); ++col) {
                if (col) out << ' ';
                out << fmt_double(m(row, col).real()) << ' ' << fmt_double(m(row, col).imag());
            }
            out << "\n";
        }
    }
}

inline OpSequence load_opseq(std::istream& in) {
    detail::LineReader r(in);
    if (r.expect_line("header") != "ergomax-opseq v1") {
        throw ParseError("expected header 'ergomax-opseq v1'", r.lineno());
    }
    return detail::load_opseq_body(r);
}

inline void save_family(std::ostream& out, const MaximalFamily& fam) {
    out << "ergomax-family v1\n";
    out << "members " << fam.members.size() << "\n";
    for (const auto& m : fam.members) save_opseq(out, m);
}

inline MaximalFamily load_family(std::istream& in) {
    detail::LineReader r(in);
    if (r.expect_line("header") != "ergomax-family v1") {
        throw ParseError("expected header 'ergomax-family v1'", r.lineno());
    }
    const long long count = detail::parse_keyed_int(r, "members");
    MaximalFamily fam;
    for (long long i = 0; i < count; ++i) {
        if (r.expect_line("opseq header") != "ergomax-opseq v1") {
            throw ParseError("expected member header 'ergomax-opseq v1'", r.lineno());
        }
        fam.members.push_back(detail::load_opseq_body(r));
        if (!fam.members.empty() && fam.members.back().dim() != fam.members.front().dim()) {
            throw ParseError("family member dimension mismatch", r.lineno());
        }
    }
    return fam;
}

inline OpSequence gridkernel_to_opseq(const GridKernel& ker) {
    std::vector<Cplx> vals(ker.weights.begin(), ker.weights.end());
    return OpSequence::scalar(ker.base, vals);
}

// ---------------------------------------------------------------------------
// CSV: one header row, fixed column order. Sequences flatten to one row per
// matrix entry (n, row, col, re, im).
// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream& out) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out << ',';
            out << columns[i];
        }
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                out << row[i];
            }
            out << "\n";
        }
    }

    std::string csv() const {
        std::ostringstream ss;
        write_csv(ss);
        return ss.str();
    }
};

inline void save_opseq_csv(std::ostream& out, const OpSequence& f) {
    out << "n,row,col,re,im\n";
    for (long long n = f.base(); n <= f.last(); ++n) {
        const CMat m = f.at(n);
        for (int r = 0; r < f.dim(); ++r) {
            for (int c = 0; c < f.dim(); ++c) {
                out << n << ',' << r << ',' << c << ',' << fmt_double(m(r, c).real()) << ','
                    << fmt_double(m(r, c).imag()) << "\n";
            }
        }
    }
}

inline OpSequence load_opseq_csv(std::istream& in) {
    detail::LineReader r(in);
    if (r.expect_line("csv header") != "n,row,col,re,im") {
        throw ParseError("expected csv header 'n,row,col,re,im'", r.lineno());
    }
    struct Entry {
        long long n;
        int row, col;
        Cplx v;
    };
    std::vector<Entry> entries;
    int d = 0;
    std::string line;
    while (r.next(line)) {
        for (auto& ch : line) {
            if (ch == ',') ch = ' ';
        }
        std::istringstream ss(line);
        Entry e;
        if (!(ss >> e.n >> e.row >> e.col)) throw ParseError("malformed csv row", r.lineno());
        const double re = detail::parse_double_token(ss, r, "re");
        const double im = detail::parse_double_token(ss, r, "im");
        e.v = Cplx{re, im};
        d = std::max(d, std::max(e.row, e.col) + 1);
        entries.push_back(e);
    }
    if (entries.empty()) return OpSequence();
    long long lo = entries.front().n, hi = entries.front().n;
    for (const auto& e : entries) {
        lo = std::min(lo, e.n);
        hi = std::max(hi, e.n);
    }
    std::vector<CMat> vals(static_cast<std::size_t>(hi - lo + 1), CMat::Zero(d, d));
    for (const auto& e : entries) {
        vals[static_cast<std::size_t>(e.n - lo)](e.row, e.col) = e.v;
    }
    return OpSequence(d, lo, std::move(vals));
}

inline void save_opseq_file(const std::string& path, const OpSequence& f, const std::string& format) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open '" + path + "' for writing");
    if (format == "csv") {
        save_opseq_csv(out, f);
    } else if (format == "structured-text") {
        save_opseq(out, f);
    } else {
        throw ParameterError("unknown format '" + format + "'");
    }
}

inline OpSequence load_opseq_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open '" + path + "'");
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first == "ergomax-opseq v1") return load_opseq(in);
    if (first == "n,row,col,re,im") return load_opseq_csv(in);
    throw ParseError("unrecognized file header '" + first + "'", 1);
}

}  // namespace ergomax
