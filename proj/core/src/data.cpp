#include "cohrel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "cohrel/errors.hpp"

namespace cohrel {

const char* to_string(CensorKind kind) {
    switch (kind) {
        case CensorKind::Exact: return "exact";
        case CensorKind::Right: return "right";
        case CensorKind::Left: return "left";
        case CensorKind::Interval: return "interval";
    }
    return "?";
}

bool ObsInterval::valid() const noexcept {
    if (!(l >= 0.0) || std::isnan(u) || u < l || std::isinf(l)) return false;
    if (l == 0.0 && (u == 0.0 || std::isinf(u))) return false;
    return true;
}

CensorKind ObsInterval::kind() const {
    if (!valid()) throw InputError("invalid interval (" + format_time(l) + ", " + format_time(u) + ")");
    if (l == u) return CensorKind::Exact;
    if (std::isinf(u)) return CensorKind::Right;
    if (l == 0.0) return CensorKind::Left;
    return CensorKind::Interval;
}

std::vector<ObsInterval> ComponentDataset::column(int j) const {
    if (j < 1 || j > m) throw DimensionError("component index out of range");
    std::vector<ObsInterval> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(j - 1)]);
    return out;
}

std::vector<int> MaskedRecord::mask_set() const {
    std::vector<int> s;
    for (std::size_t j = 0; j < upsilon.size(); ++j)
        if (upsilon[j] == 1) s.push_back(static_cast<int>(j) + 1);
    if (s.size() < 2) s.clear();
    return s;
}

namespace {

ComponentDataset from_records(const std::vector<SystemRecord>& records, int m, bool series) {
    if (m < 1) throw InputError("m must be positive");
    ComponentDataset ds;
    ds.m = m;
    for (const auto& r : records) {
        if (r.delta < 1 || r.delta > m) throw InputError("cause out of range in record " + std::to_string(r.id));
        if (!(r.t > 0.0) || std::isinf(r.t)) throw InputError("non-positive time in record " + std::to_string(r.id));
        std::vector<ObsInterval> row(static_cast<std::size_t>(m), series ? ObsInterval::right(r.t) : ObsInterval::left(r.t));
        row[static_cast<std::size_t>(r.delta - 1)] = ObsInterval::exact(r.t);
        ds.ids.push_back(r.id);
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

// ---- tokenizing ---------------------------------------------------------------

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg, line);
}

double parse_time(const std::string& tok, std::size_t line) {
    if (tok == "inf") return kInf;
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
        bad(line, "cannot read time '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok, std::size_t line) {
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) bad(line, "cannot read integer '" + tok + "'");
    return v;
}

// Reads the header, returns the data lines with their 1-based line numbers.
struct Table {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (trim(line).empty()) continue;
        if (t.header.empty())
            t.header = split(trim(line));
        else
            t.rows.emplace_back(no, split(trim(line)));
    }
    if (t.header.empty()) throw ParseError("missing header row", 1);
    return t;
}

void note_duplicates(const std::vector<int>& ids, std::vector<std::string>* warnings) {
    std::set<int> seen;
    for (int id : ids)
        if (!seen.insert(id).second && warnings) warnings->push_back("duplicate id " + std::to_string(id));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path);
    return f;
}

}  // namespace

ComponentDataset intervals_from_series(const std::vector<SystemRecord>& records, int m) {
    return from_records(records, m, true);
}

ComponentDataset intervals_from_parallel(const std::vector<SystemRecord>& records, int m) {
    return from_records(records, m, false);
}

std::string format_time(double t) {
    if (std::isinf(t) && t > 0) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

// ---- component csv ---------------------------------------------------------------

ComponentDataset read_component_csv(std::istream& in, std::vector<std::string>* warnings) {
    Table t = read_table(in);
    const auto& h = t.header;
    if (h.size() < 3 || h.size() % 2 == 0 || h[0] != "id") throw ParseError("header must be id,l_1,u_1,...", 1);
    ComponentDataset ds;
    ds.m = static_cast<int>((h.size() - 1) / 2);
    for (int j = 1; j <= ds.m; ++j) {
        if (h[static_cast<std::size_t>(2 * j - 1)] != "l_" + std::to_string(j) ||
            h[static_cast<std::size_t>(2 * j)] != "u_" + std::to_string(j))
            throw ParseError("header must be id,l_1,u_1,...", 1);
    }
    for (const auto& [no, cells] : t.rows) {
        if (cells.size() != h.size()) bad(no, "expected " + std::to_string(h.size()) + " fields");
        ds.ids.push_back(parse_int(cells[0], no));
        std::vector<ObsInterval> row;
        for (int j = 0; j < ds.m; ++j) {
            ObsInterval iv{parse_time(cells[static_cast<std::size_t>(2 * j + 1)], no),
                           parse_time(cells[static_cast<std::size_t>(2 * j + 2)], no)};
            if (iv.l < 0) bad(no, "negative lower limit");
            if (iv.l > iv.u) bad(no, "lower limit exceeds upper limit");
            if (!iv.valid()) bad(no, "interval (0, inf) carries no information");
            row.push_back(iv);
        }
        ds.rows.push_back(std::move(row));
    }
    note_duplicates(ds.ids, warnings);
    return ds;
}

void write_component_csv(const ComponentDataset& ds, std::ostream& out) {
    out << "id";
    for (int j = 1; j <= ds.m; ++j) out << ",l_" << j << ",u_" << j;
    out << '\n';
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        out << (i < ds.ids.size() ? ds.ids[i] : static_cast<int>(i) + 1);
        for (const auto& iv : ds.rows[i]) out << ',' << format_time(iv.l) << ',' << format_time(iv.u);
        out << '\n';
    }
}

ComponentDataset load_component_csv(const std::string& path, std::vector<std::string>* warnings) {
    auto f = open_in(path);
    return read_component_csv(f, warnings);
}

void write_component_csv(const ComponentDataset& ds, const std::string& path) {
    auto f = open_out(path);
    write_component_csv(ds, f);
}

// ---- masked csv --------------------------------------------------------------------

std::vector<MaskedRecord> read_masked_csv(std::istream& in, std::vector<std::string>* warnings) {
    Table t = read_table(in);
    const auto& h = t.header;
    if (h.size() < 4 || h.size() % 2 == 1 || h[0] != "id" || h[1] != "t")
        throw ParseError("header must be id,t,delta_1,upsilon_1,...", 1);
    const std::size_t m = (h.size() - 2) / 2;
    for (std::size_t j = 1; j <= m; ++j)
        if (h[2 * j] != "delta_" + std::to_string(j) || h[2 * j + 1] != "upsilon_" + std::to_string(j))
            throw ParseError("header must be id,t,delta_1,upsilon_1,...", 1);
    std::vector<MaskedRecord> out;
    std::vector<int> ids;
    for (const auto& [no, cells] : t.rows) {
        if (cells.size() != h.size()) bad(no, "expected " + std::to_string(h.size()) + " fields");
        MaskedRecord r;
        r.id = parse_int(cells[0], no);
        r.t = parse_time(cells[1], no);
        if (!(r.t > 0) || std::isinf(r.t)) bad(no, "system time must be positive and finite");
        for (std::size_t j = 0; j < m; ++j) {
            const std::string& d = cells[2 + 2 * j];
            int ups = parse_int(cells[3 + 2 * j], no);
            if (ups != 0 && ups != 1) bad(no, "upsilon must be 0 or 1");
            if (d == "-") {
                if (ups != 1) bad(no, "unknown delta needs upsilon = 1");
                r.delta.emplace_back(std::nullopt);
            } else {
                if (ups != 0) bad(no, "upsilon = 1 needs delta '-'");
                int v = parse_int(d, no);
                if (v < 1 || v > 3) bad(no, "delta must be 1, 2, 3 or -");
                r.delta.emplace_back(v);
            }
            r.upsilon.push_back(ups);
        }
        std::size_t masked = 0;
        for (int u : r.upsilon) masked += static_cast<std::size_t>(u);
        if (masked == 1) {
            // a one-element candidate set names the cause outright
            const auto j = static_cast<std::size_t>(std::find(r.upsilon.begin(), r.upsilon.end(), 1) - r.upsilon.begin());
            r.delta[j] = 1;
            r.upsilon[j] = 0;
            if (warnings)
                warnings->push_back("line " + std::to_string(no) + ": single candidate " + std::to_string(j + 1) +
                                    " read as the known cause");
        }
        ids.push_back(r.id);
        out.push_back(std::move(r));
    }
    note_duplicates(ids, warnings);
    return out;
}

void write_masked_csv(const std::vector<MaskedRecord>& records, std::ostream& out) {
    std::size_t m = records.empty() ? 0 : records.front().delta.size();
    out << "id,t";
    for (std::size_t j = 1; j <= m; ++j) out << ",delta_" << j << ",upsilon_" << j;
    out << '\n';
    for (const auto& r : records) {
        if (r.delta.size() != m || r.upsilon.size() != m) throw DimensionError("ragged masked records");
        out << r.id << ',' << format_time(r.t);
        for (std::size_t j = 0; j < m; ++j) {
            out << ',';
            if (r.delta[j])
                out << *r.delta[j];
            else
                out << '-';
            out << ',' << r.upsilon[j];
        }
        out << '\n';
    }
}

std::vector<MaskedRecord> load_masked_csv(const std::string& path, std::vector<std::string>* warnings) {
    auto f = open_in(path);
    return read_masked_csv(f, warnings);
}

void write_masked_csv(const std::vector<MaskedRecord>& records, const std::string& path) {
    auto f = open_out(path);
    write_masked_csv(records, f);
}

// ---- system csv ----------------------------------------------------------------------

std::vector<SystemRecord> read_system_csv(std::istream& in, std::vector<std::string>* warnings) {
    Table t = read_table(in);
    if (t.header != std::vector<std::string>{"id", "t", "delta"}) throw ParseError("header must be id,t,delta", 1);
    std::vector<SystemRecord> out;
    std::vector<int> ids;
    for (const auto& [no, cells] : t.rows) {
        if (cells.size() != 3) bad(no, "expected 3 fields");
        SystemRecord r{parse_int(cells[0], no), parse_time(cells[1], no), parse_int(cells[2], no)};
        if (!(r.t > 0) || std::isinf(r.t)) bad(no, "system time must be positive and finite");
        if (r.delta < 1) bad(no, "cause must be a 1-based component id");
        ids.push_back(r.id);
        out.push_back(r);
    }
    note_duplicates(ids, warnings);
    return out;
}

void write_system_csv(const std::vector<SystemRecord>& records, std::ostream& out) {
    out << "id,t,delta\n";
    for (const auto& r : records) out << r.id << ',' << format_time(r.t) << ',' << r.delta << '\n';
}

std::vector<SystemRecord> load_system_csv(const std::string& path, std::vector<std::string>* warnings) {
    auto f = open_in(path);
    return read_system_csv(f, warnings);
}

void write_system_csv(const std::vector<SystemRecord>& records, const std::string& path) {
    auto f = open_out(path);
    write_system_csv(records, f);
}

}  // namespace cohrel
