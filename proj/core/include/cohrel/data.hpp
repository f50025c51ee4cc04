#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cohrel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class CensorKind { Exact, Right, Left, Interval };

const char* to_string(CensorKind kind);

// Component lifetime known to lie in [l, u]. l == u is an exact failure.
struct ObsInterval {
    double l = 0.0;
    double u = kInf;

    static ObsInterval exact(double t) { return {t, t}; }
    static ObsInterval right(double t) { return {t, kInf}; }
    static ObsInterval left(double t) { return {0.0, t}; }

    CensorKind kind() const;  // throws InputError on an invalid shape
    bool valid() const noexcept;
    bool operator==(const ObsInterval&) const = default;
};

struct SystemRecord {
    int id = 0;
    double t = 0.0;
    int delta = 0;  // 1-based cause
    bool operator==(const SystemRecord&) const = default;
};

struct ComponentDataset {
    int m = 0;
    std::vector<int> ids;
    std::vector<std::vector<ObsInterval>> rows;  // rows[i][j], j = 0..m-1

    std::size_t size() const noexcept { return rows.size(); }
    std::vector<ObsInterval> column(int j) const;  // 1-based component
    bool operator==(const ComponentDataset&) const = default;
};

// Per-component status of a possibly masked system. delta is 1 (failed at t),
// 2 (still working at t) or 3 (failed before t); nullopt when masked.
struct MaskedRecord {
    int id = 0;
    double t = 0.0;
    std::vector<std::optional<int>> delta;
    std::vector<int> upsilon;

    std::vector<int> mask_set() const;  // 1-based; empty unless |s| > 1
    bool operator==(const MaskedRecord&) const = default;
};

ComponentDataset intervals_from_series(const std::vector<SystemRecord>& records, int m);
ComponentDataset intervals_from_parallel(const std::vector<SystemRecord>& records, int m);

// CSV. Loaders throw ParseError whose position() is the 1-based line number.
// Duplicate ids are accepted; a message is appended to *warnings when given.
ComponentDataset read_component_csv(std::istream& in, std::vector<std::string>* warnings = nullptr);
void write_component_csv(const ComponentDataset& ds, std::ostream& out);
ComponentDataset load_component_csv(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_component_csv(const ComponentDataset& ds, const std::string& path);

std::vector<MaskedRecord> read_masked_csv(std::istream& in, std::vector<std::string>* warnings = nullptr);
void write_masked_csv(const std::vector<MaskedRecord>& records, std::ostream& out);
std::vector<MaskedRecord> load_masked_csv(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_masked_csv(const std::vector<MaskedRecord>& records, const std::string& path);

std::vector<SystemRecord> read_system_csv(std::istream& in, std::vector<std::string>* warnings = nullptr);
void write_system_csv(const std::vector<SystemRecord>& records, std::ostream& out);
std::vector<SystemRecord> load_system_csv(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_system_csv(const std::vector<SystemRecord>& records, const std::string& path);

// 6 significant digits, "inf" for +infinity.
std::string format_time(double t);

}  // namespace cohrel
