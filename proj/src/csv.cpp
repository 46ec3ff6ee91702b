#include "fluxinit/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"

namespace fluxinit {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Provenance::comment() const {
    return fmt::format("# fluxinit {} config={:016x} command={}", kVersion, config_hash, command);
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_csv(const std::filesystem::path& path, const Provenance& prov, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path.string()));
    std::string buf = prov.comment();
    buf += '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) buf += ',';
        buf += table.columns[c];
    }
    buf += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) buf += ',';
            buf += format_number(row[c]);
        }
        buf += '\n';
    }
    out << buf;
    if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::size_t column(const Table& t, const std::string& name, const std::filesystem::path& path) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) {
        throw Error(ErrorKind::Io, fmt::format("'{}': missing column '{}'", path.string(), name));
    }
    return static_cast<std::size_t>(it - t.columns.begin());
}

}  // namespace

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto cells = split(s);
        if (!header) {
            t.columns = std::move(cells);
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw Error(ErrorKind::Io, fmt::format("'{}' line {}: expected {} fields, got {}",
                                                   path.string(), lineno, t.columns.size(),
                                                   cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size() || errno == ERANGE) {
                throw Error(ErrorKind::Io, fmt::format("'{}' line {}: '{}' is not a number",
                                                       path.string(), lineno, c));
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!header) throw Error(ErrorKind::Io, fmt::format("'{}' has no header row", path.string()));
    return t;
}

CrossingDataset read_crossing_csv(const std::filesystem::path& path) {
    const Table t = read_csv(path);
    const auto cf = column(t, "flux_offset_rad", path);
    const auto cp = column(t, "probe_freq_GHz", path);
    const auto ca = column(t, "amplitude", path);
    std::map<double, std::map<double, double>> grid;
    std::map<double, int> freqs;
    for (const auto& r : t.rows) {
        grid[r[cf]][r[cp]] = r[ca];
        freqs[r[cp]] = 0;
    }
    CrossingDataset d;
    for (const auto& [f, _] : freqs) d.probe_freqs.push_back(f);
    for (const auto& [x, _] : grid) d.flux_offsets.push_back(x);
    d.amplitude.resize(static_cast<Eigen::Index>(d.probe_freqs.size()),
                       static_cast<Eigen::Index>(d.flux_offsets.size()));
    Eigen::Index c = 0;
    for (const auto& [x, col] : grid) {
        if (col.size() != d.probe_freqs.size()) {
            throw Error(ErrorKind::Io, fmt::format("'{}': flux column {} is not on the full frequency grid",
                                                   path.string(), x));
        }
        Eigen::Index r = 0;
        for (const auto& [f, a] : col) d.amplitude(r++, c) = a;
        ++c;
    }
    d.validate();
    return d;
}

Table crossing_table(const CrossingDataset& data) {
    Table t{{"flux_offset_rad", "probe_freq_GHz", "amplitude"}, {}};
    for (std::size_t c = 0; c < data.flux_offsets.size(); ++c) {
        for (std::size_t r = 0; r < data.probe_freqs.size(); ++r) {
            t.rows.push_back({data.flux_offsets[c], data.probe_freqs[r],
                              data.amplitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))});
        }
    }
    return t;
}

PhaseTrack read_phase_track_csv(const std::filesystem::path& path, std::vector<double>* voltages) {
    const Table t = read_csv(path);
    const auto ci = column(t, "amplitude_index", path);
    const auto cv = column(t, "voltage", path);
    const auto ct = column(t, "time_ns", path);
    const auto c1 = column(t, "P1", path);
    const auto c2 = column(t, "P2", path);
    const auto c3 = column(t, "P3", path);
    std::map<long, std::pair<double, PhaseSeries>> by_index;
    for (const auto& r : t.rows) {
        const double idx = r[ci];
        if (idx != std::floor(idx) || idx < 0) {
            throw Error(ErrorKind::Io, fmt::format("'{}': amplitude_index {} is not a non-negative integer",
                                                   path.string(), idx));
        }
        auto& [v, s] = by_index[static_cast<long>(idx)];
        v = r[cv];
        s.t.push_back(r[ct]);
        s.p1.push_back(r[c1]);
        s.p2.push_back(r[c2]);
        s.p3.push_back(r[c3]);
    }
    PhaseTrack track;
    double dt = 0.0;
    for (auto& [idx, entry] : by_index) {
        auto& s = entry.second;
        if (s.t.size() >= 2 && dt == 0.0) dt = s.t[1] - s.t[0];
        if (voltages) voltages->push_back(entry.first);
        track.amplitudes.push_back(std::move(s));
    }
    track.dt = dt;
    track.validate();
    return track;
}

Table phase_track_table(const PhaseTrack& track, const std::vector<double>& voltages) {
    Table t{{"amplitude_index", "voltage", "time_ns", "P1", "P2", "P3"}, {}};
    for (std::size_t i = 0; i < track.amplitudes.size(); ++i) {
        const auto& s = track.amplitudes[i];
        const double v = i < voltages.size() ? voltages[i] : static_cast<double>(i);
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            t.rows.push_back({static_cast<double>(i), v, s.t[k], s.p1[k], s.p2[k], s.p3[k]});
        }
    }
    return t;
}

std::vector<IQPoint> read_iq_csv(const std::filesystem::path& path) {
    const Table t = read_csv(path);
    const auto ci = column(t, "i", path);
    const auto cq = column(t, "q", path);
    std::vector<IQPoint> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) out.emplace_back(r[ci], r[cq]);
    return out;
}

Table iq_table(const std::vector<IQPoint>& shots) {
    Table t{{"i", "q"}, {}};
    for (const auto& p : shots) t.rows.push_back({p.real(), p.imag()});
    return t;
}

DecaySeries read_decay_csv(const std::filesystem::path& path) {
    const Table t = read_csv(path);
    const auto cd = column(t, "delay_ns", path);
    const auto cs = column(t, "freq_shift_GHz", path);
    DecaySeries s;
    for (const auto& r : t.rows) {
        s.delays.push_back(r[cd]);
        s.shifts.push_back(r[cs]);
    }
    return s;
}

Table decay_table(const DecaySeries& series) {
    Table t{{"delay_ns", "freq_shift_GHz"}, {}};
    for (std::size_t k = 0; k < series.delays.size(); ++k) {
        t.rows.push_back({series.delays[k], series.shifts[k]});
    }
    return t;
}

}  // namespace fluxinit
