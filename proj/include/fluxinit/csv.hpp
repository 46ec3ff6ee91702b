#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fluxinit/crossing_fit.hpp"
#include "fluxinit/phase_spectroscopy.hpp"
#include "fluxinit/readout.hpp"
#include "fluxinit/synthetic.hpp"

namespace fluxinit {

inline constexpr std::string_view kVersion = "0.1.0";

/// Provenance written as the first line of every output file.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::string command;

    std::string comment() const;  // "# fluxinit <version> config=<hex> command=<cmd>"
};

std::uint64_t fnv1a64(std::string_view data);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Writes '#' provenance line, header row, then rows. Throws ErrorKind::Io.
void write_csv(const std::filesystem::path& path, const Provenance& prov, const Table& table);

/// Reads a numeric CSV, skipping '#' lines, first non-comment line as header.
Table read_csv(const std::filesystem::path& path);

/// Long format: flux_offset_rad, probe_freq_GHz, amplitude (full grid required).
CrossingDataset read_crossing_csv(const std::filesystem::path& path);
Table crossing_table(const CrossingDataset& data);

/// amplitude_index, voltage, time_ns, P1, P2, P3. Voltages are returned per amplitude.
PhaseTrack read_phase_track_csv(const std::filesystem::path& path, std::vector<double>* voltages);
Table phase_track_table(const PhaseTrack& track, const std::vector<double>& voltages);

/// Two columns i, q.
std::vector<IQPoint> read_iq_csv(const std::filesystem::path& path);
Table iq_table(const std::vector<IQPoint>& shots);

/// delay_ns, freq_shift_GHz.
DecaySeries read_decay_csv(const std::filesystem::path& path);
Table decay_table(const DecaySeries& series);

}  // namespace fluxinit
