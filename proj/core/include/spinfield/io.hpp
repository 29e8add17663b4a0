#pragma once

// Run artifacts: the flat `key = value` config format (with canonical
// round-trip), binary field snapshots (one JSON header line + raw
// little-endian arrays), diagnostics CSV, and the run manifest with
// per-file checksums.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spinfield/gauge.hpp"

namespace spinfield {

// ---- config ------------------------------------------------------------

/// Flat dotted-key config. Keys keep insertion-independent canonical
/// (sorted) order so a parsed config round-trips to identical text.
using Config = std::map<std::string, std::string>;

/// Parse `key = value` lines; '#' starts a comment; blank lines ignored.
/// Throws ConfigError naming the offending line on malformed input.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
/// Canonical text form: sorted keys, one "key = value\n" per line.
std::string canonical_text(const Config& cfg);

std::string config_get(const Config& cfg, const std::string& key, const std::string& fallback);
double config_get_double(const Config& cfg, const std::string& key, double fallback);
int config_get_int(const Config& cfg, const std::string& key, int fallback);
/// Throws ConfigError if the key is absent.
std::string config_require(const Config& cfg, const std::string& key);

// ---- snapshots ---------------------------------------------------------

/// One named array in a snapshot: dtype "f64" (data = values) or "c128"
/// (data = interleaved re, im), row-major over the grid.
struct ArrayRecord {
    std::string name;
    std::string dtype;
    std::vector<double> data;
};

struct Snapshot {
    Grid grid;
    Signature sig;
    double time = 0.0;
    std::vector<ArrayRecord> arrays;
};

ArrayRecord record_from_scalar(const std::string& name, const ScalarField& f);
ArrayRecord record_from_spin(const std::string& name, const SpinField& f);
ScalarField scalar_from_record(const Grid& g, const ArrayRecord& rec);

/// Header line: UTF-8 JSON {grid, fields, dtype list, time, signature}
/// terminated by '\n', then each array's raw little-endian bytes in
/// declared order.
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

// ---- CSV and manifest --------------------------------------------------

/// First column is time by convention; the caller supplies headers.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t file_checksum(const std::string& path);

/// JSON manifest in `dir`/manifest.json: canonical config hash and a
/// checksum per listed artifact (paths relative to dir).
void write_manifest(const std::string& dir, const Config& cfg,
                    const std::vector<std::string>& artifacts);

}  // namespace spinfield
