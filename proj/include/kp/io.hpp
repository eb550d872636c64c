#pragma once

#include "kp/asymptotics.hpp"
#include "kp/breakup.hpp"
#include "kp/field.hpp"
#include "kp/gkp.hpp"
#include "kp/pi2.hpp"

#include <map>
#include <string>

namespace kp {

struct SnapshotHeader {
    std::uint64_t nx = 0, ny = 0;
    double lx = 0, ly = 0, t = 0, epsilon = 0;
    std::int32_t n = 1, sigma = 1;
};

// Binary snapshot: magic "DBL1", u32 version=1, u64 Nx, u64 Ny, f64 Lx, Ly,
// t, epsilon, i32 n, i32 sigma, then Nx*Ny little-endian f64 samples
// row-major (x fastest).
void write_snapshot(const std::string& path, const SpectralField& f, double t, double epsilon,
                    int n, int sigma);
SpectralField read_snapshot(const std::string& path, SnapshotHeader& header);

void write_diagnostics_csv(const std::string& path, const RunDiagnostics& d);
void write_monotonicity_csv(const std::string& path, const std::vector<CharacteristicSlice>& rows);

void write_critical_report(const std::string& path, const CriticalPoint& cp,
                           const LocateResult& loc, double bracket_width, int index);
CriticalPoint read_critical_report(const std::string& path);

void write_pi2_csv(const std::string& path, const Pi2Solution& sol);
Pi2Solution read_pi2_csv(const std::string& path);

void write_comparison(const std::string& dir, const std::string& stem, const ComparisonReport& rep);

// Flat key=value configuration text ('#' starts a comment).
class Config {
  public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string echo() const; // deterministic key-sorted dump
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

} // namespace kp
