#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgehealth/common/bytes.hpp"

namespace edgehealth::store {

/// Multi-channel sensor capture, as collected by a wearable device.
struct SensorSeries {
    std::uint32_t channels = 0;
    std::vector<std::int16_t> samples;  // interleaved, samples.size() % channels == 0

    /// u32 BE channel count || int16 BE samples
    Bytes encode() const;
    static SensorSeries decode(ByteView in);
};

struct ChannelSummary {
    double min = 0;
    double max = 0;
    double mean = 0;
    double variance = 0;  // population variance
};

/// Stand-in for the clinical analysis: per-channel summary statistics.
std::vector<ChannelSummary> analyze(const SensorSeries& series);
Bytes encode_summary(const std::vector<ChannelSummary>& summary);

/// Sensor series of roughly `target_bytes` encoded size, deterministic in `seed`.
SensorSeries synthetic_series(std::size_t target_bytes, std::uint64_t seed, std::uint32_t channels = 6);

struct HealthRecord {
    std::string patient_id;
    Bytes raw_data;
    Bytes analyzed_result;

    /// The stored payload: u64 BE len || raw || u64 BE len || analyzed.
    /// The patient id travels in the registry, not in the payload.
    Bytes serialize() const;
    static HealthRecord parse(std::string patient_id, ByteView payload);

    /// Runs the analysis over `series` and bundles both.
    static HealthRecord from_series(std::string patient_id, const SensorSeries& series);

    friend bool operator==(const HealthRecord&, const HealthRecord&) = default;
};

}  // namespace edgehealth::store
