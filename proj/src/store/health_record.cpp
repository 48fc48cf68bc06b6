#include "edgehealth/store/health_record.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "edgehealth/common/rng.hpp"

namespace edgehealth::store {

Bytes SensorSeries::encode() const {
    Bytes out;
    out.reserve(4 + samples.size() * 2);
    put_u32_be(out, channels);
    for (std::int16_t s : samples) {
        auto u = static_cast<std::uint16_t>(s);
        out.push_back(static_cast<std::uint8_t>(u >> 8));
        out.push_back(static_cast<std::uint8_t>(u));
    }
    return out;
}

SensorSeries SensorSeries::decode(ByteView in) {
    SensorSeries series;
    series.channels = read_u32_be(in, 0);
    std::size_t body = in.size() - 4;
    if (series.channels == 0 || body % 2 != 0 || (body / 2) % series.channels != 0) {
        throw MalformedEncoding("sensor series body does not split into whole frames");
    }
    series.samples.resize(body / 2);
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
        auto u = static_cast<std::uint16_t>((in[4 + 2 * i] << 8) | in[5 + 2 * i]);
        series.samples[i] = static_cast<std::int16_t>(u);
    }
    return series;
}

std::vector<ChannelSummary> analyze(const SensorSeries& series) {
    std::vector<ChannelSummary> out(series.channels);
    if (series.channels == 0) return out;
    std::size_t frames = series.samples.size() / series.channels;
    if (frames == 0) return out;

    for (std::uint32_t c = 0; c < series.channels; ++c) {
        // Welford's update keeps the variance stable over millions of samples.
        double mean = 0, m2 = 0;
        double lo = series.samples[c], hi = series.samples[c];
        for (std::size_t f = 0; f < frames; ++f) {
            double v = series.samples[f * series.channels + c];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            double delta = v - mean;
            mean += delta / static_cast<double>(f + 1);
            m2 += delta * (v - mean);
        }
        out[c] = ChannelSummary{lo, hi, mean, m2 / static_cast<double>(frames)};
    }
    return out;
}

Bytes encode_summary(const std::vector<ChannelSummary>& summary) {
    Bytes out;
    put_u32_be(out, static_cast<std::uint32_t>(summary.size()));
    auto put_double = [&out](double d) { put_u64_be(out, std::bit_cast<std::uint64_t>(d)); };
    for (const auto& s : summary) {
        put_double(s.min);
        put_double(s.max);
        put_double(s.mean);
        put_double(s.variance);
    }
    return out;
}

SensorSeries synthetic_series(std::size_t target_bytes, std::uint64_t seed, std::uint32_t channels) {
    SensorSeries series;
    series.channels = channels;
    std::size_t frames = target_bytes > 4 ? (target_bytes - 4) / (2 * channels) : 0;
    series.samples.resize(frames * channels);

    // Bounded random walk per channel, loosely shaped like accelerometer traces.
    Rng rng(seed);
    std::vector<int> level(channels, 0);
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::uint32_t c = 0; c < channels; ++c) {
            level[c] += static_cast<int>(rng.below(129)) - 64;
            level[c] = std::clamp(level[c], -16000, 16000);
            series.samples[f * channels + c] = static_cast<std::int16_t>(level[c]);
        }
    }
    return series;
}

Bytes HealthRecord::serialize() const {
    Bytes out;
    out.reserve(16 + raw_data.size() + analyzed_result.size());
    put_u64_be(out, raw_data.size());
    append(out, raw_data);
    put_u64_be(out, analyzed_result.size());
    append(out, analyzed_result);
    return out;
}

HealthRecord HealthRecord::parse(std::string patient_id, ByteView payload) {
    HealthRecord rec;
    rec.patient_id = std::move(patient_id);
    std::uint64_t raw_len = read_u64_be(payload, 0);
    if (raw_len > payload.size() - 8) throw MalformedEncoding("raw section overruns payload");
    std::size_t off = 8 + raw_len;
    std::uint64_t analyzed_len = read_u64_be(payload, off);
    off += 8;
    if (analyzed_len != payload.size() - off) throw MalformedEncoding("analyzed section length mismatch");
    rec.raw_data.assign(payload.begin() + 8, payload.begin() + 8 + static_cast<std::ptrdiff_t>(raw_len));
    rec.analyzed_result.assign(payload.begin() + static_cast<std::ptrdiff_t>(off), payload.end());
    return rec;
}

HealthRecord HealthRecord::from_series(std::string patient_id, const SensorSeries& series) {
    return HealthRecord{std::move(patient_id), series.encode(), encode_summary(analyze(series))};
}

}  // namespace edgehealth::store
