#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edgehealth/common/bytes.hpp"

namespace edgehealth {

// Canonical transaction encoding: an index table followed by the field bodies.
//
//   [u8 count] { [u8 index] [u32 BE length] } x count  [field bytes in table order]
//
// Indices run 1..count in order, so a field is recovered by its position in the
// declared layout ("decode by index"). Any deviation is rejected.
class FieldWriter {
public:
    FieldWriter& add(ByteView bytes);
    FieldWriter& add(std::string_view text);
    FieldWriter& add_u64(std::uint64_t value);
    FieldWriter& add_u32(std::uint32_t value);

    Bytes finish() const;

private:
    std::vector<Bytes> fields_;
};

class FieldReader {
public:
    /// Parses `encoded`, requiring exactly `expected_count` fields.
    FieldReader(ByteView encoded, std::size_t expected_count);

    std::size_t size() const { return fields_.size(); }

    /// 1-based, matching the index table.
    ByteView field(std::uint8_t index) const;
    Bytes bytes(std::uint8_t index) const;
    std::string text(std::uint8_t index) const;
    std::uint64_t u64(std::uint8_t index) const;
    std::uint32_t u32(std::uint8_t index) const;

private:
    ByteView encoded_;
    std::vector<ByteView> fields_;
};

}  // namespace edgehealth
