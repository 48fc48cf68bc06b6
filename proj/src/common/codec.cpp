#include "edgehealth/common/codec.hpp"

#include <limits>

namespace edgehealth {

FieldWriter& FieldWriter::add(ByteView bytes) {
    if (fields_.size() >= std::numeric_limits<std::uint8_t>::max()) {
        throw std::length_error("too many fields");
    }
    fields_.emplace_back(bytes.begin(), bytes.end());
    return *this;
}

FieldWriter& FieldWriter::add(std::string_view text) {
    return add(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

FieldWriter& FieldWriter::add_u64(std::uint64_t value) {
    return add(u64_be(value));
}

FieldWriter& FieldWriter::add_u32(std::uint32_t value) {
    Bytes b;
    put_u32_be(b, value);
    return add(b);
}

Bytes FieldWriter::finish() const {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(fields_.size()));
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].size() > std::numeric_limits<std::uint32_t>::max()) {
            throw std::length_error("field too large");
        }
        out.push_back(static_cast<std::uint8_t>(i + 1));
        put_u32_be(out, static_cast<std::uint32_t>(fields_[i].size()));
    }
    for (const auto& f : fields_) append(out, f);
    return out;
}

FieldReader::FieldReader(ByteView encoded, std::size_t expected_count) : encoded_(encoded) {
    if (encoded.empty()) throw MalformedEncoding("empty encoding");
    std::size_t count = encoded[0];
    if (count != expected_count) {
        throw MalformedEncoding("expected " + std::to_string(expected_count) + " fields, found " +
                                std::to_string(count));
    }
    std::size_t table_end = 1 + count * 5;
    if (encoded.size() < table_end) throw MalformedEncoding("truncated index table");

    std::size_t offset = table_end;
    fields_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t entry = 1 + i * 5;
        if (encoded[entry] != i + 1) throw MalformedEncoding("index table out of order");
        std::size_t len = read_u32_be(encoded, entry + 1);
        if (len > encoded.size() - offset) throw MalformedEncoding("field overruns encoding");
        fields_.push_back(encoded.subspan(offset, len));
        offset += len;
    }
    if (offset != encoded.size()) throw MalformedEncoding("trailing bytes after fields");
}

ByteView FieldReader::field(std::uint8_t index) const {
    if (index == 0 || index > fields_.size()) throw MalformedEncoding("no field at index " + std::to_string(index));
    return fields_[index - 1];
}

Bytes FieldReader::bytes(std::uint8_t index) const {
    auto f = field(index);
    return Bytes(f.begin(), f.end());
}

std::string FieldReader::text(std::uint8_t index) const {
    return to_string(field(index));
}

std::uint64_t FieldReader::u64(std::uint8_t index) const {
    auto f = field(index);
    if (f.size() != 8) throw MalformedEncoding("field " + std::to_string(index) + " is not a u64");
    return read_u64_be(f, 0);
}

std::uint32_t FieldReader::u32(std::uint8_t index) const {
    auto f = field(index);
    if (f.size() != 4) throw MalformedEncoding("field " + std::to_string(index) + " is not a u32");
    return read_u32_be(f, 0);
}

}  // namespace edgehealth
