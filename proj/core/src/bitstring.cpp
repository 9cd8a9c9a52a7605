#include "adlkit/bitstring.hpp"

#include "adlkit/error.hpp"

#include <bit>

namespace adlkit {

BitString BitString::from_string(std::string_view text)
{
    BitString out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') {
            throw ParseError("bitstring: invalid character at position " + std::to_string(i));
        }
        out.push_back(text[i] == '1');
    }
    return out;
}

void BitString::append_bits(std::uint64_t value, unsigned width)
{
    for (unsigned i = width; i > 0; --i) {
        bits_.push_back(((value >> (i - 1)) & 1U) != 0);
    }
}

void BitString::append(const BitString& other)
{
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::string BitString::to_string() const
{
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

bool BitReader::read_bit()
{
    if (pos_ >= bits_->size()) {
        throw DecodeError("bitstream truncated at bit " + std::to_string(pos_));
    }
    return (*bits_)[pos_++];
}

std::uint64_t BitReader::read_bits(unsigned width)
{
    if (width > 64) {
        throw DecodeError("field wider than 64 bits");
    }
    if (remaining() < width) {
        throw DecodeError("bitstream truncated at bit " + std::to_string(bits_->size()));
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        v = (v << 1) | static_cast<std::uint64_t>((*bits_)[pos_++]);
    }
    return v;
}

unsigned fixed_width(std::uint64_t count) noexcept
{
    if (count <= 1) {
        return 0;
    }
    return static_cast<unsigned>(std::bit_width(count - 1));
}

void write_gamma(BitString& out, std::uint64_t n)
{
    if (n == 0) {
        throw RangeError("gamma code is defined for n >= 1");
    }
    const auto width = static_cast<unsigned>(std::bit_width(n));
    out.append_bits(0, width - 1);
    out.append_bits(n, width);
}

std::uint64_t read_gamma(BitReader& in)
{
    unsigned zeros = 0;
    while (!in.read_bit()) {
        if (++zeros > 63) {
            throw DecodeError("gamma prefix longer than 63 zeros");
        }
    }
    return (std::uint64_t{1} << zeros) | in.read_bits(zeros);
}

std::size_t gamma_length(std::uint64_t n) noexcept
{
    return 2 * static_cast<std::size_t>(std::bit_width(n)) - 1;
}

} // namespace adlkit
