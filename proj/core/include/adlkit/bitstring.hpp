#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adlkit {

// Sequence of bits; size() is the code length len(E(w, h)).
class BitString {
public:
    BitString() = default;
    // Parses a string of '0'/'1' characters.
    static BitString from_string(std::string_view text);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i]; }

    void push_back(bool bit) { bits_.push_back(bit); }
    // Appends the low `width` bits of value, most significant first.
    void append_bits(std::uint64_t value, unsigned width);
    void append(const BitString& other);

    std::string to_string() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<bool> bits_;
};

// Sequential reader over a BitString. Throws DecodeError on truncation.
class BitReader {
public:
    explicit BitReader(const BitString& bits) noexcept : bits_(&bits) {}

    bool read_bit();
    std::uint64_t read_bits(unsigned width);

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bits_->size() - pos_; }
    bool at_end() const noexcept { return pos_ == bits_->size(); }

private:
    const BitString* bits_;
    std::size_t pos_ = 0;
};

// Number of bits of a fixed-width code for `count` symbols: ceil(log2 count).
unsigned fixed_width(std::uint64_t count) noexcept;

// Elias gamma code for n >= 1: floor(log2 n) zeros, then n in binary.
void write_gamma(BitString& out, std::uint64_t n);
std::uint64_t read_gamma(BitReader& in);
std::size_t gamma_length(std::uint64_t n) noexcept;

} // namespace adlkit
