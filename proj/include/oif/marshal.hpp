// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oif/c_abi.h"
#include "oif/status.hpp"

namespace oif {

enum class TypeTag : std::uint32_t {
    kInt = OIF_INT,
    kFloat64 = OIF_FLOAT64,
    kArrayF64 = OIF_ARRAY_F64,
    kStr = OIF_STR,
    kCallback = OIF_CALLBACK,
    kUserData = OIF_USER_DATA,
    kConfigDict = OIF_CONFIG_DICT,
};

const char* type_tag_name(TypeTag tag) noexcept;

/// Number of elements described by an array record.
std::size_t element_count(const OIFArrayF64& a) noexcept;

/// Array of doubles whose storage and shape live in this object.
/// The raw record points into the owned buffers and stays valid across moves.
class ArrayF64 {
  public:
    /// Zero-initialized array. Throws Error(kInvalidArgument) on nd < 1 or a
    /// negative extent, Error(kAllocation) if storage cannot be obtained.
    static ArrayF64 make(std::span<const std::intptr_t> dims);
    static ArrayF64 make(std::initializer_list<std::intptr_t> dims) {
        return make(std::span<const std::intptr_t>(dims.begin(), dims.size()));
    }
    static ArrayF64 from_values(std::span<const double> values);

    ArrayF64(ArrayF64&& other) noexcept;
    ArrayF64& operator=(ArrayF64&& other) noexcept;
    ArrayF64(const ArrayF64&) = delete;
    ArrayF64& operator=(const ArrayF64&) = delete;
    ~ArrayF64() = default;

    OIFArrayF64* raw() noexcept { return &raw_; }
    const OIFArrayF64* raw() const noexcept { return &raw_; }
    std::intptr_t nd() const noexcept { return raw_.nd; }
    std::span<const std::intptr_t> dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

  private:
    ArrayF64() = default;
    void rebind() noexcept;

    std::vector<std::intptr_t> dims_;
    std::vector<double> data_;
    OIFArrayF64 raw_{};
};

/// Non-owning view over caller storage. Copies the shape, never the data.
class ArrayView {
  public:
    /// Throws Error(kInvalidArgument) on nd < 1 or a negative extent.
    ArrayView(double* data, std::span<const std::intptr_t> dims);
    explicit ArrayView(std::span<double> values);

    ArrayView(const ArrayView& other);
    ArrayView& operator=(const ArrayView& other);
    ArrayView(ArrayView&& other) noexcept;
    ArrayView& operator=(ArrayView&& other) noexcept;
    ~ArrayView() = default;

    OIFArrayF64* raw() noexcept { return &raw_; }
    const OIFArrayF64* raw() const noexcept { return &raw_; }
    std::size_t size() const noexcept { return element_count(raw_); }
    std::span<double> values() const noexcept { return {raw_.data, size()}; }
    double& operator[](std::size_t i) const noexcept { return raw_.data[i]; }

  private:
    void rebind() noexcept;

    std::vector<std::intptr_t> dims_;
    OIFArrayF64 raw_{};
};

/// Element span over a boundary array record.
inline std::span<double> as_span(OIFArrayF64* a) noexcept {
    return {a->data, element_count(*a)};
}
inline std::span<const double> as_span(const OIFArrayF64* a) noexcept {
    return {a->data, element_count(*a)};
}

/// Ordered string -> (int32 | float64) options.
class ConfigDict {
  public:
    using Value = std::variant<std::int32_t, double>;
    using Entry = std::pair<std::string, Value>;

    ConfigDict() = default;
    /// Throws Error(kInvalidArgument) on a duplicate key.
    ConfigDict(std::initializer_list<Entry> entries);

    /// Throws Error(kInvalidArgument) if the key is already present.
    void add(std::string key, Value value);

    std::optional<Value> find(std::string_view key) const;
    bool contains(std::string_view key) const { return find(key).has_value(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    std::vector<std::uint8_t> encode() const;
    /// Throws Error(kInvalidArgument) on truncated records, unknown tags or
    /// duplicate keys.
    static ConfigDict decode(std::span<const std::uint8_t> bytes);
    static ConfigDict decode(const OIFConfigDict& wire) {
        return decode({wire.bytes, static_cast<std::size_t>(wire.size)});
    }

    /// Bit-exact comparison, so NaN payloads compare equal to themselves.
    friend bool operator==(const ConfigDict& a, const ConfigDict& b);

  private:
    std::vector<Entry> entries_;
};

/// Owns the encoded bytes of a ConfigDict and the boundary record for them.
class EncodedConfigDict {
  public:
    explicit EncodedConfigDict(const ConfigDict& dict);
    EncodedConfigDict(EncodedConfigDict&& other) noexcept;
    EncodedConfigDict& operator=(EncodedConfigDict&& other) noexcept;
    EncodedConfigDict(const EncodedConfigDict&) = delete;
    EncodedConfigDict& operator=(const EncodedConfigDict&) = delete;

    OIFConfigDict* raw() noexcept { return &raw_; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  private:
    void rebind() noexcept;

    std::vector<std::uint8_t> bytes_;
    OIFConfigDict raw_{};
};

struct UserData {
    void* address = nullptr;
    friend bool operator==(UserData, UserData) = default;
};

/// A value in intermediate representation. The alternative order mirrors
/// TypeTag - 1.
using ArgValue = std::variant<std::int32_t, double, OIFArrayF64*, const char*, OIFCallback*,
                              UserData, OIFConfigDict*>;

TypeTag tag_of(const ArgValue& v) noexcept;

struct TaggedValue {
    TypeTag tag;
    ArgValue value;
};

/// Ordered, tagged argument list referencing (never copying) its payloads.
/// Scalar payloads are referenced by address, so the source values must
/// outlive the list.
class PackedArgs {
  public:
    PackedArgs() = default;
    PackedArgs(const PackedArgs& other);
    PackedArgs& operator=(const PackedArgs& other);
    PackedArgs(PackedArgs&& other) noexcept;
    PackedArgs& operator=(PackedArgs&& other) noexcept;

    void push(TypeTag tag, void* payload);
    void push(std::int32_t* v) { push(TypeTag::kInt, v); }
    void push(double* v) { push(TypeTag::kFloat64, v); }
    void push(OIFArrayF64* v) { push(TypeTag::kArrayF64, v); }
    void push(const char* v) { push(TypeTag::kStr, const_cast<char*>(v)); }
    void push(OIFCallback* v) { push(TypeTag::kCallback, v); }
    void push(UserData v) { push(TypeTag::kUserData, v.address); }
    void push(OIFConfigDict* v) { push(TypeTag::kConfigDict, v); }

    std::size_t count() const noexcept { return tags_.size(); }
    std::span<const TypeTag> tags() const noexcept { return tags_; }
    std::span<void* const> payloads() const noexcept { return payloads_; }

    /// Boundary view; valid while this object is alive and unmodified.
    const OIFArgs* raw() const noexcept { return &raw_; }
    /// Copies tags and payload addresses out of a boundary list.
    static PackedArgs from_raw(const OIFArgs& args);

  private:
    void rebind() noexcept;

    std::vector<TypeTag> tags_;
    std::vector<void*> payloads_;
    OIFArgs raw_{0, nullptr, nullptr};
};

/// Packs values in order. Scalars are referenced in place inside `values`.
/// Throws Error(kTypeMismatch) if a value's kind differs from its tag.
PackedArgs pack_args(std::span<TaggedValue> values);

/// Throws Error(kTypeMismatch) on arity mismatch and TypeMismatchError
/// naming the first differing position on a tag mismatch.
std::vector<ArgValue> unpack_args(const PackedArgs& packed, std::span<const TypeTag> expected);

}  // namespace oif
