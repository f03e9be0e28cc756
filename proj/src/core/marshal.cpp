// SPDX-License-Identifier: Apache-2.0

#include "oif/marshal.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <new>
#include <sstream>

namespace oif {

const char* error_code_name(std::int32_t code) noexcept {
    switch (code) {
        case OIF_OK: return "ok";
        case OIF_ERR_INVALID_ARGUMENT: return "invalid argument";
        case OIF_ERR_ALLOCATION: return "allocation failure";
        case OIF_ERR_TYPE_MISMATCH: return "type mismatch";
        case OIF_ERR_NOT_FOUND: return "not found";
        case OIF_ERR_PLUGIN: return "plugin failure";
        case OIF_ERR_SOLVER: return "solver failure";
        default: return "unknown error";
    }
}

const char* type_tag_name(TypeTag tag) noexcept {
    switch (tag) {
        case TypeTag::kInt: return "OIF_INT";
        case TypeTag::kFloat64: return "OIF_FLOAT64";
        case TypeTag::kArrayF64: return "OIF_ARRAY_F64";
        case TypeTag::kStr: return "OIF_STR";
        case TypeTag::kCallback: return "OIF_CALLBACK";
        case TypeTag::kUserData: return "OIF_USER_DATA";
        case TypeTag::kConfigDict: return "OIF_CONFIG_DICT";
    }
    return "OIF_UNKNOWN";
}

std::size_t element_count(const OIFArrayF64& a) noexcept {
    std::size_t n = 1;
    for (std::intptr_t i = 0; i < a.nd; ++i) {
        n *= static_cast<std::size_t>(a.dimensions[i]);
    }
    return n;
}

namespace {

std::size_t checked_count(std::span<const std::intptr_t> dims) {
    if (dims.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "array must have at least one dimension");
    }
    std::size_t n = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 0) {
            std::ostringstream msg;
            msg << "negative extent " << dims[i] << " in dimension " << i;
            throw Error(ErrorCode::kInvalidArgument, msg.str());
        }
        n *= static_cast<std::size_t>(dims[i]);
    }
    return n;
}

}  // namespace

// ArrayF64 -------------------------------------------------------------------

ArrayF64 ArrayF64::make(std::span<const std::intptr_t> dims) {
    const std::size_t n = checked_count(dims);
    ArrayF64 a;
    try {
        a.dims_.assign(dims.begin(), dims.end());
        a.data_.assign(n, 0.0);
    } catch (const std::bad_alloc&) {
        throw Error(ErrorCode::kAllocation, "cannot allocate array storage");
    } catch (const std::length_error&) {
        throw Error(ErrorCode::kAllocation, "cannot allocate array storage");
    }
    a.rebind();
    return a;
}

ArrayF64 ArrayF64::from_values(std::span<const double> values) {
    ArrayF64 a = make({static_cast<std::intptr_t>(values.size())});
    std::copy(values.begin(), values.end(), a.data_.begin());
    return a;
}

ArrayF64::ArrayF64(ArrayF64&& other) noexcept
    : dims_(std::move(other.dims_)), data_(std::move(other.data_)) {
    rebind();
    other.rebind();
}

ArrayF64& ArrayF64::operator=(ArrayF64&& other) noexcept {
    dims_ = std::move(other.dims_);
    data_ = std::move(other.data_);
    rebind();
    other.rebind();
    return *this;
}

void ArrayF64::rebind() noexcept {
    raw_.nd = static_cast<std::intptr_t>(dims_.size());
    raw_.dimensions = dims_.data();
    raw_.data = data_.data();
}

// ArrayView ------------------------------------------------------------------

ArrayView::ArrayView(double* data, std::span<const std::intptr_t> dims) {
    checked_count(dims);
    dims_.assign(dims.begin(), dims.end());
    raw_.data = data;
    rebind();
}

ArrayView::ArrayView(std::span<double> values)
    : dims_{static_cast<std::intptr_t>(values.size())} {
    raw_.data = values.data();
    rebind();
}

ArrayView::ArrayView(const ArrayView& other) : dims_(other.dims_) {
    raw_.data = other.raw_.data;
    rebind();
}

ArrayView& ArrayView::operator=(const ArrayView& other) {
    if (this != &other) {
        dims_ = other.dims_;
        raw_.data = other.raw_.data;
        rebind();
    }
    return *this;
}

ArrayView::ArrayView(ArrayView&& other) noexcept : dims_(std::move(other.dims_)) {
    raw_.data = other.raw_.data;
    rebind();
}

ArrayView& ArrayView::operator=(ArrayView&& other) noexcept {
    dims_ = std::move(other.dims_);
    raw_.data = other.raw_.data;
    rebind();
    return *this;
}

void ArrayView::rebind() noexcept {
    raw_.nd = static_cast<std::intptr_t>(dims_.size());
    raw_.dimensions = dims_.data();
}

// ConfigDict -----------------------------------------------------------------

ConfigDict::ConfigDict(std::initializer_list<Entry> entries) {
    for (const auto& [key, value] : entries) {
        add(key, value);
    }
}

void ConfigDict::add(std::string key, Value value) {
    if (contains(key)) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate config key '" + key + "'");
    }
    entries_.emplace_back(std::move(key), value);
}

std::optional<ConfigDict::Value> ConfigDict::find(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t at, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
        v |= static_cast<std::uint64_t>(bytes[at + i]) << (8 * i);
    }
    return v;
}

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "malformed config dict: " + what);
}

}  // namespace

std::vector<std::uint8_t> ConfigDict::encode() const {
    std::vector<std::uint8_t> out;
    for (const auto& [key, value] : entries_) {
        put_u32(out, static_cast<std::uint32_t>(key.size()));
        out.insert(out.end(), key.begin(), key.end());
        if (const auto* i = std::get_if<std::int32_t>(&value)) {
            put_u32(out, OIF_INT);
            put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(*i)));
        } else {
            put_u32(out, OIF_FLOAT64);
            put_u64(out, std::bit_cast<std::uint64_t>(std::get<double>(value)));
        }
    }
    return out;
}

ConfigDict ConfigDict::decode(std::span<const std::uint8_t> bytes) {
    ConfigDict dict;
    std::size_t at = 0;
    while (at < bytes.size()) {
        if (bytes.size() - at < 4) {
            malformed("truncated key length");
        }
        const auto key_len = static_cast<std::size_t>(get_le(bytes, at, 4));
        at += 4;
        if (bytes.size() - at < key_len + 12) {
            malformed("truncated record");
        }
        std::string key(reinterpret_cast<const char*>(bytes.data() + at), key_len);
        at += key_len;
        const auto tag = static_cast<std::uint32_t>(get_le(bytes, at, 4));
        at += 4;
        const std::uint64_t raw = get_le(bytes, at, 8);
        at += 8;
        if (tag == OIF_INT) {
            const auto wide = static_cast<std::int64_t>(raw);
            if (wide < INT32_MIN || wide > INT32_MAX) {
                malformed("integer value of '" + key + "' out of 32-bit range");
            }
            dict.add(std::move(key), static_cast<std::int32_t>(wide));
        } else if (tag == OIF_FLOAT64) {
            dict.add(std::move(key), std::bit_cast<double>(raw));
        } else {
            malformed("unsupported value tag " + std::to_string(tag));
        }
    }
    return dict;
}

bool operator==(const ConfigDict& a, const ConfigDict& b) {
    if (a.entries_.size() != b.entries_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        const auto& [ka, va] = a.entries_[i];
        const auto& [kb, vb] = b.entries_[i];
        if (ka != kb || va.index() != vb.index()) {
            return false;
        }
        if (va.index() == 0) {
            if (std::get<0>(va) != std::get<0>(vb)) return false;
        } else if (std::bit_cast<std::uint64_t>(std::get<1>(va)) !=
                   std::bit_cast<std::uint64_t>(std::get<1>(vb))) {
            return false;
        }
    }
    return true;
}

EncodedConfigDict::EncodedConfigDict(const ConfigDict& dict) : bytes_(dict.encode()) {
    rebind();
}

EncodedConfigDict::EncodedConfigDict(EncodedConfigDict&& other) noexcept
    : bytes_(std::move(other.bytes_)) {
    rebind();
    other.rebind();
}

EncodedConfigDict& EncodedConfigDict::operator=(EncodedConfigDict&& other) noexcept {
    bytes_ = std::move(other.bytes_);
    rebind();
    other.rebind();
    return *this;
}

void EncodedConfigDict::rebind() noexcept {
    raw_.size = bytes_.size();
    raw_.bytes = bytes_.data();
}

// PackedArgs -----------------------------------------------------------------

TypeTag tag_of(const ArgValue& v) noexcept {
    return static_cast<TypeTag>(v.index() + 1);
}

PackedArgs::PackedArgs(const PackedArgs& other) : tags_(other.tags_), payloads_(other.payloads_) {
    rebind();
}

PackedArgs& PackedArgs::operator=(const PackedArgs& other) {
    if (this != &other) {
        tags_ = other.tags_;
        payloads_ = other.payloads_;
        rebind();
    }
    return *this;
}

PackedArgs::PackedArgs(PackedArgs&& other) noexcept
    : tags_(std::move(other.tags_)), payloads_(std::move(other.payloads_)) {
    rebind();
    other.rebind();
}

PackedArgs& PackedArgs::operator=(PackedArgs&& other) noexcept {
    tags_ = std::move(other.tags_);
    payloads_ = std::move(other.payloads_);
    rebind();
    other.rebind();
    return *this;
}

void PackedArgs::push(TypeTag tag, void* payload) {
    tags_.push_back(tag);
    payloads_.push_back(payload);
    rebind();
}

void PackedArgs::rebind() noexcept {
    static_assert(sizeof(TypeTag) == sizeof(OIFTypeTag));
    raw_.num_args = static_cast<std::int32_t>(tags_.size());
    raw_.arg_types = reinterpret_cast<const OIFTypeTag*>(tags_.data());
    raw_.arg_values = payloads_.data();
}

PackedArgs PackedArgs::from_raw(const OIFArgs& args) {
    PackedArgs p;
    for (std::int32_t i = 0; i < args.num_args; ++i) {
        p.tags_.push_back(static_cast<TypeTag>(args.arg_types[i]));
        p.payloads_.push_back(args.arg_values[i]);
    }
    p.rebind();
    return p;
}

PackedArgs pack_args(std::span<TaggedValue> values) {
    PackedArgs packed;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& [tag, value] = values[i];
        if (tag_of(value) != tag) {
            std::ostringstream msg;
            msg << "argument " << i << " declared " << type_tag_name(tag) << " but holds "
                << type_tag_name(tag_of(value));
            throw TypeMismatchError(i, msg.str());
        }
        std::visit(
            [&](auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t> || std::is_same_v<T, double>) {
                    packed.push(tag, &v);
                } else if constexpr (std::is_same_v<T, UserData>) {
                    packed.push(tag, v.address);
                } else {
                    packed.push(tag, const_cast<void*>(static_cast<const void*>(v)));
                }
            },
            value);
    }
    return packed;
}

std::vector<ArgValue> unpack_args(const PackedArgs& packed, std::span<const TypeTag> expected) {
    if (packed.count() != expected.size()) {
        std::ostringstream msg;
        msg << "expected " << expected.size() << " arguments, got " << packed.count();
        throw Error(ErrorCode::kTypeMismatch, msg.str());
    }
    std::vector<ArgValue> out;
    out.reserve(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const TypeTag tag = packed.tags()[i];
        if (tag != expected[i]) {
            std::ostringstream msg;
            msg << "argument " << i << ": expected " << type_tag_name(expected[i]) << ", got "
                << type_tag_name(tag);
            throw TypeMismatchError(i, msg.str());
        }
        void* p = packed.payloads()[i];
        switch (tag) {
            case TypeTag::kInt: out.emplace_back(*static_cast<std::int32_t*>(p)); break;
            case TypeTag::kFloat64: out.emplace_back(*static_cast<double*>(p)); break;
            case TypeTag::kArrayF64: out.emplace_back(static_cast<OIFArrayF64*>(p)); break;
            case TypeTag::kStr: out.emplace_back(static_cast<const char*>(p)); break;
            case TypeTag::kCallback: out.emplace_back(static_cast<OIFCallback*>(p)); break;
            case TypeTag::kUserData: out.emplace_back(UserData{p}); break;
            case TypeTag::kConfigDict: out.emplace_back(static_cast<OIFConfigDict*>(p)); break;
            default:
                throw TypeMismatchError(i, "argument " + std::to_string(i) + ": unknown tag " +
                                               std::to_string(static_cast<std::uint32_t>(tag)));
        }
    }
    return out;
}

}  // namespace oif
