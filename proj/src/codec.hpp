#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flit.hpp"
#include "types.hpp"

namespace accnoc {

// Head-flit field layout. Bit positions are part of the wire format and
// must not change.
namespace field {
struct Spec {
    const char* name;
    int lo;
    int width;
};
inline constexpr Spec routing_info{"routing_info", 130, 7};
inline constexpr Spec packet_head_tail{"packet_head_tail", 128, 2};
inline constexpr Spec source_id{"source_id", 125, 3};
inline constexpr Spec hwa_id{"hwa_id", 120, 5};
inline constexpr Spec packet_type{"packet_type", 119, 1};
inline constexpr Spec task_head_tail{"task_head_tail", 117, 2};
inline constexpr Spec task_buffer_id{"task_buffer_id", 115, 2};
inline constexpr Spec chaining_depth{"chaining_depth", 113, 2};
inline constexpr Spec chaining_index{"chaining_index", 107, 6};
inline constexpr Spec packet_priority{"packet_priority", 105, 2};
inline constexpr Spec packet_direction{"packet_direction", 103, 2};
inline constexpr Spec start_address{"start_address", 71, 32};
inline constexpr Spec data_size{"data_size", 61, 10};
inline constexpr Spec payload{"payload", 0, 61};
} // namespace field

// packet_type values
inline constexpr std::uint8_t kTypeCommand = 0;
inline constexpr std::uint8_t kTypeData = 1;

// packet_direction values
inline constexpr std::uint8_t kDirDirect = 0;
inline constexpr std::uint8_t kDirMemory = 1;

// Command packets use the low 2 payload bits as a subtype so receivers can
// tell requests, grants and completion notifications apart.
inline constexpr std::uint64_t kCmdRequest = 0;
inline constexpr std::uint64_t kCmdGrant = 1;
inline constexpr std::uint64_t kCmdNotify = 2;

struct HeadFields {
    std::uint8_t routing_info = 0;     // 7 bits: {x:3, y:3, reserved:1}
    std::uint8_t packet_head_tail = 0; // bit0 = head, bit1 = tail
    std::uint8_t source_id = 0;        // 3 bits
    std::uint8_t hwa_id = 0;           // 5 bits
    std::uint8_t packet_type = 0;      // 1 bit
    std::uint8_t task_head_tail = 0;   // bit0 = first packet, bit1 = last
    std::uint8_t task_buffer_id = 0;   // 2 bits
    std::uint8_t chaining_depth = 0;   // 2 bits, remaining hops
    std::uint8_t chaining_index = 0;   // three 2-bit entries, front at bit 0
    std::uint8_t packet_priority = 0;  // 2 bits
    std::uint8_t packet_direction = 0; // 2 bits
    std::uint32_t start_address = 0;   // 32 bits
    std::uint16_t data_size = 0;       // 10 bits, bytes
    std::uint64_t payload = 0;         // 61 bits

    bool operator==(const HeadFields&) const = default;

    bool is_head() const { return packet_head_tail & 1; }
    bool is_tail() const { return packet_head_tail & 2; }
    bool task_first() const { return task_head_tail & 1; }
    bool task_last() const { return task_head_tail & 2; }
    int dest_x() const { return routing_info & 7; }
    int dest_y() const { return (routing_info >> 3) & 7; }
    void set_dest(int x, int y) {
        routing_info = static_cast<std::uint8_t>((x & 7) | ((y & 7) << 3));
    }
    std::uint8_t chain_entry(int i) const {
        return static_cast<std::uint8_t>((chaining_index >> (2 * i)) & 3);
    }
    // Drops the front entry; used when a chain hop is consumed.
    std::uint8_t chain_index_shifted() const {
        return static_cast<std::uint8_t>((chaining_index >> 2) & 0x3f);
    }
};

struct BodyFields {
    std::uint8_t routing_and_packet_info = 0; // 9 bits (bits 128..136)
    std::array<std::uint8_t, 16> payload{};   // 128 bits, byte 0 at bit 0

    bool operator==(const BodyFields&) const = default;
};

Flit encode_head(const HeadFields& fields);      // throws CodecError on overflow
HeadFields decode_head(const Flit& f);           // throws CodecError if head flag clear
Flit encode_body(const BodyFields& fields);
BodyFields decode_body(const Flit& f);

enum class PacketKind { Command, Payload, Grant, Notify, Result };

const char* kind_name(PacketKind k);
bool is_single_flit_kind(PacketKind k);

// An ordered flit sequence. The head flit carries the decoded header; body
// and tail flits carry 16 payload bytes each.
struct Packet {
    PacketKind kind = PacketKind::Command;
    std::vector<Flit> flits;

    HeadFields head() const { return decode_head(flits.at(0)); }
    // Number of body/tail flits; this is the N of all latency formulas.
    int payload_flits() const {
        return static_cast<int>(flits.size()) - 1;
    }
};

inline constexpr std::size_t kMaxDataBytes = 1023; // 10-bit data_size field
inline constexpr std::size_t kBodyBytes = 16;      // 128-bit body payload

// Builds a single-flit command-class packet (request / grant / notify).
Packet make_command(PacketKind kind, HeadFields header);

// Splits data into 1 head flit + ceil(len/16) body/tail flits. The header's
// packet/task flags, data_size and payload field are overwritten. kind must
// be Payload or Result.
Packet segment(std::span<const std::uint8_t> data, HeadFields header,
               PacketKind kind = PacketKind::Payload);

// Inverse of segment: returns exactly data_size bytes. Throws CodecError on
// inconsistent head/tail flags.
std::vector<std::uint8_t> reassemble(const Packet& p);

} // namespace accnoc
