#include "codec.hpp"

#include <algorithm>

namespace accnoc {

namespace {

void put_field(Flit& f, const field::Spec& spec, std::uint64_t value) {
    const std::uint64_t mask = spec.width == 64
                                   ? ~std::uint64_t{0}
                                   : (std::uint64_t{1} << spec.width) - 1;
    if ((value & ~mask) != 0)
        throw CodecError(std::string("FieldOverflow: ") + spec.name);
    f.set_bits(spec.lo, spec.width, value);
}

} // namespace

Flit encode_head(const HeadFields& h) {
    Flit f;
    put_field(f, field::routing_info, h.routing_info);
    put_field(f, field::packet_head_tail, h.packet_head_tail);
    put_field(f, field::source_id, h.source_id);
    put_field(f, field::hwa_id, h.hwa_id);
    put_field(f, field::packet_type, h.packet_type);
    put_field(f, field::task_head_tail, h.task_head_tail);
    put_field(f, field::task_buffer_id, h.task_buffer_id);
    put_field(f, field::chaining_depth, h.chaining_depth);
    put_field(f, field::chaining_index, h.chaining_index);
    put_field(f, field::packet_priority, h.packet_priority);
    put_field(f, field::packet_direction, h.packet_direction);
    put_field(f, field::start_address, h.start_address);
    put_field(f, field::data_size, h.data_size);
    put_field(f, field::payload, h.payload);
    return f;
}

HeadFields decode_head(const Flit& f) {
    if (!f.bit(field::packet_head_tail.lo))
        throw CodecError("NotHeadFlit");
    HeadFields h;
    h.routing_info = static_cast<std::uint8_t>(
        f.bits(field::routing_info.lo, field::routing_info.width));
    h.packet_head_tail = static_cast<std::uint8_t>(
        f.bits(field::packet_head_tail.lo, field::packet_head_tail.width));
    h.source_id = static_cast<std::uint8_t>(
        f.bits(field::source_id.lo, field::source_id.width));
    h.hwa_id =
        static_cast<std::uint8_t>(f.bits(field::hwa_id.lo, field::hwa_id.width));
    h.packet_type = static_cast<std::uint8_t>(
        f.bits(field::packet_type.lo, field::packet_type.width));
    h.task_head_tail = static_cast<std::uint8_t>(
        f.bits(field::task_head_tail.lo, field::task_head_tail.width));
    h.task_buffer_id = static_cast<std::uint8_t>(
        f.bits(field::task_buffer_id.lo, field::task_buffer_id.width));
    h.chaining_depth = static_cast<std::uint8_t>(
        f.bits(field::chaining_depth.lo, field::chaining_depth.width));
    h.chaining_index = static_cast<std::uint8_t>(
        f.bits(field::chaining_index.lo, field::chaining_index.width));
    h.packet_priority = static_cast<std::uint8_t>(
        f.bits(field::packet_priority.lo, field::packet_priority.width));
    h.packet_direction = static_cast<std::uint8_t>(
        f.bits(field::packet_direction.lo, field::packet_direction.width));
    h.start_address = static_cast<std::uint32_t>(
        f.bits(field::start_address.lo, field::start_address.width));
    h.data_size = static_cast<std::uint16_t>(
        f.bits(field::data_size.lo, field::data_size.width));
    h.payload = f.bits(field::payload.lo, field::payload.width);
    return h;
}

Flit encode_body(const BodyFields& b) {
    if (b.routing_and_packet_info >> 9 != 0)
        throw CodecError("FieldOverflow: routing_and_packet_info");
    Flit f;
    f.set_bits(128, 9, b.routing_and_packet_info);
    for (int i = 0; i < 16; ++i)
        f.set_bits(i * 8, 8, b.payload[static_cast<std::size_t>(i)]);
    return f;
}

BodyFields decode_body(const Flit& f) {
    BodyFields b;
    b.routing_and_packet_info = static_cast<std::uint16_t>(f.bits(128, 9)) & 0x1ff;
    for (int i = 0; i < 16; ++i)
        b.payload[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(f.bits(i * 8, 8));
    return b;
}

const char* kind_name(PacketKind k) {
    switch (k) {
    case PacketKind::Command: return "command";
    case PacketKind::Payload: return "payload";
    case PacketKind::Grant: return "grant";
    case PacketKind::Notify: return "notify";
    case PacketKind::Result: return "result";
    }
    return "?";
}

bool is_single_flit_kind(PacketKind k) {
    return k == PacketKind::Command || k == PacketKind::Grant ||
           k == PacketKind::Notify;
}

Packet make_command(PacketKind kind, HeadFields header) {
    if (!is_single_flit_kind(kind))
        throw CodecError("make_command: not a command-class kind");
    header.packet_head_tail = 3; // single flit is both head and tail
    header.packet_type = kTypeCommand;
    std::uint64_t subtype = kCmdRequest;
    if (kind == PacketKind::Grant)
        subtype = kCmdGrant;
    else if (kind == PacketKind::Notify)
        subtype = kCmdNotify;
    header.payload = (header.payload & ~std::uint64_t{3}) | subtype;
    Packet p;
    p.kind = kind;
    p.flits.push_back(encode_head(header));
    return p;
}

Packet segment(std::span<const std::uint8_t> data, HeadFields header,
               PacketKind kind) {
    if (kind != PacketKind::Payload && kind != PacketKind::Result)
        throw CodecError("segment: kind must carry data");
    if (data.size() > kMaxDataBytes)
        throw CodecError("Oversize: data exceeds 1023 bytes");

    const std::size_t nbody = (data.size() + kBodyBytes - 1) / kBodyBytes;
    header.packet_type = kTypeData;
    header.data_size = static_cast<std::uint16_t>(data.size());
    header.payload = 0; // data rides only in body flits
    header.packet_head_tail = nbody == 0 ? 3 : 1;

    Packet p;
    p.kind = kind;
    p.flits.reserve(nbody + 1);
    p.flits.push_back(encode_head(header));

    const std::uint16_t route9 = static_cast<std::uint16_t>(header.routing_info);
    for (std::size_t i = 0; i < nbody; ++i) {
        BodyFields b;
        const bool tail = i + 1 == nbody;
        // bits 128..136 = {head,tail} flags then routing_info
        b.routing_and_packet_info =
            static_cast<std::uint16_t>((tail ? 2 : 0) | (route9 << 2));
        const std::size_t off = i * kBodyBytes;
        const std::size_t n = std::min(kBodyBytes, data.size() - off);
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(off), n,
                    b.payload.begin()); // final flit stays zero-padded
        p.flits.push_back(encode_body(b));
    }
    return p;
}

std::vector<std::uint8_t> reassemble(const Packet& p) {
    if (p.flits.empty())
        throw CodecError("Malformed: empty packet");
    const HeadFields h = decode_head(p.flits[0]);
    if (!h.is_head())
        throw CodecError("Malformed: first flit lacks head flag");
    const std::size_t nbody = p.flits.size() - 1;
    if (nbody == 0 && !h.is_tail())
        throw CodecError("Malformed: single flit without tail flag");
    if (nbody > 0 && h.is_tail())
        throw CodecError("Malformed: head flit marked tail in multi-flit packet");

    const std::size_t want = (static_cast<std::size_t>(h.data_size) +
                              kBodyBytes - 1) / kBodyBytes;
    if (nbody != want)
        throw CodecError("Malformed: flit count does not match data_size");

    std::vector<std::uint8_t> out;
    out.reserve(h.data_size);
    for (std::size_t i = 1; i < p.flits.size(); ++i) {
        const BodyFields b = decode_body(p.flits[i]);
        const bool tail = (b.routing_and_packet_info & 2) != 0;
        if (tail != (i + 1 == p.flits.size()))
            throw CodecError("Malformed: tail flag on wrong flit");
        const std::size_t n = std::min(
            kBodyBytes, static_cast<std::size_t>(h.data_size) - out.size());
        out.insert(out.end(), b.payload.begin(),
                   b.payload.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

} // namespace accnoc
