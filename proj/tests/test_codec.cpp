#include <doctest.h>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "codec.hpp"

using namespace accnoc;

namespace {

// Independent shift-and-or reference: builds the raw word bit by bit from a
// (lo, width, value) table, sharing nothing with the codec implementation.
struct RawWord {
    std::array<std::uint64_t, 3> w{};
    void put(int lo, int width, std::uint64_t v) {
        for (int i = 0; i < width; ++i) {
            if ((v >> i) & 1) {
                const int pos = lo + i;
                w[static_cast<std::size_t>(pos / 64)] |=
                    std::uint64_t{1} << (pos % 64);
            }
        }
    }
};

RawWord oracle_encode(const HeadFields& h) {
    RawWord r;
    r.put(130, 7, h.routing_info);
    r.put(128, 2, h.packet_head_tail);
    r.put(125, 3, h.source_id);
    r.put(120, 5, h.hwa_id);
    r.put(119, 1, h.packet_type);
    r.put(117, 2, h.task_head_tail);
    r.put(115, 2, h.task_buffer_id);
    r.put(113, 2, h.chaining_depth);
    r.put(107, 6, h.chaining_index);
    r.put(105, 2, h.packet_priority);
    r.put(103, 2, h.packet_direction);
    r.put(71, 32, h.start_address);
    r.put(61, 10, h.data_size);
    r.put(0, 61, h.payload);
    return r;
}

HeadFields random_fields(std::mt19937_64& rng) {
    auto draw = [&](int width) {
        return rng() & ((std::uint64_t{1} << width) - 1);
    };
    HeadFields h;
    h.routing_info = static_cast<std::uint8_t>(draw(7));
    h.packet_head_tail = static_cast<std::uint8_t>(draw(2) | 1); // head set
    h.source_id = static_cast<std::uint8_t>(draw(3));
    h.hwa_id = static_cast<std::uint8_t>(draw(5));
    h.packet_type = static_cast<std::uint8_t>(draw(1));
    h.task_head_tail = static_cast<std::uint8_t>(draw(2));
    h.task_buffer_id = static_cast<std::uint8_t>(draw(2));
    h.chaining_depth = static_cast<std::uint8_t>(draw(2));
    h.chaining_index = static_cast<std::uint8_t>(draw(6));
    h.packet_priority = static_cast<std::uint8_t>(draw(2));
    h.packet_direction = static_cast<std::uint8_t>(draw(2));
    h.start_address = static_cast<std::uint32_t>(draw(32));
    h.data_size = static_cast<std::uint16_t>(draw(10));
    h.payload = draw(61);
    return h;
}

} // namespace

TEST_CASE("encode_head zero fields gives raw zero") {
    HeadFields h;
    h.packet_head_tail = 1; // decode requires the head flag
    Flit f = encode_head(h);
    CHECK(f.limbs()[0] == 0);
    CHECK(f.limbs()[1] == 0);
    CHECK(f.limbs()[2] == 1); // only bit 128
}

TEST_CASE("hwa_id=3 lands on bits 120..121") {
    HeadFields h;
    h.hwa_id = 3;
    Flit f = encode_head(h);
    CHECK(f.to_hex() == "00003000000000000000000000000000000");
}

TEST_CASE("frozen 14-field example vector") {
    HeadFields h;
    h.routing_info = 10; // x=2, y=1
    h.packet_head_tail = 3;
    h.source_id = 5;
    h.hwa_id = 19;
    h.packet_type = 1;
    h.task_head_tail = 2;
    h.task_buffer_id = 1;
    h.chaining_depth = 2;
    h.chaining_index = 39;
    h.packet_priority = 3;
    h.packet_direction = 1;
    h.start_address = 0xDEADBEEFu;
    h.data_size = 777;
    h.payload = 0x1ABCDEF012345678ull & ((std::uint64_t{1} << 61) - 1);
    Flit f = encode_head(h);
    CHECK(f.to_hex() == "02bb3cd3eef56df77e13abcdef012345678");
    CHECK(f.limbs()[0] == 0x3abcdef012345678ull);
    CHECK(f.limbs()[1] == 0xb3cd3eef56df77e1ull);
    CHECK(f.limbs()[2] == 0x2bull);
    CHECK(decode_head(f) == h);
}

TEST_CASE("encode agrees with shift-and-or oracle on random tuples") {
    std::mt19937_64 rng(0xc0dec);
    for (int i = 0; i < 2000; ++i) {
        HeadFields h = random_fields(rng);
        Flit f = encode_head(h);
        RawWord r = oracle_encode(h);
        CHECK(f.limbs()[0] == r.w[0]);
        CHECK(f.limbs()[1] == r.w[1]);
        CHECK(f.limbs()[2] == r.w[2]);
        CHECK(decode_head(f) == h);
    }
}

TEST_CASE("decode of raw 3<<120 yields hwa_id=3") {
    Flit f;
    f.set_bits(120, 5, 3);
    f.set_bit(128, true);
    HeadFields h = decode_head(f);
    CHECK(h.hwa_id == 3);
    h.hwa_id = 0;
    h.packet_head_tail = 0;
    CHECK(h == HeadFields{});
}

TEST_CASE("field overflow is rejected by name") {
    HeadFields h;
    h.hwa_id = 32; // needs 6 bits
    CHECK_THROWS_WITH_AS(encode_head(h), "FieldOverflow: hwa_id", CodecError);
    h.hwa_id = 0;
    h.data_size = 1024;
    CHECK_THROWS_WITH_AS(encode_head(h), "FieldOverflow: data_size", CodecError);
}

TEST_CASE("decode_head requires the head flag") {
    Flit f;
    CHECK_THROWS_AS(decode_head(f), CodecError);
}

TEST_CASE("segment: zero bytes gives a lone head flit with both flags") {
    HeadFields h;
    Packet p = segment({}, h);
    CHECK(p.flits.size() == 1);
    HeadFields out = p.head();
    CHECK(out.is_head());
    CHECK(out.is_tail());
    CHECK(out.data_size == 0);
    CHECK(reassemble(p).empty());
}

TEST_CASE("segment: 16 bytes gives head plus one tail flit") {
    std::vector<std::uint8_t> data(16);
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<std::uint8_t>(i * 7 + 1);
    Packet p = segment(data, HeadFields{});
    CHECK(p.flits.size() == 2);
    CHECK(p.head().is_head());
    CHECK_FALSE(p.head().is_tail());
    BodyFields b = decode_body(p.flits[1]);
    CHECK((b.routing_and_packet_info & 2) != 0); // tail flag
    CHECK(reassemble(p) == data);
}

TEST_CASE("segment: 33 bytes gives 3 body flits, last zero padded") {
    std::vector<std::uint8_t> data(33, 0xff);
    Packet p = segment(data, HeadFields{});
    CHECK(p.flits.size() == 4); // ceil(33/16) = 3 body/tail flits
    BodyFields last = decode_body(p.flits[3]);
    CHECK(last.payload[0] == 0xff);
    for (int i = 1; i < 16; ++i)
        CHECK(last.payload[static_cast<std::size_t>(i)] == 0); // 15 pad bytes
    CHECK(reassemble(p) == data);
}

TEST_CASE("segment/reassemble round-trips 200 random lengths") {
    std::mt19937_64 rng(0x5e9);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t len = rng() % (kMaxDataBytes + 1);
        std::vector<std::uint8_t> data(len);
        for (auto& b : data)
            b = static_cast<std::uint8_t>(rng());
        HeadFields h;
        h.set_dest(static_cast<int>(rng() % 3), static_cast<int>(rng() % 3));
        h.hwa_id = static_cast<std::uint8_t>(rng() % 32);
        Packet p = segment(data, h);
        // flit count formula
        const std::size_t expect =
            len == 0 ? 1 : 1 + (len + kBodyBytes - 1) / kBodyBytes;
        CHECK(p.flits.size() == expect);
        CHECK(reassemble(p) == data);
        // all flits share routing info
        for (const Flit& f : p.flits)
            CHECK(f.bits(130, 7) == h.routing_info);
        // head payload field is reserved zero in payload packets
        CHECK(p.head().payload == 0);
    }
}

TEST_CASE("segment rejects oversize data") {
    std::vector<std::uint8_t> data(kMaxDataBytes + 1);
    CHECK_THROWS_AS(segment(data, HeadFields{}), CodecError);
}

TEST_CASE("command-class packets are single flit") {
    for (PacketKind k :
         {PacketKind::Command, PacketKind::Grant, PacketKind::Notify}) {
        Packet p = make_command(k, HeadFields{});
        CHECK(p.flits.size() == 1);
        CHECK(p.head().is_head());
        CHECK(p.head().is_tail());
        CHECK(p.head().packet_type == kTypeCommand);
    }
    CHECK((make_command(PacketKind::Grant, HeadFields{}).head().payload & 3) ==
          kCmdGrant);
    CHECK((make_command(PacketKind::Notify, HeadFields{}).head().payload & 3) ==
          kCmdNotify);
}

TEST_CASE("reassemble rejects inconsistent flags") {
    std::vector<std::uint8_t> data(20);
    Packet p = segment(data, HeadFields{});
    SUBCASE("missing body flit") {
        p.flits.pop_back();
        CHECK_THROWS_AS(reassemble(p), CodecError);
    }
    SUBCASE("tail flag cleared") {
        BodyFields b = decode_body(p.flits[2]);
        b.routing_and_packet_info &= static_cast<std::uint16_t>(~2);
        p.flits[2] = encode_body(b);
        CHECK_THROWS_AS(reassemble(p), CodecError);
    }
}

TEST_CASE("hex dump round-trips and rejects junk") {
    std::mt19937_64 rng(0x4e);
    for (int i = 0; i < 100; ++i) {
        Flit f = encode_head(random_fields(rng));
        auto back = Flit::from_hex(f.to_hex());
        REQUIRE(back.has_value());
        CHECK(*back == f);
    }
    CHECK_FALSE(Flit::from_hex("xyz").has_value());
    CHECK_FALSE(Flit::from_hex(std::string(35, 'f')).has_value()); // >137 bits
}

TEST_CASE("chain index helpers shift front-first") {
    HeadFields h;
    h.chaining_index = 0b111001; // entries front-to-back: 1, 2, 3
    CHECK(h.chain_entry(0) == 1);
    CHECK(h.chain_entry(1) == 2);
    CHECK(h.chain_entry(2) == 3);
    CHECK(h.chain_index_shifted() == 0b001110); // 2, 3, 0
}
