#include "netsense/patterns.hpp"

#include "support/fuzz.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace netsense;

namespace {

bool has_match(const std::string& text, PatternKind kind, const std::string& expected) {
    for (const auto& m : find_pattern_matches(text)) {
        if (m.kind == kind && text.substr(m.pos, m.len) == expected) return true;
    }
    return false;
}

std::size_t match_count(const std::string& text) { return find_pattern_matches(text).size(); }

} // namespace

TEST_CASE("ipv4 literals are recognized exactly") {
    CHECK(is_ipv4_literal("0.0.0.0"));
    CHECK(is_ipv4_literal("192.168.1.1"));
    CHECK(is_ipv4_literal("255.255.255.255"));
    CHECK_FALSE(is_ipv4_literal("256.1.1.1"));
    CHECK_FALSE(is_ipv4_literal("1.2.3"));
    CHECK_FALSE(is_ipv4_literal("1.2.3.4.5"));
    CHECK_FALSE(is_ipv4_literal("1.2.3.4 "));
    CHECK_FALSE(is_ipv4_literal("a.b.c.d"));
    CHECK_FALSE(is_ipv4_literal(""));
}

TEST_CASE("ipv6 literals are recognized exactly") {
    CHECK(is_ipv6_literal("::1"));
    CHECK(is_ipv6_literal("::"));
    CHECK(is_ipv6_literal("2001:db8::8a2e:370:7334"));
    CHECK(is_ipv6_literal("2001:0db8:85a3:0000:0000:8a2e:0370:7334"));
    CHECK(is_ipv6_literal("::ffff:192.0.2.128"));
    CHECK(is_ipv6_literal("fe80::1"));
    CHECK_FALSE(is_ipv6_literal("2001:db8"));
    CHECK_FALSE(is_ipv6_literal("1:2:3:4:5:6:7:8:9"));
    CHECK_FALSE(is_ipv6_literal("12345::1"));
    CHECK_FALSE(is_ipv6_literal("g::1"));
    CHECK_FALSE(is_ipv6_literal(""));
}

TEST_CASE("ip scope classification") {
    CHECK(classify_ip("8.8.8.8") == IpScope::public_addr);
    CHECK(classify_ip("203.0.113.9") == IpScope::private_addr); // documentation range
    CHECK(classify_ip("10.0.0.1") == IpScope::private_addr);
    CHECK(classify_ip("172.16.0.1") == IpScope::private_addr);
    CHECK(classify_ip("172.31.255.255") == IpScope::private_addr);
    CHECK(classify_ip("172.32.0.1") == IpScope::public_addr);
    CHECK(classify_ip("192.168.0.1") == IpScope::private_addr);
    CHECK(classify_ip("127.0.0.1") == IpScope::private_addr);
    CHECK(classify_ip("169.254.10.10") == IpScope::private_addr);
    CHECK(classify_ip("100.64.0.1") == IpScope::private_addr); // CGNAT
    CHECK(classify_ip("224.0.0.1") == IpScope::private_addr);  // multicast
    CHECK(classify_ip("::1") == IpScope::private_addr);
    CHECK(classify_ip("fe80::1") == IpScope::private_addr);
    CHECK(classify_ip("fc00::1") == IpScope::private_addr);
    CHECK(classify_ip("fd12:3456::1") == IpScope::private_addr);
    CHECK(classify_ip("2001:db8::1") == IpScope::private_addr); // documentation
    CHECK(classify_ip("2607:f8b0:4005:805::200e") == IpScope::public_addr);
    CHECK(classify_ip("::ffff:10.0.0.1") == IpScope::private_addr);
    CHECK(classify_ip("::ffff:8.8.8.8") == IpScope::public_addr);
    CHECK(classify_ip("not an ip") == IpScope::invalid);
    CHECK(classify_ip("") == IpScope::invalid);
}

TEST_CASE("scanner finds embedded identifiers") {
    CHECK(has_match("client at 203.0.113.9 reported", PatternKind::ipv4, "203.0.113.9"));
    CHECK(has_match("v6 2001:db8::8a2e:370:7334 here", PatternKind::ipv6, "2001:db8::8a2e:370:7334"));
    CHECK(has_match("nic aa:bb:cc:dd:ee:ff ok", PatternKind::mac, "aa:bb:cc:dd:ee:ff"));
    CHECK(has_match("nic AA-BB-CC-DD-EE-FF ok", PatternKind::mac, "AA-BB-CC-DD-EE-FF"));
    CHECK(has_match("see https://example.net/r/abc123 now", PatternKind::url,
                    "https://example.net/r/abc123"));
    CHECK(has_match("id 123e4567-e89b-12d3-a456-426614174000 end", PatternKind::opaque_id,
                    "123e4567-e89b-12d3-a456-426614174000"));
}

TEST_CASE("scanner finds identifiers at string boundaries") {
    CHECK(has_match("203.0.113.9", PatternKind::ipv4, "203.0.113.9"));
    CHECK(has_match("203.0.113.9 leads", PatternKind::ipv4, "203.0.113.9"));
    CHECK(has_match("trails 203.0.113.9", PatternKind::ipv4, "203.0.113.9"));
    CHECK(has_match("aa:bb:cc:dd:ee:ff", PatternKind::mac, "aa:bb:cc:dd:ee:ff"));
    CHECK(has_match("(192.0.2.7)", PatternKind::ipv4, "192.0.2.7"));
    CHECK(has_match("ip=192.0.2.7,", PatternKind::ipv4, "192.0.2.7"));
}

TEST_CASE("word-flanked digit runs are not addresses") {
    CHECK(match_count("version1.2.3.4") == 0);
    CHECK(match_count("1.2.3.4beta") == 0);
    CHECK(match_count("release v1.2.33 of module 8.15") == 0);
    CHECK(match_count("pi is 3.14159") == 0);
}

TEST_CASE("benign colon usage is not an address") {
    CHECK(match_count("std::vector and netsense::kb are names") == 0);
    CHECK(match_count("ratio 3:1 and score 10:4") == 0);
    CHECK(match_count("see chapter 12: overview") == 0);
}

TEST_CASE("identifier glued to a label is still caught") {
    // Fail-closed rule: the run after the first colon is scanned on its own.
    CHECK(has_match("time:aa:bb:cc:dd:ee:ff", PatternKind::mac, "aa:bb:cc:dd:ee:ff"));
    std::string text = "mac:00:11:22:33:44:55 seen";
    CHECK(has_match(text, PatternKind::mac, "00:11:22:33:44:55"));
}

TEST_CASE("mac wins over ipv6 for six hex pairs") {
    auto matches = find_pattern_matches("aa:bb:cc:dd:ee:ff");
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].kind == PatternKind::mac);
}

TEST_CASE("url match takes priority over its components") {
    std::string text = "visit https://host.example.net/a/123e4567-e89b-12d3-a456-426614174000";
    auto matches = find_pattern_matches(text);
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].kind == PatternKind::url);
}

TEST_CASE("matches are non-overlapping and ordered") {
    std::string text = "a 10.0.0.1 b aa:bb:cc:dd:ee:ff c http://x.example.net/p d";
    auto matches = find_pattern_matches(text);
    REQUIRE(matches.size() == 3);
    for (std::size_t i = 1; i < matches.size(); ++i) {
        CHECK(matches[i - 1].pos + matches[i - 1].len <= matches[i].pos);
    }
}

TEST_CASE("redaction placeholders are inert to the scanner") {
    CHECK(match_count("[REDACTED:ipv4] [REDACTED:ipv6] [REDACTED:mac]") == 0);
    CHECK(match_count("[REDACTED:url] [REDACTED:opaque_id] [REDACTED:timestamp]") == 0);
}

TEST_CASE("generated identifiers are always caught") {
    netsense::testing::Rng rng(20260819u);
    for (int i = 0; i < 500; ++i) {
        std::string id = netsense::testing::random_identifier(rng);
        CAPTURE(id);
        CHECK(contains_sensitive_pattern(id));
        CHECK(contains_sensitive_pattern("prefix " + id + " suffix"));
    }
}

TEST_CASE("benign prose stays match-free") {
    netsense::testing::Rng rng(42u);
    for (int i = 0; i < 200; ++i) {
        std::string words = netsense::testing::random_words(rng, 30);
        CAPTURE(words);
        CHECK_FALSE(contains_sensitive_pattern(words));
    }
}

TEST_CASE("pattern kind names are stable") {
    CHECK(std::string(pattern_kind_name(PatternKind::ipv4)) == "ipv4");
    CHECK(std::string(pattern_kind_name(PatternKind::ipv6)) == "ipv6");
    CHECK(std::string(pattern_kind_name(PatternKind::mac)) == "mac");
    CHECK(std::string(pattern_kind_name(PatternKind::url)) == "url");
    CHECK(std::string(pattern_kind_name(PatternKind::opaque_id)) == "opaque_id");
}
