#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace netsense {

// Text patterns treated as sensitive. UUID-shaped strings report as opaque_id.
enum class PatternKind { ipv4, ipv6, mac, url, opaque_id };

const char* pattern_kind_name(PatternKind kind);

struct PatternMatch {
    std::size_t pos = 0;
    std::size_t len = 0;
    PatternKind kind = PatternKind::ipv4;
};

// One scan pass: non-overlapping matches in positional order. Matching is
// deliberately broad (IPv6 in particular accepts any plausible hextet run);
// false positives redact harmless text, which is the intended failure mode.
std::vector<PatternMatch> find_pattern_matches(std::string_view text);

// Convenience used by privacy assertions across modules.
bool contains_sensitive_pattern(std::string_view text);

// Strict literal checks (full-string, not substring).
bool is_ipv4_literal(std::string_view text);
bool is_ipv6_literal(std::string_view text);

enum class IpScope { public_addr, private_addr, invalid };

// RFC1918, loopback, link-local, CGNAT, multicast, documentation and other
// non-routable ranges all classify as private_addr.
IpScope classify_ip(const std::string& ip);

} // namespace netsense
