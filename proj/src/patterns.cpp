#include "netsense/patterns.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>

namespace netsense {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }
bool is_word(char c) { return is_digit(c) || is_alpha(c) || c == '_'; }
bool is_scheme_char(char c) { return is_alpha(c) || is_digit(c) || c == '+' || c == '-' || c == '.'; }

bool url_stop_char(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '"' || c == '\'' ||
           c == '<' || c == '>' || c == '`';
}

struct Segment {
    std::size_t pos;
    std::size_t len;
};

std::vector<Segment> split_run(std::string_view text, std::size_t begin, std::size_t end, char sep) {
    std::vector<Segment> segs;
    std::size_t seg_start = begin;
    for (std::size_t i = begin; i <= end; ++i) {
        if (i == end || text[i] == sep) {
            segs.push_back({seg_start, i - seg_start});
            seg_start = i + 1;
        }
    }
    return segs;
}

bool all_hex(std::string_view text, const Segment& s) {
    for (std::size_t i = 0; i < s.len; ++i) {
        if (!is_hex(text[s.pos + i])) return false;
    }
    return true;
}

void scan_urls(std::string_view text, std::vector<PatternMatch>& out) {
    std::size_t i = 0;
    while ((i = text.find("://", i)) != std::string_view::npos) {
        std::size_t scheme_begin = i;
        while (scheme_begin > 0 && is_scheme_char(text[scheme_begin - 1])) --scheme_begin;
        while (scheme_begin < i && !is_alpha(text[scheme_begin])) ++scheme_begin;
        if (scheme_begin == i) {
            i += 3;
            continue;
        }
        std::size_t end = i + 3;
        while (end < text.size() && !url_stop_char(text[end])) ++end;
        out.push_back({scheme_begin, end - scheme_begin, PatternKind::url});
        i = end;
    }
}

// Runs of [0-9A-Fa-f-]: UUID shape (8-4-4-4-12) or dash-separated MAC.
void scan_hex_dash_runs(std::string_view text, std::vector<PatternMatch>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_hex(text[i]) && text[i] != '-') {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && (is_hex(text[i]) || text[i] == '-')) ++i;
        std::size_t end = i;
        bool left_word = begin > 0 && is_word(text[begin - 1]);
        bool right_word = end < text.size() && is_word(text[end]);
        if (left_word || right_word) continue;

        auto segs = split_run(text, begin, end, '-');
        bool hex_ok = std::all_of(segs.begin(), segs.end(),
                                  [&](const Segment& s) { return all_hex(text, s); });
        if (!hex_ok) continue;
        if (segs.size() == 5 && segs[0].len == 8 && segs[1].len == 4 && segs[2].len == 4 &&
            segs[3].len == 4 && segs[4].len == 12) {
            out.push_back({begin, end - begin, PatternKind::opaque_id});
        } else if (segs.size() == 6 &&
                   std::all_of(segs.begin(), segs.end(),
                               [](const Segment& s) { return s.len == 2; })) {
            out.push_back({begin, end - begin, PatternKind::mac});
        }
    }
}

// Runs of [0-9A-Fa-f:]: colon-separated MAC, else any broad IPv6-looking run.
// A word character flanking the run means the edge of the run is glued to an
// unrelated token; the glued piece (hex fragment plus its colon, or an orphan
// colon) is trimmed off before classifying.
void scan_hex_colon_runs(std::string_view text, std::vector<PatternMatch>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_hex(text[i]) && text[i] != ':') {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && (is_hex(text[i]) || text[i] == ':')) ++i;
        std::size_t end = i;

        if (begin > 0 && is_word(text[begin - 1])) {
            if (text[begin] == ':') {
                ++begin;
            } else {
                std::size_t first_colon = begin;
                while (first_colon < end && text[first_colon] != ':') ++first_colon;
                if (first_colon == end) continue;
                begin = first_colon + 1;
            }
        }
        if (begin < end && end < text.size() && is_word(text[end])) {
            if (text[end - 1] == ':') {
                --end;
            } else {
                std::size_t last_colon = end;
                while (last_colon > begin && text[last_colon - 1] != ':') --last_colon;
                if (last_colon == begin) continue;
                end = last_colon - 1;
            }
        }
        if (begin >= end) continue;

        auto segs = split_run(text, begin, end, ':');
        if (segs.size() == 6 &&
            std::all_of(segs.begin(), segs.end(), [](const Segment& s) { return s.len == 2; })) {
            out.push_back({begin, end - begin, PatternKind::mac});
            continue;
        }
        std::size_t colons = segs.size() - 1;
        bool groups_ok = std::all_of(segs.begin(), segs.end(),
                                     [](const Segment& s) { return s.len <= 4; });
        std::size_t hex_total = 0;
        for (const auto& s : segs) hex_total += s.len;
        if (colons >= 2 && groups_ok && hex_total >= 1) {
            out.push_back({begin, end - begin, PatternKind::ipv6});
        }
    }
}

// Runs of [0-9.]: greedy windows of four consecutive 1-3 digit parts.
void scan_ipv4_runs(std::string_view text, std::vector<PatternMatch>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_digit(text[i]) && text[i] != '.') {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && (is_digit(text[i]) || text[i] == '.')) ++i;
        std::size_t end = i;

        auto segs = split_run(text, begin, end, '.');
        std::vector<bool> usable(segs.size());
        for (std::size_t k = 0; k < segs.size(); ++k) {
            usable[k] = segs[k].len >= 1 && segs[k].len <= 3;
        }
        if (begin > 0 && is_word(text[begin - 1]) && !segs.empty()) usable.front() = false;
        if (end < text.size() && is_word(text[end]) && !segs.empty()) usable.back() = false;

        std::size_t k = 0;
        while (k + 4 <= segs.size()) {
            if (usable[k] && usable[k + 1] && usable[k + 2] && usable[k + 3]) {
                std::size_t mpos = segs[k].pos;
                std::size_t mend = segs[k + 3].pos + segs[k + 3].len;
                out.push_back({mpos, mend - mpos, PatternKind::ipv4});
                k += 4;
            } else {
                ++k;
            }
        }
    }
}

std::optional<std::array<int, 4>> parse_ipv4_octets(std::string_view s) {
    std::array<int, 4> octets{};
    std::size_t pos = 0;
    for (int g = 0; g < 4; ++g) {
        if (g > 0) {
            if (pos >= s.size() || s[pos] != '.') return std::nullopt;
            ++pos;
        }
        if (pos >= s.size() || !is_digit(s[pos])) return std::nullopt;
        int v = 0;
        int digits = 0;
        while (pos < s.size() && is_digit(s[pos]) && digits < 3) {
            v = v * 10 + (s[pos] - '0');
            ++pos;
            ++digits;
        }
        if (v > 255) return std::nullopt;
        octets[static_cast<std::size_t>(g)] = v;
    }
    if (pos != s.size()) return std::nullopt;
    return octets;
}

// Expands an IPv6 literal into 8 groups; supports one "::" and an embedded
// IPv4 tail. Returns nullopt when the text is not a valid address.
std::optional<std::array<std::uint16_t, 8>> parse_ipv6_groups(std::string_view s) {
    if (s.size() < 2) return std::nullopt;

    std::vector<std::string_view> left, right;
    std::size_t dc = s.find("::");
    bool has_dc = dc != std::string_view::npos;
    std::string_view left_text = has_dc ? s.substr(0, dc) : s;
    std::string_view right_text = has_dc ? s.substr(dc + 2) : std::string_view{};
    if (!has_dc && (s.front() == ':' || s.back() == ':')) return std::nullopt;
    if (has_dc && right_text.find("::") != std::string_view::npos) return std::nullopt;

    auto split_groups = [](std::string_view part, std::vector<std::string_view>& out_groups) {
        if (part.empty()) return true;
        if (part.front() == ':' || part.back() == ':') return false;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= part.size(); ++i) {
            if (i == part.size() || part[i] == ':') {
                if (i == start) return false;
                out_groups.push_back(part.substr(start, i - start));
                start = i + 1;
            }
        }
        return true;
    };
    if (!split_groups(left_text, left) || !split_groups(right_text, right)) return std::nullopt;

    std::vector<std::uint16_t> values;
    values.reserve(8);
    auto push_group = [&](std::string_view g, bool last) -> bool {
        if (last && g.find('.') != std::string_view::npos) {
            auto v4 = parse_ipv4_octets(g);
            if (!v4) return false;
            values.push_back(static_cast<std::uint16_t>(((*v4)[0] << 8) | (*v4)[1]));
            values.push_back(static_cast<std::uint16_t>(((*v4)[2] << 8) | (*v4)[3]));
            return true;
        }
        if (g.empty() || g.size() > 4) return false;
        std::uint16_t v = 0;
        for (char c : g) {
            if (!is_hex(c)) return false;
            int d = is_digit(c) ? c - '0' : (c | 0x20) - 'a' + 10;
            v = static_cast<std::uint16_t>(v * 16 + d);
        }
        values.push_back(v);
        return true;
    };

    for (std::size_t k = 0; k < left.size(); ++k) {
        bool last = !has_dc && right.empty() && k + 1 == left.size();
        if (!push_group(left[k], last)) return std::nullopt;
    }
    std::size_t before_right = values.size();
    for (std::size_t k = 0; k < right.size(); ++k) {
        if (!push_group(right[k], k + 1 == right.size())) return std::nullopt;
    }

    if (has_dc) {
        if (values.size() > 7) return std::nullopt;
        std::size_t missing = 8 - values.size();
        values.insert(values.begin() + static_cast<std::ptrdiff_t>(before_right), missing, 0);
    }
    if (values.size() != 8) return std::nullopt;

    std::array<std::uint16_t, 8> groups{};
    std::copy(values.begin(), values.end(), groups.begin());
    return groups;
}

} // namespace

const char* pattern_kind_name(PatternKind kind) {
    switch (kind) {
    case PatternKind::ipv4: return "ipv4";
    case PatternKind::ipv6: return "ipv6";
    case PatternKind::mac: return "mac";
    case PatternKind::url: return "url";
    case PatternKind::opaque_id: return "opaque_id";
    }
    return "unknown";
}

std::vector<PatternMatch> find_pattern_matches(std::string_view text) {
    std::vector<PatternMatch> all;
    scan_urls(text, all);

    auto overlaps_existing = [&all](std::size_t pos, std::size_t len) {
        for (const auto& m : all) {
            if (pos < m.pos + m.len && m.pos < pos + len) return true;
        }
        return false;
    };
    auto merge = [&](std::vector<PatternMatch>&& found) {
        for (auto& m : found) {
            if (!overlaps_existing(m.pos, m.len)) all.push_back(m);
        }
    };

    std::vector<PatternMatch> tmp;
    scan_hex_dash_runs(text, tmp);
    merge(std::move(tmp));
    tmp.clear();
    scan_hex_colon_runs(text, tmp);
    merge(std::move(tmp));
    tmp.clear();
    scan_ipv4_runs(text, tmp);
    merge(std::move(tmp));

    std::sort(all.begin(), all.end(),
              [](const PatternMatch& a, const PatternMatch& b) { return a.pos < b.pos; });
    return all;
}

bool contains_sensitive_pattern(std::string_view text) {
    return !find_pattern_matches(text).empty();
}

bool is_ipv4_literal(std::string_view text) {
    return parse_ipv4_octets(text).has_value();
}

bool is_ipv6_literal(std::string_view text) {
    return parse_ipv6_groups(text).has_value();
}

IpScope classify_ip(const std::string& ip) {
    if (auto v4 = parse_ipv4_octets(ip)) {
        const auto& o = *v4;
        bool priv = o[0] == 0 || o[0] == 10 || o[0] == 127 ||
                    (o[0] == 100 && o[1] >= 64 && o[1] <= 127) ||
                    (o[0] == 169 && o[1] == 254) ||
                    (o[0] == 172 && o[1] >= 16 && o[1] <= 31) ||
                    (o[0] == 192 && o[1] == 0 && (o[2] == 0 || o[2] == 2)) ||
                    (o[0] == 192 && o[1] == 168) ||
                    (o[0] == 198 && (o[1] == 18 || o[1] == 19)) ||
                    (o[0] == 198 && o[1] == 51 && o[2] == 100) ||
                    (o[0] == 203 && o[1] == 0 && o[2] == 113) || o[0] >= 224;
        return priv ? IpScope::private_addr : IpScope::public_addr;
    }
    if (auto v6 = parse_ipv6_groups(ip)) {
        const auto& g = *v6;
        bool all_zero = std::all_of(g.begin(), g.end(), [](std::uint16_t v) { return v == 0; });
        bool loopback = all_zero || (g[7] == 1 && std::all_of(g.begin(), g.end() - 1,
                                                              [](std::uint16_t v) { return v == 0; }));
        bool link_local = (g[0] & 0xffc0) == 0xfe80;
        bool unique_local = (g[0] & 0xfe00) == 0xfc00;
        bool multicast = (g[0] & 0xff00) == 0xff00;
        bool documentation = g[0] == 0x2001 && g[1] == 0x0db8;
        bool v4_mapped = g[0] == 0 && g[1] == 0 && g[2] == 0 && g[3] == 0 && g[4] == 0 &&
                         g[5] == 0xffff;
        if (v4_mapped) {
            int a = g[6] >> 8, b = g[6] & 0xff, c = g[7] >> 8, d = g[7] & 0xff;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%d.%d.%d.%d", a, b, c, d);
            return classify_ip(buf);
        }
        if (loopback || link_local || unique_local || multicast || documentation) {
            return IpScope::private_addr;
        }
        return IpScope::public_addr;
    }
    return IpScope::invalid;
}

} // namespace netsense
