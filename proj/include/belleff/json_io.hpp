#pragma once

// JSON encodings for the on-disk formats, plus a canonical writer.
//
// Conventions (shared by every format):
//   - rationals are lowest-terms strings: "num/den", or "num" when den == 1;
//     bare JSON integers are accepted on input
//   - the canonical writer sorts object keys, indents by two spaces, and
//     ends with a newline, so write(parse(write(v))) == write(v) byte for byte
//
// Formats:
//   distribution: {a_labels, b_labels, metadata{approximate, source},
//                  probs[x][y][a][b], x_labels, y_labels}
//   certificate:  {claimed_value, coeffs[a][b][x][y], kind}
//                 (note the output-major nesting, opposite of probs)
//   strategy:     {alice: [output label or "bot", per x], bob: [...], class}
//   protocol:     {alice_out, bob_out, c, transcript} for one deterministic
//                 protocol, or {mixture: [{protocol, weight}, ...]}

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "belleff/bell.hpp"
#include "belleff/certificates.hpp"
#include "belleff/dist.hpp"
#include "belleff/errors.hpp"
#include "belleff/protocol.hpp"
#include "belleff/rational.hpp"
#include "belleff/strategies.hpp"

namespace belleff {

using Json = nlohmann::json;  // std::map-backed: object keys come out sorted

inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json rat_to_json(const Rat& r) { return rat_to_string(r); }

inline Rat rat_from_json(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (!j.is_string()) throw input_error(what + " must be a \"num/den\" string");
    try {
        return parse_rat(j.get<std::string>());
    } catch (const input_error&) {
        throw input_error(what + ": cannot parse \"" + j.get<std::string>() + "\" as a rational");
    }
}

namespace jsondetail {

inline std::vector<std::string> labels_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw input_error(what + " must be a nonempty array");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw input_error(what + " entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw input_error(std::string("missing \"") + key + "\" field");
    return j.at(key);
}

inline std::vector<std::vector<int>> int_table_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw input_error(what + " must be a nonempty array of rows");
    std::vector<std::vector<int>> out;
    for (const auto& row : j) {
        if (!row.is_array()) throw input_error(what + " rows must be arrays");
        std::vector<int> r;
        for (const auto& e : row) {
            if (!e.is_number_integer()) throw input_error(what + " entries must be integers");
            r.push_back(e.get<int>());
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace jsondetail

// ---- distributions ---------------------------------------------------------

/// Parsed but unvalidated distribution data, for diagnostic tooling that
/// must be able to look at files make_dist would reject.
struct RawDist {
    std::vector<std::string> x_labels, y_labels, a_labels, b_labels;
    std::vector<Rat> dense;  // indexed ((x*ny + y)*na + a)*nb + b
    DistMetadata metadata;

    int nx() const { return static_cast<int>(x_labels.size()); }
    int ny() const { return static_cast<int>(y_labels.size()); }
    int na() const { return static_cast<int>(a_labels.size()); }
    int nb() const { return static_cast<int>(b_labels.size()); }
    const Rat& at(int x, int y, int a, int b) const {
        return dense[static_cast<std::size_t>(((x * ny() + y) * na() + a) * nb() + b)];
    }
};

inline RawDist raw_dist_from_json(const Json& j) {
    using jsondetail::field;
    RawDist r;
    r.x_labels = jsondetail::labels_from_json(field(j, "x_labels"), "x_labels");
    r.y_labels = jsondetail::labels_from_json(field(j, "y_labels"), "y_labels");
    r.a_labels = jsondetail::labels_from_json(field(j, "a_labels"), "a_labels");
    r.b_labels = jsondetail::labels_from_json(field(j, "b_labels"), "b_labels");
    if (j.contains("metadata")) {
        const Json& md = j.at("metadata");
        if (!md.is_object()) throw input_error("metadata must be an object");
        if (md.contains("approximate")) {
            if (!md.at("approximate").is_boolean())
                throw input_error("metadata.approximate must be a boolean");
            r.metadata.approximate = md.at("approximate").get<bool>();
        }
        if (md.contains("source")) {
            if (!md.at("source").is_string())
                throw input_error("metadata.source must be a string");
            r.metadata.source = md.at("source").get<std::string>();
        }
    }
    const Json& probs = field(j, "probs");
    if (!probs.is_array() || static_cast<int>(probs.size()) != r.nx())
        throw input_error("probs must have one row per x label");
    r.dense.reserve(static_cast<std::size_t>(r.nx()) * r.ny() * r.na() * r.nb());
    for (const auto& px : probs) {
        if (!px.is_array() || static_cast<int>(px.size()) != r.ny())
            throw input_error("probs rows must have one entry per y label");
        for (const auto& pxy : px) {
            if (!pxy.is_array() || static_cast<int>(pxy.size()) != r.na())
                throw input_error("probs blocks must have one row per a label");
            for (const auto& pxya : pxy) {
                if (!pxya.is_array() || static_cast<int>(pxya.size()) != r.nb())
                    throw input_error("probs block rows must have one entry per b label");
                for (const auto& v : pxya) r.dense.push_back(rat_from_json(v, "probs entry"));
            }
        }
    }
    return r;
}

/// Diagnostics on a raw distribution; never throws on semantic problems.
struct RawDistReport {
    bool nonnegative = true;
    bool normalized = true;
    bool nonsignaling = true;
    std::vector<std::string> problems;
};

inline RawDistReport check_raw_dist(const RawDist& r) {
    RawDistReport rep;
    for (int x = 0; x < r.nx(); ++x)
        for (int y = 0; y < r.ny(); ++y) {
            Rat sum = 0;
            for (int a = 0; a < r.na(); ++a)
                for (int b = 0; b < r.nb(); ++b) {
                    const Rat& v = r.at(x, y, a, b);
                    if (v < 0 && rep.nonnegative) {
                        rep.nonnegative = false;
                        rep.problems.push_back("negative entry at x=" + r.x_labels[x] +
                                               " y=" + r.y_labels[y]);
                    }
                    sum += v;
                }
            if (sum != 1) {
                if (rep.normalized)
                    rep.problems.push_back("block x=" + r.x_labels[x] + " y=" + r.y_labels[y] +
                                           " sums to " + rat_to_string(sum));
                rep.normalized = false;
            }
        }
    // marginal independence, meaningful even for unnormalized tables
    for (int x = 0; x < r.nx() && rep.nonsignaling; ++x)
        for (int a = 0; a < r.na() && rep.nonsignaling; ++a)
            for (int y = 1; y < r.ny() && rep.nonsignaling; ++y) {
                Rat m0 = 0, my = 0;
                for (int b = 0; b < r.nb(); ++b) {
                    m0 += r.at(x, 0, a, b);
                    my += r.at(x, y, a, b);
                }
                if (m0 != my) {
                    rep.nonsignaling = false;
                    rep.problems.push_back("alice marginal at x=" + r.x_labels[x] +
                                           " depends on y");
                }
            }
    for (int y = 0; y < r.ny() && rep.nonsignaling; ++y)
        for (int b = 0; b < r.nb() && rep.nonsignaling; ++b)
            for (int x = 1; x < r.nx() && rep.nonsignaling; ++x) {
                Rat m0 = 0, mx = 0;
                for (int a = 0; a < r.na(); ++a) {
                    m0 += r.at(0, y, a, b);
                    mx += r.at(x, y, a, b);
                }
                if (m0 != mx) {
                    rep.nonsignaling = false;
                    rep.problems.push_back("bob marginal at y=" + r.y_labels[y] +
                                           " depends on x");
                }
            }
    return rep;
}

inline Dist dist_from_raw(const RawDist& r) {
    std::vector<SparseBlock> blocks(static_cast<std::size_t>(r.nx()) * r.ny());
    for (int x = 0; x < r.nx(); ++x)
        for (int y = 0; y < r.ny(); ++y)
            for (int a = 0; a < r.na(); ++a)
                for (int b = 0; b < r.nb(); ++b) {
                    const Rat& v = r.at(x, y, a, b);
                    if (v != 0)
                        blocks[static_cast<std::size_t>(x) * r.ny() + y].emplace_back(
                            a * r.nb() + b, v);
                }
    return make_dist(r.x_labels, r.y_labels, r.a_labels, r.b_labels, std::move(blocks),
                     r.metadata);
}

inline Dist dist_from_json(const Json& j) { return dist_from_raw(raw_dist_from_json(j)); }

inline Json dist_to_json(const Dist& p) {
    Json j;
    j["x_labels"] = p.x_labels;
    j["y_labels"] = p.y_labels;
    j["a_labels"] = p.a_labels;
    j["b_labels"] = p.b_labels;
    Json probs = Json::array();
    for (int x = 0; x < p.nx(); ++x) {
        Json px = Json::array();
        for (int y = 0; y < p.ny(); ++y) {
            Json pxy = Json::array();
            for (int a = 0; a < p.na(); ++a) {
                Json row = Json::array();
                for (int b = 0; b < p.nb(); ++b) row.push_back(rat_to_json(p.prob(x, y, a, b)));
                pxy.push_back(std::move(row));
            }
            px.push_back(std::move(pxy));
        }
        probs.push_back(std::move(px));
    }
    j["probs"] = std::move(probs);
    j["metadata"] = Json{{"approximate", p.metadata.approximate}, {"source", p.metadata.source}};
    return j;
}

// ---- certificates ----------------------------------------------------------

inline Json certificate_to_json(const Certificate& c) {
    Json j;
    j["kind"] = cert_kind_name(c.kind);
    j["claimed_value"] = rat_to_json(c.claimed_value);
    Json coeffs = Json::array();
    for (int a = 0; a < c.coeffs.na; ++a) {
        Json ca = Json::array();
        for (int b = 0; b < c.coeffs.nb; ++b) {
            Json cab = Json::array();
            for (int x = 0; x < c.coeffs.nx; ++x) {
                Json row = Json::array();
                for (int y = 0; y < c.coeffs.ny; ++y)
                    row.push_back(rat_to_json(c.coeffs.coeff(x, y, a, b)));
                cab.push_back(std::move(row));
            }
            ca.push_back(std::move(cab));
        }
        coeffs.push_back(std::move(ca));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline Certificate certificate_from_json(const Json& j) {
    using jsondetail::field;
    Certificate c;
    const Json& kind = field(j, "kind");
    if (!kind.is_string()) throw input_error("kind must be a string");
    c.kind = cert_kind_from_name(kind.get<std::string>());
    c.claimed_value = rat_from_json(field(j, "claimed_value"), "claimed_value");
    if (c.claimed_value <= 0) throw input_error("claimed_value must be positive");

    const Json& coeffs = field(j, "coeffs");
    if (!coeffs.is_array() || coeffs.empty() || !coeffs.at(0).is_array() ||
        coeffs.at(0).empty() || !coeffs.at(0).at(0).is_array() || coeffs.at(0).at(0).empty() ||
        !coeffs.at(0).at(0).at(0).is_array() || coeffs.at(0).at(0).at(0).empty())
        throw input_error("coeffs must be a four-deep nested array");
    const int na = static_cast<int>(coeffs.size());
    const int nb = static_cast<int>(coeffs.at(0).size());
    const int nx = static_cast<int>(coeffs.at(0).at(0).size());
    const int ny = static_cast<int>(coeffs.at(0).at(0).at(0).size());
    std::vector<Rat> dense(static_cast<std::size_t>(nx) * ny * na * nb, Rat(0));
    for (int a = 0; a < na; ++a) {
        if (static_cast<int>(coeffs.at(a).size()) != nb)
            throw input_error("coeffs rows are not uniform");
        for (int b = 0; b < nb; ++b) {
            const Json& cab = coeffs.at(a).at(b);
            if (!cab.is_array() || static_cast<int>(cab.size()) != nx)
                throw input_error("coeffs blocks are not uniform");
            for (int x = 0; x < nx; ++x) {
                const Json& row = cab.at(x);
                if (!row.is_array() || static_cast<int>(row.size()) != ny)
                    throw input_error("coeffs block rows are not uniform");
                for (int y = 0; y < ny; ++y)
                    dense[static_cast<std::size_t>(((x * ny + y) * na + a) * nb + b)] =
                        rat_from_json(row.at(y), "coeffs entry");
            }
        }
    }
    c.coeffs = functional_from_dense(nx, ny, na, nb, dense);
    return c;
}

// ---- strategies ------------------------------------------------------------

inline Json strategy_to_json(const DetStrategy& s, const std::vector<std::string>& a_labels,
                             const std::vector<std::string>& b_labels) {
    Json j;
    j["class"] = strategy_class_name(s.cls);
    Json alice = Json::array(), bob = Json::array();
    for (int v : s.alice) {
        if (v != kAbort && (v < 0 || v >= static_cast<int>(a_labels.size())))
            throw input_error("alice output index out of range");
        alice.push_back(v == kAbort ? "bot" : a_labels[static_cast<std::size_t>(v)]);
    }
    for (int v : s.bob) {
        if (v != kAbort && (v < 0 || v >= static_cast<int>(b_labels.size())))
            throw input_error("bob output index out of range");
        bob.push_back(v == kAbort ? "bot" : b_labels[static_cast<std::size_t>(v)]);
    }
    j["alice"] = std::move(alice);
    j["bob"] = std::move(bob);
    return j;
}

inline DetStrategy strategy_from_json(const Json& j, const std::vector<std::string>& a_labels,
                                      const std::vector<std::string>& b_labels) {
    using jsondetail::field;
    DetStrategy s;
    const Json& cls = field(j, "class");
    if (!cls.is_string()) throw input_error("class must be a string");
    s.cls = strategy_class_from_name(cls.get<std::string>());
    auto side = [](const Json& arr, const std::vector<std::string>& labels,
                   const std::string& what) {
        if (!arr.is_array() || arr.empty())
            throw input_error(what + " must be a nonempty array of output labels");
        std::vector<int> out;
        for (const auto& e : arr) {
            if (!e.is_string()) throw input_error(what + " entries must be label strings");
            const std::string v = e.get<std::string>();
            if (v == "bot") {
                out.push_back(kAbort);
                continue;
            }
            bool found = false;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == v) {
                    out.push_back(static_cast<int>(i));
                    found = true;
                    break;
                }
            if (!found) throw input_error(what + ": unknown output label \"" + v + "\"");
        }
        return out;
    };
    s.alice = side(field(j, "alice"), a_labels, "alice");
    s.bob = side(field(j, "bob"), b_labels, "bob");
    for (int v : s.alice)
        if (v == kAbort && s.cls == StrategyClass::no_abort)
            throw input_error("NoAbort strategy contains an abort");
    for (int v : s.bob)
        if (v == kAbort && s.cls != StrategyClass::both_abort)
            throw input_error("only BothAbort strategies may abort on bob's side");
    return s;
}

// ---- protocols -------------------------------------------------------------

namespace jsondetail {

inline Json single_protocol_to_json(const CommProtocol& p) {
    Json j;
    j["c"] = p.c;
    j["transcript"] = p.transcript;
    j["alice_out"] = p.alice_out;
    j["bob_out"] = p.bob_out;
    return j;
}

inline CommProtocol single_protocol_from_json(const Json& j) {
    CommProtocol p;
    const Json& c = field(j, "c");
    if (!c.is_number_integer()) throw input_error("c must be an integer");
    p.c = c.get<int>();
    p.transcript = int_table_from_json(field(j, "transcript"), "transcript");
    p.alice_out = int_table_from_json(field(j, "alice_out"), "alice_out");
    p.bob_out = int_table_from_json(field(j, "bob_out"), "bob_out");
    return p;
}

}  // namespace jsondetail

/// A single deterministic protocol is written flat; true mixtures get a
/// "mixture" wrapper. Output alphabet sizes are inferred jointly across
/// components so a constant-output component cannot shrink them.
inline Json protocol_to_json(const MixedProtocol& mp) {
    if (mp.empty()) throw input_error("empty protocol mixture");
    if (mp.size() == 1)
        return jsondetail::single_protocol_to_json(mp.front().second);
    Json arr = Json::array();
    for (const auto& [w, p] : mp)
        arr.push_back(Json{{"weight", rat_to_json(w)},
                           {"protocol", jsondetail::single_protocol_to_json(p)}});
    return Json{{"mixture", std::move(arr)}};
}

inline MixedProtocol protocol_from_json(const Json& j) {
    MixedProtocol mp;
    if (j.is_object() && j.contains("mixture")) {
        const Json& arr = j.at("mixture");
        if (!arr.is_array() || arr.empty())
            throw input_error("mixture must be a nonempty array");
        for (const auto& e : arr)
            mp.emplace_back(rat_from_json(jsondetail::field(e, "weight"), "mixture weight"),
                            jsondetail::single_protocol_from_json(jsondetail::field(e, "protocol")));
    } else {
        mp.emplace_back(Rat(1), jsondetail::single_protocol_from_json(j));
    }
    int na = 1, nb = 1;
    for (auto& [w, p] : mp) {
        infer_output_sizes(p);
        na = std::max(na, p.na);
        nb = std::max(nb, p.nb);
    }
    for (auto& [w, p] : mp) {
        p.na = na;
        p.nb = nb;
    }
    require_mixture(mp);
    return mp;
}

/// Parse a whole document, mapping syntax errors to input_error.
inline Json parse_json_text(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed JSON");
    return j;
}

}  // namespace belleff
