// Artifact I/O: little-endian f64 field dumps with JSON sidecars, CSV and
// JSON serialization of diagnostic reports, atomic file writes and a compact
// SHA-256 for content hashes in sidecars and manifests.
#ifndef FBLAB_IO_HPP
#define FBLAB_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fblab/blowup.hpp"
#include "fblab/diagnostics.hpp"
#include "fblab/grid.hpp"
#include "fblab/singular_set.hpp"
#include "fblab/solver.hpp"
#include "fblab/very_thin.hpp"

namespace fblab {

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), enough for content fingerprints.
namespace sha256_detail {
inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }
}

inline std::string sha256_hex(const void* data, size_t len) {
    using sha256_detail::rotr;
    static const uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
        0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
        0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
        0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
        0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    uint32_t H[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::vector<uint8_t> msg(reinterpret_cast<const uint8_t*>(data),
                             reinterpret_cast<const uint8_t*>(data) + len);
    uint64_t bitlen = static_cast<uint64_t>(len) * 8;
    msg.push_back(0x80);
    while (msg.size() % 64 != 56) msg.push_back(0);
    for (int i = 7; i >= 0; --i) msg.push_back(static_cast<uint8_t>(bitlen >> (8 * i)));
    for (size_t off = 0; off < msg.size(); off += 64) {
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (msg[off + 4 * i] << 24) | (msg[off + 4 * i + 1] << 16) | (msg[off + 4 * i + 2] << 8) |
                   msg[off + 4 * i + 3];
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = H[0], b = H[1], c = H[2], d = H[3], e = H[4], f = H[5], g = H[6], h = H[7];
        for (int i = 0; i < 64; ++i) {
            uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = h + S1 + ch + K[i] + w[i];
            uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = S0 + maj;
            h = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
        }
        H[0] += a; H[1] += b; H[2] += c; H[3] += d; H[4] += e; H[5] += f; H[6] += g; H[7] += h;
    }
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", H[i]);
    return std::string(out, 64);
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

// ---------------------------------------------------------------------------
// Atomic write: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Field dump: little-endian f64, axis-major (x1[, x2], y with y fastest),
// half-domain y >= 0, plus a JSON sidecar.
inline std::string field_bytes(const ScalarField& u) {
    std::string bytes(u.values.size() * 8, '\0');
    for (size_t i = 0; i < u.values.size(); ++i) {
        uint64_t bits;
        std::memcpy(&bits, &u.values[i], 8);
        for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    return bytes;
}

inline nlohmann::json field_sidecar(const ScalarField& u) {
    const Grid& g = *u.grid;
    nlohmann::json j;
    j["n"] = g.n();
    j["res"] = g.spec().res;
    j["a"] = g.a();
    j["order"] = g.n() == 1 ? "x1,y" : "x1,x2,y";
    j["y_levels"] = g.ny();
    j["half_domain"] = "y >= 0 stored; fields are even in y";
    std::string bytes = field_bytes(u);
    j["sha256"] = sha256_hex(bytes.data(), bytes.size());
    return j;
}

inline void write_field(const std::filesystem::path& stem, const ScalarField& u) {
    atomic_write(stem.string() + ".bin", field_bytes(u));
    atomic_write(stem.string() + ".json", field_sidecar(u).dump(2) + "\n");
}

inline ScalarField read_field(const std::filesystem::path& stem, const Grid& g) {
    std::ifstream is(stem.string() + ".bin", std::ios::binary);
    if (!is) throw std::runtime_error("read_field: cannot open " + stem.string() + ".bin");
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bytes.size() != g.node_count() * 8)
        throw std::runtime_error("read_field: size mismatch against the grid");
    ScalarField u(g);
    for (size_t i = 0; i < u.values.size(); ++i) {
        uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[8 * i + b])) << (8 * b);
        std::memcpy(&u.values[i], &bits, 8);
    }
    return u;
}

// ---------------------------------------------------------------------------
// Coefficient-map export of a polynomial: one entry per monomial.
inline nlohmann::json poly_json(const MultiPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : p.terms())
        terms.push_back({{"e", {m.e1, m.e2, m.ey}}, {"c", c}});
    return {{"terms", terms}, {"text", to_string(p)}};
}

// Grid descriptor: spec plus the derived exact weights; no binary payload.
inline nlohmann::json grid_json(const Grid& g) {
    nlohmann::json j;
    j["n"] = g.n();
    j["res"] = g.spec().res;
    j["a"] = g.a();
    j["h"] = g.h();
    j["y_levels"] = g.ny();
    std::vector<double> fw, dw;
    for (int k = 0; k + 1 < g.ny(); ++k) fw.push_back(g.face_weight_y(k));
    for (int k = 0; k < g.ny(); ++k) dw.push_back(g.dual_weight_y(k));
    j["face_weights_y"] = fw;
    j["dual_weights_y"] = dw;
    j["thin_nodes"] = g.thin_mask().size();
    j["verythin_nodes"] = g.verythin_mask().size();
    return j;
}

// ---------------------------------------------------------------------------
// Deterministic number formatting for CSV artifacts.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string profile_csv(const FrequencyProfile& p) {
    std::ostringstream os;
    os << "r,H,D,N";
    for (double lam : p.lambdas) os << ",W_" << fmt_g17(lam) << ",H_" << fmt_g17(lam);
    os << "\n";
    for (size_t i = 0; i < p.radii.size(); ++i) {
        os << fmt_g17(p.radii[i]) << "," << fmt_g17(p.H[i]) << "," << fmt_g17(p.D[i]) << ","
           << fmt_g17(p.N[i]);
        for (size_t l = 0; l < p.lambdas.size(); ++l)
            os << "," << fmt_g17(p.W_lambda[l][i]) << "," << fmt_g17(p.H_lambda[l][i]);
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json profile_json(const FrequencyProfile& p) {
    nlohmann::json j;
    j["center"] = {p.center[0], p.center[1], p.center[2]};
    j["radii"] = p.radii;
    j["H"] = p.H;
    j["D"] = p.D;
    j["N"] = p.N;
    j["lambdas"] = p.lambdas;
    j["N_at_zero"] = p.N_at_zero;
    j["fit_residual"] = p.fit_residual;
    j["monotone_N"] = p.monotone_N;
    j["monotone_W"] = std::vector<bool>(p.monotone_W.begin(), p.monotone_W.end());
    j["monotone_H"] = std::vector<bool>(p.monotone_H.begin(), p.monotone_H.end());
    j["low_confidence"] = p.low_confidence;
    j["truncated"] = p.truncated;
    return j;
}

// gnuplot-friendly data file: '#' header, whitespace-separated columns.
inline std::string profile_gnuplot(const FrequencyProfile& p) {
    std::ostringstream os;
    os << "# r H D N";
    for (double lam : p.lambdas) os << " W_" << fmt_g17(lam) << " H_" << fmt_g17(lam);
    os << "\n";
    for (size_t i = 0; i < p.radii.size(); ++i) {
        os << fmt_g17(p.radii[i]) << " " << fmt_g17(p.H[i]) << " " << fmt_g17(p.D[i]) << " "
           << fmt_g17(p.N[i]);
        for (size_t l = 0; l < p.lambdas.size(); ++l)
            os << " " << fmt_g17(p.W_lambda[l][i]) << " " << fmt_g17(p.H_lambda[l][i]);
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json kkt_json(const KktReport& k) {
    nlohmann::json j;
    j["max_obstacle_violation"] = k.max_obstacle_violation;
    j["max_positive_flux"] = k.max_positive_flux;
    j["max_complementarity"] = k.max_complementarity;
    j["interior_residual"] = k.interior_residual;
    nlohmann::json fl = nlohmann::json::array();
    for (const auto& f : k.flux_density)
        fl.push_back({{"x", {f.where[0], f.where[1], f.where[2]}}, {"flux", f.value}});
    j["flux_density"] = fl;
    return j;
}

inline nlohmann::json blowup_json(const BlowupReport& b) {
    nlohmann::json j;
    j["center"] = {b.center[0], b.center[1], b.center[2]};
    j["kappa"] = b.kappa;
    j["p_star"] = to_string(b.p_star);
    j["spine_dim"] = b.spine_dim;
    j["lambda_star"] = b.lambda_star;
    j["lambda_err"] = b.lambda_err;
    j["case"] = to_string(b.kind);
    j["q"] = to_string(b.q);
    j["q_scaled"] = to_string(b.q_scaled);
    j["poly_fit_residual"] = b.poly_fit_residual;
    j["harmonicity_residual"] = b.harmonicity_residual;
    j["h_lambda_limit"] = b.h_lambda_limit;
    j["orthogonality"] = {{"inner_p_star", b.orthogonality.inner_p_star},
                          {"probe_names", b.orthogonality.probe_names},
                          {"probe_inners", b.orthogonality.probe_inners},
                          {"probes_nonpositive", b.orthogonality.probes_nonpositive}};
    j["nxt"] = {b.nxt_flags[0], b.nxt_flags[1], b.nxt_flags[2]};
    j["notes"] = b.notes;
    return j;
}

inline std::string strata_csv(const StratumTable& t) {
    std::ostringstream os;
    os << "x1,x2,kappa,m,lambda_star,stratum,anomalous,boundary_of_classification,nxt,confidence,note\n";
    for (const auto& e : t.entries) {
        os << fmt_g17(e.where[0]) << "," << fmt_g17(e.where[1]) << "," << e.kappa << "," << e.m << ","
           << fmt_g17(e.lambda_star) << "," << e.stratum << "," << (e.anomalous ? 1 : 0) << ","
           << (e.boundary_of_classification ? 1 : 0) << "," << (e.nxt ? 1 : 0) << ","
           << fmt_g17(e.confidence) << "," << e.note << "\n";
    }
    return os.str();
}

inline nlohmann::json strata_json(const StratumTable& t) {
    nlohmann::json j;
    j["scanned_points"] = t.scanned_points;
    j["contact_points"] = t.contact_points;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : t.entries)
        rows.push_back({{"x", {e.where[0], e.where[1]}},
                        {"kappa", e.kappa},
                        {"m", e.m},
                        {"lambda_star", e.lambda_star},
                        {"stratum", e.stratum},
                        {"anomalous", e.anomalous},
                        {"boundary_of_classification", e.boundary_of_classification},
                        {"nxt", e.nxt},
                        {"confidence", e.confidence},
                        {"note", e.note}});
    j["entries"] = rows;
    return j;
}

inline std::string line_csv(const std::vector<double>& x, const std::vector<double>& v,
                            const std::string& header = "x,v") {
    std::ostringstream os;
    os << header << "\n";
    for (size_t i = 0; i < x.size(); ++i) os << fmt_g17(x[i]) << "," << fmt_g17(v[i]) << "\n";
    return os.str();
}

inline void read_line_csv(const std::filesystem::path& path, std::vector<double>& x,
                          std::vector<double>& v) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_line_csv: cannot open " + path.string());
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) continue;
        x.push_back(std::stod(line.substr(0, comma)));
        v.push_back(std::stod(line.substr(comma + 1)));
    }
}

inline nlohmann::json equivalence_json(const EquivalenceReport& r) {
    nlohmann::json j;
    j["rejected"] = r.rejected;
    j["reason"] = r.reason;
    j["max_disc_contact"] = r.max_disc_contact;
    j["rel_disc_contact"] = r.rel_disc_contact;
    j["max_disc_global"] = r.max_disc_global;
    j["obstacle_scale"] = r.obstacle_scale;
    j["contact_count_w1"] = r.contact_count_w1;
    j["contact_count_w3"] = r.contact_count_w3;
    j["x"] = r.line_x;
    j["w1"] = r.w1_line;
    j["w3"] = r.w3_line;
    return j;
}

inline nlohmann::json barrier_json(const BarrierReport& b) {
    nlohmann::json j;
    j["beta"] = b.beta;
    j["trace_error"] = b.trace_error;
    j["min_on_sphere"] = b.min_on_sphere;
    j["measured_exponent"] = b.measured_exponent;
    j["fit_spread"] = b.fit_spread;
    j["osc_radii"] = b.osc_radii;
    j["osc_values"] = b.osc_values;
    return j;
}

} // namespace fblab

#endif
