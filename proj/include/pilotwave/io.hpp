#pragma once

// Deterministic exports: CSV with round-trip precision, a raw binary history
// format, SHA-256 checksums and gnuplot scripts.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "pilotwave/currents.hpp"
#include "pilotwave/dirac.hpp"
#include "pilotwave/dynamics.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/field_history.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/stress_energy.hpp"

namespace pilotwave {

/// Shortest text that reads back to the same double ("nan" and "inf" kept).
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw InvalidInput("cannot write " + path.string());
        out_ << header << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::ofstream out_;
};

inline void write_field_csv(const std::filesystem::path& path, const SpinorField& f) {
    CsvWriter w(path, "x,re_psi1,im_psi1,re_psi2,im_psi2");
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx a = f.components[0][i], b = f.components[1][i];
        w.row(f.grid.x(i), a.real(), a.imag(), b.real(), b.imag());
    }
}

inline void write_field_csv(const std::filesystem::path& path, const ScalarFieldState& s) {
    CsvWriter w(path, "x,re_phi,im_phi,re_dphi_dt,im_dphi_dt");
    for (std::size_t i = 0; i < s.size(); ++i)
        w.row(s.grid.x(i), s.phi[i].real(), s.phi[i].imag(), s.dphi_dt[i].real(), s.dphi_dt[i].imag());
}

inline void write_current_csv(const std::filesystem::path& path, const CurrentField& c) {
    CsvWriter w(path, "x,j0,j1,rho0,vbar,defined");
    for (std::size_t i = 0; i < c.size(); ++i)
        w.row(c.grid.x(i), c.j0[i], c.j1[i], c.rho0[i], c.vbar[i], static_cast<int>(c.defined[i]));
}

inline void write_worldline_csv(const std::filesystem::path& path, const Worldline& wl,
                                std::span<const double> residual = {}) {
    CsvWriter w(path, "t,x,u0,u1,tau,residual");
    for (std::size_t i = 0; i < wl.size(); ++i) {
        const auto& s = wl.samples[i];
        const double r = i < residual.size() ? residual[i] : std::nan("");
        w.row(s.t, s.x, s.u.t, s.u.x, s.tau, r);
    }
}

inline void write_tensor_csv(const std::filesystem::path& path, std::span<const StressEnergyField> parts) {
    CsvWriter w(path, "x,part,T00,T01,T10,T11");
    for (const auto& t : parts)
        for (std::size_t i = 0; i < t.size(); ++i)
            w.row(t.grid.x(i), to_string(t.part), t.values[i][0], t.values[i][1], t.values[i][2], t.values[i][3]);
}

// Binary history: magic, kind, lattice, mass, dt_store, slice count, then per
// slice its time followed by two complex arrays (psi_1, psi_2 or phi,
// dphi/dt) as raw little-endian doubles.
namespace detail {

inline constexpr std::array<char, 8> kHistoryMagic{'P', 'W', 'H', 'I', 'S', 'T', '1', '\0'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw InvalidInput("truncated history file");
    return v;
}

inline void put_array(std::ostream& out, const std::vector<cplx>& a) {
    out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(cplx)));
}

inline void take_array(std::istream& in, std::vector<cplx>& a, std::size_t n) {
    a.resize(n);
    in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!in) throw InvalidInput("truncated history file");
}

template <class Field>
constexpr std::uint32_t history_kind() {
    return std::is_same_v<Field, SpinorField> ? 0u : 1u;
}

inline const std::vector<cplx>& first_array(const SpinorField& f) { return f.components[0]; }
inline const std::vector<cplx>& second_array(const SpinorField& f) { return f.components[1]; }
inline const std::vector<cplx>& first_array(const ScalarFieldState& f) { return f.phi; }
inline const std::vector<cplx>& second_array(const ScalarFieldState& f) { return f.dphi_dt; }
inline std::vector<cplx>& first_array(SpinorField& f) { return f.components[0]; }
inline std::vector<cplx>& second_array(SpinorField& f) { return f.components[1]; }
inline std::vector<cplx>& first_array(ScalarFieldState& f) { return f.phi; }
inline std::vector<cplx>& second_array(ScalarFieldState& f) { return f.dphi_dt; }

}  // namespace detail

template <class Field>
void write_history_binary(const std::filesystem::path& path, const FieldHistory<Field>& h) {
    if (h.empty()) throw InvalidInput("cannot write an empty history");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out.write(detail::kHistoryMagic.data(), detail::kHistoryMagic.size());
    detail::put(out, detail::history_kind<Field>());
    detail::put(out, static_cast<std::uint64_t>(h[0].grid.size()));
    detail::put(out, h[0].grid.length());
    detail::put(out, h[0].mass);
    detail::put(out, h.dt_store());
    detail::put(out, static_cast<std::uint64_t>(h.size()));
    for (const auto& s : h.slices()) {
        detail::put(out, s.time);
        detail::put_array(out, detail::first_array(s));
        detail::put_array(out, detail::second_array(s));
    }
}

template <class Field>
FieldHistory<Field> read_history_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != detail::kHistoryMagic) throw InvalidInput("not a history file: " + path.string());
    if (detail::take<std::uint32_t>(in) != detail::history_kind<Field>())
        throw InvalidInput("history file holds a different wave equation");
    const auto n = detail::take<std::uint64_t>(in);
    const auto length = detail::take<double>(in);
    const auto mass = detail::take<double>(in);
    const auto dt = detail::take<double>(in);
    const auto count = detail::take<std::uint64_t>(in);
    const LatticeGrid grid(static_cast<std::size_t>(n), length);
    FieldHistory<Field> h(dt);
    for (std::uint64_t k = 0; k < count; ++k) {
        Field f(grid, mass);
        f.time = detail::take<double>(in);
        detail::take_array(in, detail::first_array(f), grid.size());
        detail::take_array(in, detail::second_array(f), grid.size());
        h.append(std::move(f));
    }
    return h;
}

/// Lowercase hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

struct GnuplotSeries {
    std::string file;
    int x_column;
    int y_column;
    std::string title;
};

/// A script that plots each series from its CSV into a PNG next to it.
inline void write_gnuplot_script(const std::filesystem::path& path, const std::string& output_png,
                                 const std::string& xlabel, const std::string& ylabel,
                                 std::span<const GnuplotSeries> series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "set datafile separator ','\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << output_png << "'\n"
        << "set xlabel '" << xlabel << "'\n"
        << "set ylabel '" << ylabel << "'\n"
        << "set key outside\n"
        << "plot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        out << (i ? ", \\\n     " : "") << "'" << s.file << "' every ::1 using " << s.x_column << ":" << s.y_column
            << " with lines title '" << s.title << "'";
    }
    out << '\n';
}

}  // namespace pilotwave
