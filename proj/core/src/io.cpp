#include "decospace/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace decospace {

static_assert(std::endian::native == std::endian::little,
              "the binary containers are little-endian; big-endian hosts are unsupported");

namespace {

constexpr std::uint32_t kFieldVersion = 1;

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void put(std::ofstream& out, T v) {
    put_bytes(out, &v, sizeof(T));
}

void get_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw config_error("io", "truncated_file", "unexpected end of " + path);
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    get_bytes(in, &v, sizeof(T), path);
    return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw config_error("io", "open_failed", "cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("io", "open_failed", "cannot open " + path);
    return in;
}

void check_magic(std::ifstream& in, const char* magic, const std::string& path) {
    char buf[4];
    get_bytes(in, buf, 4, path);
    if (std::memcmp(buf, magic, 4) != 0)
        throw config_error("io", "bad_magic", path + " is not a " + magic + " file");
}

} // namespace

void write_field_dspf(const std::string& path, const SampledField& f) {
    if (f.empty()) throw config_error("io", "empty_field", "refusing to write an empty field");
    auto out = open_out(path, std::ios::binary);
    put_bytes(out, "DSPF", 4);
    put<std::uint32_t>(out, kFieldVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.spec().d));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.spec().n));
    put<double>(out, f.spec().L);
    auto sp = f.space();
    put_bytes(out, sp.data(), sp.size() * sizeof(cdouble));
}

SampledField read_field_dspf(const std::string& path) {
    auto in = open_in(path);
    check_magic(in, "DSPF", path);
    auto version = get<std::uint32_t>(in, path);
    if (version != kFieldVersion)
        throw config_error("io", "bad_version", path + " has an unsupported version");
    int d = static_cast<int>(get<std::uint32_t>(in, path));
    int n = static_cast<int>(get<std::uint32_t>(in, path));
    double L = get<double>(in, path);
    GridSpec g(d, n, L);
    std::vector<cdouble> vals(g.size());
    get_bytes(in, vals.data(), vals.size() * sizeof(cdouble), path);
    return SampledField::from_space(g, std::move(vals));
}

void write_field_csv(const std::string& path, const SampledField& f) {
    auto out = open_out(path, std::ios::out);
    out << "index,re,im\n";
    auto sp = f.space();
    char line[96];
    for (std::size_t a = 0; a < sp.size(); ++a) {
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", a, sp[a].real(), sp[a].imag());
        out << line;
    }
}

void write_coefficients_dscf(const std::string& path, const CoefficientArray& C) {
    auto out = open_out(path, std::ios::binary);
    put_bytes(out, "DSCF", 4);
    put<double>(out, C.delta);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(C.values.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(C.d));
    for (std::size_t i = 0; i < C.values.size(); ++i) {
        const LatticeRange& r = C.ranges[i];
        for (int m = 0; m < 2; ++m) put<std::int32_t>(out, r.kmin[m]);
        for (int m = 0; m < 2; ++m) put<std::int32_t>(out, r.kmax[m]);
        put_bytes(out, C.values[i].data(), C.values[i].size() * sizeof(cdouble));
    }
}

CoefficientArray read_coefficients_dscf(const std::string& path) {
    auto in = open_in(path);
    check_magic(in, "DSCF", path);
    CoefficientArray C;
    C.delta = get<double>(in, path);
    auto count = get<std::uint32_t>(in, path);
    C.d = static_cast<int>(get<std::uint32_t>(in, path));
    if (C.d != 1 && C.d != 2)
        throw config_error("io", "bad_dimension", path + " has an unsupported dimension");
    C.ranges.resize(count);
    C.values.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        LatticeRange& r = C.ranges[i];
        for (int m = 0; m < 2; ++m) r.kmin[m] = get<std::int32_t>(in, path);
        for (int m = 0; m < 2; ++m) r.kmax[m] = get<std::int32_t>(in, path);
        if (r.kmax[0] < r.kmin[0] || (C.d == 2 && r.kmax[1] < r.kmin[1]))
            throw config_error("io", "bad_range", path + " has an empty lattice range");
        C.values[i].resize(r.count(C.d));
        get_bytes(in, C.values[i].data(), C.values[i].size() * sizeof(cdouble), path);
    }
    return C;
}

void write_coefficients_csv(const std::string& path, const CoefficientArray& C) {
    auto out = open_out(path, std::ios::out);
    out << (C.d == 1 ? "i,k,re,im\n" : "i,k0,k1,re,im\n");
    char line[128];
    for (std::size_t i = 0; i < C.values.size(); ++i) {
        const LatticeRange& r = C.ranges[i];
        for (int k0 = r.kmin[0]; k0 <= r.kmax[0]; ++k0) {
            if (C.d == 1) {
                cdouble v = C.values[i][r.flatten({k0, 0}, 1)];
                std::snprintf(line, sizeof(line), "%zu,%d,%.17g,%.17g\n", i, k0, v.real(),
                              v.imag());
                out << line;
            } else {
                for (int k1 = r.kmin[1]; k1 <= r.kmax[1]; ++k1) {
                    cdouble v = C.values[i][r.flatten({k0, k1}, 2)];
                    std::snprintf(line, sizeof(line), "%zu,%d,%d,%.17g,%.17g\n", i, k0, k1,
                                  v.real(), v.imag());
                    out << line;
                }
            }
        }
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    auto out = open_out(path, std::ios::out);
    out << header << '\n';
    for (const std::string& row : rows) out << row << '\n';
}

} // namespace decospace
