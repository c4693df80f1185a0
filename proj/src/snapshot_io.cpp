#include "ionspec/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ionspec/errors.hpp"

namespace ionspec {

static_assert(std::endian::native == std::endian::little,
              "snapshot encoding assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'I', 'O', 'N', 'S', 'P', 'E', 'C', '\0'};

class Writer {
public:
    template <class T>
    void put(T v) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        bytes.insert(bytes.end(), b, b + sizeof(T));
    }
    void raw(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        bytes.insert(bytes.end(), c, c + n);
    }
    std::vector<unsigned char> bytes;
};

class Reader {
public:
    Reader(const std::vector<unsigned char>& b, std::string origin)
        : bytes_(b), origin_(std::move(origin)) {}

    template <class T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw SnapshotTruncatedError(origin_ + ": truncated snapshot (" +
                                         std::to_string(bytes_.size()) + " bytes)");
        }
    }
    std::size_t pos() const { return pos_; }

private:
    const std::vector<unsigned char>& bytes_;
    std::string origin_;
    std::size_t pos_ = 0;
};

void put_field(Writer& w, const SpectralField& f) {
    const auto& g = f.grid();
    const int n = g.n();
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const cplx c = f.coeff(g.wavenumber(i1), g.wavenumber(i2));
            w.put(c.real());
            w.put(c.imag());
        }
    }
}

SpectralField get_field(Reader& r, const GridPtr& grid) {
    const int n = grid->n();
    SpectralField f(grid);
    auto data = f.data();
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const double re = r.get<double>();
            const double im = r.get<double>();
            if (i2 < grid->half()) data[grid->flat(i1, i2)] = cplx(re, im);
        }
    }
    return f;
}

}  // namespace

std::uint64_t fnv1a(const unsigned char* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<unsigned char> encode_snapshot(const SimState& state) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.put<std::uint32_t>(kSnapshotVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(state.grid().n()));
    w.put<std::uint8_t>(state.model() == Model::NPE ? 1 : 2);
    w.put<double>(state.time());
    w.put<std::int64_t>(state.step_index());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(state.species().size()));
    for (const auto& s : state.species()) {
        w.put<double>(s.z);
        w.put<double>(s.D);
    }
    for (const auto& s : state.species()) put_field(w, s.c);
    if (state.model() == Model::NPE) put_field(w, state.omega());
    w.put<std::uint64_t>(fnv1a(w.bytes.data(), w.bytes.size()));
    return std::move(w.bytes);
}

SimState decode_snapshot(const std::vector<unsigned char>& bytes, const std::string& origin) {
    Reader r(bytes, origin);
    r.need(sizeof kMagic);
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw IoError(origin + ": not a snapshot file (bad magic)");
    }
    for (std::size_t i = 0; i < sizeof kMagic; ++i) r.get<char>();
    const auto version = r.get<std::uint32_t>();
    if (version != kSnapshotVersion) {
        throw SnapshotVersionError(origin + ": snapshot version " + std::to_string(version) +
                                   ", expected " + std::to_string(kSnapshotVersion));
    }
    const auto n = r.get<std::uint32_t>();
    const auto tag = r.get<std::uint8_t>();
    const double time = r.get<double>();
    const auto step = r.get<std::int64_t>();
    const auto count = r.get<std::uint32_t>();
    if (tag != 1 && tag != 2) throw IoError(origin + ": unknown model tag");
    if (n < 8 || n % 2 != 0 || n > 65536 || count == 0 || count > 4096) {
        throw IoError(origin + ": corrupt snapshot header");
    }
    const std::size_t fields = count + (tag == 1 ? 1 : 0);
    const std::size_t expected = r.pos() + 16 * std::size_t(count) +
                                 fields * std::size_t(n) * n * 16 + sizeof(std::uint64_t);
    if (bytes.size() < expected) {
        throw SnapshotTruncatedError(origin + ": truncated snapshot, " + std::to_string(bytes.size()) +
                                     " of " + std::to_string(expected) + " bytes");
    }
    if (bytes.size() > expected) throw IoError(origin + ": trailing bytes after snapshot");
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + expected - sizeof stored, sizeof stored);
    if (stored != fnv1a(bytes.data(), expected - sizeof stored)) {
        throw SnapshotChecksumError(origin + ": snapshot checksum mismatch");
    }

    auto grid = SpectralGrid::create(static_cast<int>(n));
    std::vector<std::pair<double, double>> params;
    for (std::uint32_t i = 0; i < count; ++i) {
        const double z = r.get<double>();
        const double D = r.get<double>();
        params.emplace_back(z, D);
    }
    std::vector<IonSpecies> species;
    for (std::uint32_t i = 0; i < count; ++i) {
        species.push_back({params[i].first, params[i].second, get_field(r, grid)});
    }
    FluidState fluid = DarcyFluid{};
    if (tag == 1) fluid = EulerFluid{get_field(r, grid)};
    try {
        SimState state(grid, std::move(species), std::move(fluid), time);
        state.set_step_index(step);
        state.refresh();
        return state;
    } catch (const ConfigError& e) {
        throw IoError(origin + ": " + e.what());
    }
}

void write_snapshot(const SimState& state, const std::filesystem::path& path) {
    const auto bytes = encode_snapshot(state);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path.string() + ": cannot open for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError(path.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": " + ec.message());
}

SimState read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open snapshot");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_snapshot(bytes, path.string());
}

}  // namespace ionspec
