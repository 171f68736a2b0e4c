#include "dnls/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dnls {

namespace {

constexpr char kMagic[8] = {'D', 'N', 'L', 'S', 'C', 'K', 'P', '1'};

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& buf, long long v) { put_u64(buf, static_cast<std::uint64_t>(v)); }

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(buf, bits);
}

void put_field(std::string& buf, const SpectralField& f) {
    put_i64(buf, f.size());
    for (const cplx& z : f.coeffs()) {
        put_f64(buf, z.real());
        put_f64(buf, z.imag());
    }
}

class Reader {
public:
    explicit Reader(const std::string& buf) : buf_(buf) {}
    std::uint64_t u64() {
        if (pos_ + 8 > buf_.size()) throw CheckpointError("checkpoint truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i]))
                 << (8 * i);
        pos_ += 8;
        return v;
    }
    long long i64() { return static_cast<long long>(u64()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    SpectralField field() {
        const long long M = i64();
        if (M < 0 || M > (1 << 24)) throw CheckpointError("checkpoint corrupt: bad size");
        SpectralField f(static_cast<int>(M));
        for (cplx& z : f.coeffs()) {
            const double re = f64();
            const double im = f64();
            z = cplx{re, im};
        }
        return f;
    }
    size_t pos() const { return pos_; }

private:
    const std::string& buf_;
    size_t pos_ = 0;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// column name/value pairs for one record, in the documented order
std::vector<std::pair<std::string, double>> record_columns(const DiagnosticRecord& r) {
    std::vector<std::pair<std::string, double>> cols;
    cols.emplace_back("t", r.t);
    cols.emplace_back("l2_sq", r.l2_sq);
    for (const auto& [s, v] : r.hs_norms) {
        std::ostringstream name;
        name << "h" << s;
        cols.emplace_back(name.str(), v);
    }
    cols.emplace_back("energy_residual", r.energy_residual);
    for (const auto& [N, v] : r.tail) cols.emplace_back("tail_N" + std::to_string(N), v);
    for (const auto& [id, z] : r.pairings) {
        cols.emplace_back("pairing_" + id + "_re", z.real());
        cols.emplace_back("pairing_" + id + "_im", z.imag());
    }
    return cols;
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    std::string buf(kMagic, sizeof(kMagic));
    put_u64(buf, c.config_hash);
    put_i64(buf, c.step);

    if (std::holds_alternative<SpectralField>(c.state)) {
        put_u64(buf, 0);
        put_field(buf, std::get<SpectralField>(c.state));
    } else if (std::holds_alternative<ModifiedState>(c.state)) {
        put_u64(buf, 1);
        const ModifiedState& s = std::get<ModifiedState>(c.state);
        put_field(buf, s.v);
        put_f64(buf, s.a);
    } else {
        put_u64(buf, 2);
        const DecompState& s = std::get<DecompState>(c.state);
        put_i64(buf, s.cutoff);
        put_field(buf, s.v);
        put_field(buf, s.w);
        put_field(buf, c.aux_z);
    }
    put_u64(buf, fnv1a(buf.data(), buf.size()));
    atomic_write(path, buf);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    if (buf.size() < sizeof(kMagic) + 8 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw CheckpointError("not a checkpoint file (bad magic)");

    const size_t body = buf.size() - 8;
    std::uint64_t want = 0;
    for (int i = 0; i < 8; ++i)
        want |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[body + i])) << (8 * i);
    if (fnv1a(buf.data(), body) != want)
        throw CheckpointError("checkpoint checksum mismatch (truncated or corrupt)");

    const std::string payload = buf.substr(sizeof(kMagic), body - sizeof(kMagic));
    Reader r(payload);
    Checkpoint c;
    c.config_hash = r.u64();
    c.step = r.i64();
    const std::uint64_t kind = r.u64();
    if (kind == 0) {
        c.state = r.field();
    } else if (kind == 1) {
        ModifiedState s;
        s.v = r.field();
        s.a = r.f64();
        c.state = std::move(s);
    } else if (kind == 2) {
        DecompState s;
        s.cutoff = static_cast<int>(r.i64());
        s.v = r.field();
        s.w = r.field();
        c.state = std::move(s);
        c.aux_z = r.field();
    } else {
        throw CheckpointError("checkpoint version/kind not supported");
    }
    return c;
}

void export_csv(const Trajectory& traj, const std::filesystem::path& path) {
    if (traj.samples() == 0) throw std::invalid_argument("empty trajectory");
    std::string out;
    const auto head = record_columns(traj.diagnostics.front());
    for (size_t i = 0; i < head.size(); ++i) {
        if (i) out += ',';
        out += head[i].first;
    }
    out += '\n';
    for (const DiagnosticRecord& r : traj.diagnostics) {
        const auto cols = record_columns(r);
        for (size_t i = 0; i < cols.size(); ++i) {
            if (i) out += ',';
            out += fmt17(cols[i].second);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

void export_json(const Trajectory& traj, const std::filesystem::path& path) {
    if (traj.samples() == 0) throw std::invalid_argument("empty trajectory");
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const DiagnosticRecord& r : traj.diagnostics) {
        nlohmann::ordered_json row;
        for (const auto& [name, value] : record_columns(r)) row[name] = value;
        rows.push_back(std::move(row));
    }
    atomic_write(path, rows.dump(2) + "\n");
}

void export_timeseries(const Trajectory& traj, const std::string& format,
                       const std::filesystem::path& path) {
    if (format == "csv")
        export_csv(traj, path);
    else if (format == "json")
        export_json(traj, path);
    else
        throw std::invalid_argument("format must be csv or json");
}

}  // namespace dnls
