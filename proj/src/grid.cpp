#include "pdsort/grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace pdsort {

namespace {

constexpr double kNodeSnap = 1e-9; // relative to one cell

// floor((x - lo) / spacing) with snap-up when x sits a hair below a node.
std::int64_t floor_index(double x, double lo, double spacing) {
    const double s = (x - lo) / spacing;
    double f = std::floor(s);
    if (s - f > 1.0 - kNodeSnap) f += 1.0;
    return static_cast<std::int64_t>(f);
}

void validate_axes(const GridSpec& spec) {
    if (spec.dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
    if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing))
        throw std::invalid_argument("grid spacing must be positive and finite");
    for (int a = 0; a < spec.dim; ++a) {
        if (!std::isfinite(spec.lo[a]))
            throw std::invalid_argument("grid corner must be finite");
        if (spec.shape[a] < 3)
            throw std::invalid_argument("grid needs at least 3 nodes per axis");
    }
}

} // namespace

GridSpec GridSpec::from_corners(std::vector<double> lo, std::vector<double> hi,
                                double spacing) {
    GridSpec spec;
    spec.dim = static_cast<int>(lo.size());
    if (hi.size() != lo.size()) throw std::invalid_argument("corner dimension mismatch");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("grid spacing must be positive and finite");
    spec.spacing = spacing;
    spec.lo = std::move(lo);
    spec.shape.resize(spec.lo.size());
    for (int a = 0; a < spec.dim; ++a) {
        if (!(spec.lo[a] < hi[a]))
            throw std::invalid_argument("grid corners must satisfy lo < hi componentwise");
        spec.shape[a] = floor_index(hi[a], spec.lo[a], spacing) + 1;
    }
    spec.hi.resize(spec.lo.size());
    for (int a = 0; a < spec.dim; ++a)
        spec.hi[a] = spec.lo[a] + spacing * static_cast<double>(spec.shape[a] - 1);
    validate_axes(spec);
    spec.strides.assign(spec.shape.size(), 1);
    for (int a = spec.dim - 2; a >= 0; --a)
        spec.strides[a] = spec.strides[a + 1] * spec.shape[a + 1];
    return spec;
}

GridSpec GridSpec::from_shape(std::vector<double> lo,
                              std::vector<std::int64_t> shape, double spacing) {
    GridSpec spec;
    spec.dim = static_cast<int>(lo.size());
    if (shape.size() != lo.size()) throw std::invalid_argument("shape dimension mismatch");
    spec.spacing = spacing;
    spec.lo = std::move(lo);
    spec.shape = std::move(shape);
    spec.hi.resize(spec.lo.size());
    for (int a = 0; a < spec.dim; ++a)
        spec.hi[a] = spec.lo[a] + spacing * static_cast<double>(spec.shape[a] - 1);
    validate_axes(spec);
    spec.strides.assign(spec.shape.size(), 1);
    for (int a = spec.dim - 2; a >= 0; --a)
        spec.strides[a] = spec.strides[a + 1] * spec.shape[a + 1];
    return spec;
}

std::int64_t GridSpec::node_count() const {
    std::int64_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

void GridSpec::node_point(std::span<const std::int64_t> idx, std::span<double> out) const {
    for (int a = 0; a < dim; ++a) out[a] = node_coord(a, idx[a]);
}

std::int64_t GridSpec::flatten(std::span<const std::int64_t> idx) const {
    std::int64_t flat = 0;
    for (int a = 0; a < dim; ++a) flat += idx[a] * strides[a];
    return flat;
}

void GridSpec::unflatten(std::int64_t flat, std::span<std::int64_t> idx) const {
    for (int a = 0; a < dim; ++a) {
        idx[a] = flat / strides[a];
        flat -= idx[a] * strides[a];
    }
}

bool GridSpec::same_layout(const GridSpec& other) const {
    return dim == other.dim && spacing == other.spacing && lo == other.lo &&
           shape == other.shape;
}

GridField::GridField(GridSpec s) : spec(std::move(s)) {
    values.assign(static_cast<std::size_t>(spec.node_count()), 0.0);
}

PointCloud::PointCloud(int d, std::vector<double> c) : dim(d), coords(std::move(c)) {
    if (dim < 1) throw std::invalid_argument("point dimension must be >= 1");
    if (coords.size() % static_cast<std::size_t>(dim) != 0)
        throw std::invalid_argument("coordinate buffer size is not a multiple of dim");
    for (double v : coords)
        if (!std::isfinite(v)) throw DomainError("point cloud contains non-finite coordinates");
}

void floor_to_grid(std::span<const double> x, const GridSpec& spec,
                   std::span<std::int64_t> out) {
    for (int a = 0; a < spec.dim; ++a) {
        std::int64_t j = floor_index(x[a], spec.lo[a], spec.spacing);
        if (j < 0) {
            std::ostringstream msg;
            msg << "point coordinate " << x[a] << " on axis " << a
                << " lies below the grid corner " << spec.lo[a];
            throw DomainError(msg.str());
        }
        if (j > spec.shape[a] - 1) j = spec.shape[a] - 1;
        out[a] = j;
    }
}

bool try_floor_to_grid(std::span<const double> x, const GridSpec& spec,
                       std::span<std::int64_t> out) {
    for (int a = 0; a < spec.dim; ++a) {
        std::int64_t j = floor_index(x[a], spec.lo[a], spec.spacing);
        if (j < 0) return false;
        if (j > spec.shape[a] - 1) j = spec.shape[a] - 1;
        out[a] = j;
    }
    return true;
}

std::vector<std::int64_t> floor_to_grid(std::span<const double> x, const GridSpec& spec) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(spec.dim));
    floor_to_grid(x, spec, idx);
    return idx;
}

std::vector<double> project(std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size()) throw std::invalid_argument("project: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::min(x[i], z[i]);
    return out;
}

bool pareto_leq(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pareto_leq: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > y[i]) return false;
    return true;
}

bool pareto_less(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pareto_less: dimension mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > y[i]) return false;
        if (x[i] < y[i]) strict = true;
    }
    return strict;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid container assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'D', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

void save_grid(const GridField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint64_t>(field.spec.dim));
    for (auto s : field.spec.shape) write_raw(out, static_cast<std::uint64_t>(s));
    write_raw(out, field.spec.spacing);
    for (double v : field.spec.lo) write_raw(out, v);
    for (double v : field.spec.hi) write_raw(out, v);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!out) throw DomainError("short write to " + path.string());
}

GridField load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DomainError(path.string() + " is not a PDGF grid container");
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kVersion)
        throw DomainError(path.string() + ": unsupported container version");
    const auto dim = static_cast<int>(read_raw<std::uint64_t>(in));
    if (dim < 1 || dim > 64) throw DomainError(path.string() + ": bad dimension");
    std::vector<std::int64_t> shape(static_cast<std::size_t>(dim));
    for (auto& s : shape) s = static_cast<std::int64_t>(read_raw<std::uint64_t>(in));
    const double spacing = read_raw<double>(in);
    std::vector<double> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
    for (auto& v : lo) v = read_raw<double>(in);
    for (auto& v : hi) v = read_raw<double>(in);
    if (!in) throw DomainError(path.string() + ": truncated header");

    GridField field(GridSpec::from_shape(std::move(lo), std::move(shape), spacing));
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!in) throw DomainError(path.string() + ": truncated values");
    for (double v : field.values)
        if (!std::isfinite(v)) throw DomainError(path.string() + ": non-finite values");
    return field;
}

void export_grid_csv(const GridField& field, std::ostream& out) {
    const auto& spec = field.spec;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(spec.dim), 0);
    char buf[64];
    for (std::int64_t flat = 0; flat < spec.node_count(); ++flat) {
        for (int a = 0; a < spec.dim; ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", spec.node_coord(a, idx[a]));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", field.values[static_cast<std::size_t>(flat)]);
        out << buf << '\n';
        for (int a = spec.dim - 1; a >= 0; --a) {
            if (++idx[a] < spec.shape[a]) break;
            idx[a] = 0;
        }
    }
}

PointCloud read_points_csv(std::istream& in) {
    std::vector<double> coords;
    int dim = 0;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        int d = 0;
        while (std::getline(row, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw DomainError("bad number '" + cell + "' at line " + std::to_string(lineno));
            }
            coords.push_back(v);
            ++d;
        }
        if (dim == 0) dim = d;
        if (d != dim)
            throw DomainError("inconsistent dimension at line " + std::to_string(lineno));
    }
    if (dim == 0) throw DomainError("empty point file");
    return PointCloud(dim, std::move(coords));
}

PointCloud read_points_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    try {
        return read_points_csv(in);
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

void write_points_csv(const PointCloud& cloud, std::ostream& out) {
    char buf[64];
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (int a = 0; a < cloud.dim; ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[a]);
            out << buf << (a + 1 < cloud.dim ? "," : "\n");
        }
    }
}

std::vector<double> read_ranks_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    std::vector<double> ranks;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            ranks.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw DomainError(path.string() + ": bad number at line " + std::to_string(lineno));
        }
    }
    if (ranks.empty()) throw DomainError(path.string() + ": empty rank file");
    return ranks;
}

void write_ranks_csv(std::span<const double> ranks, std::ostream& out, bool integral) {
    char buf[64];
    for (double r : ranks) {
        if (integral)
            std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(r)));
        else
            std::snprintf(buf, sizeof(buf), "%.17g", r);
        out << buf << '\n';
    }
}

void write_ranks_csv(std::span<const double> ranks, const std::filesystem::path& path,
                     bool integral) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    write_ranks_csv(ranks, out, integral);
}

} // namespace pdsort
