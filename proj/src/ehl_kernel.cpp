#include "qif/ehl.hpp"
#include "qif/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace qif {

std::string to_string(ContactType c) { return c == ContactType::Line ? "line" : "point"; }

DeformationKernel::DeformationKernel(ContactType type, std::size_t nx, std::size_t ny, double h, std::vector<double> g)
    : type_(type), nx_(nx), ny_(ny), h_(h), g_(std::move(g)) {
    if (g_.size() != (nx_ + 1) * (ny_ + 1)) throw ContractViolation("DeformationKernel: coefficient count mismatch");
}

namespace {

double xlog(double x) { return x * (std::log(std::abs(x)) - 1.0); }

double fpoint(double x, double y) { return std::abs(x) * std::asinh(y / x) + std::abs(y) * std::asinh(x / y); }

} // namespace

double line_kernel_value(long dx, double h) {
    const double xp = (static_cast<double>(dx) + 0.5) * h, xm = (static_cast<double>(dx) - 0.5) * h;
    return xlog(xp) - xlog(xm);
}

double point_kernel_value(long dx, long dy, double h) {
    const double xp = (static_cast<double>(dx) + 0.5) * h, xm = (static_cast<double>(dx) - 0.5) * h;
    const double yp = (static_cast<double>(dy) + 0.5) * h, ym = (static_cast<double>(dy) - 0.5) * h;
    const double s = fpoint(xp, yp) - fpoint(xm, yp) - fpoint(xp, ym) + fpoint(xm, ym);
    return 2.0 / (std::numbers::pi * std::numbers::pi) * s;
}

DeformationKernel kernel_line(std::size_t nx, double h) {
    if (!(h > 0.0)) throw ContractViolation("kernel_line: h must be positive");
    std::vector<double> g(nx + 1);
    for (std::size_t d = 0; d <= nx; ++d) g[d] = line_kernel_value(static_cast<long>(d), h);
    return {ContactType::Line, nx, 0, h, std::move(g)};
}

DeformationKernel kernel_point(std::size_t nx, std::size_t ny, double h) {
    if (!(h > 0.0)) throw ContractViolation("kernel_point: h must be positive");
    std::vector<double> g((nx + 1) * (ny + 1));
    for (std::size_t b = 0; b <= ny; ++b)
        for (std::size_t a = 0; a <= nx; ++a)
            g[a + b * (nx + 1)] = point_kernel_value(static_cast<long>(a), static_cast<long>(b), h);
    return {ContactType::Point, nx, ny, h, std::move(g)};
}

namespace {

constexpr char kMagic[8] = {'Q', 'I', 'F', 'K', 'E', 'R', 'N', '\0'};
constexpr std::uint32_t kVersion = 1;

struct CacheHeader {
    char magic[8];
    std::uint32_t version;
    std::uint32_t contact;
    double h;
    std::uint64_t nx;
    std::uint64_t ny;
};

} // namespace

void save_kernel(const DeformationKernel& k, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write kernel cache '" + path + "'");
    CacheHeader hd{};
    std::memcpy(hd.magic, kMagic, sizeof kMagic);
    hd.version = kVersion;
    hd.contact = k.type() == ContactType::Line ? 0 : 1;
    hd.h = k.h();
    hd.nx = k.nx();
    hd.ny = k.ny();
    out.write(reinterpret_cast<const char*>(&hd), sizeof hd);
    out.write(reinterpret_cast<const char*>(k.coefficients().data()),
              static_cast<std::streamsize>(k.coefficients().size() * sizeof(double)));
    if (!out) throw ConfigError("failed writing kernel cache '" + path + "'");
}

DeformationKernel load_kernel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open kernel cache '" + path + "'");
    CacheHeader hd{};
    in.read(reinterpret_cast<char*>(&hd), sizeof hd);
    if (!in || std::memcmp(hd.magic, kMagic, sizeof kMagic) != 0) throw ConfigError("'" + path + "' is not a kernel cache");
    if (hd.version != kVersion) throw ConfigError("kernel cache '" + path + "' has unsupported version");
    std::vector<double> g((hd.nx + 1) * (hd.ny + 1));
    in.read(reinterpret_cast<char*>(g.data()), static_cast<std::streamsize>(g.size() * sizeof(double)));
    if (!in) throw ConfigError("kernel cache '" + path + "' is truncated");
    return {hd.contact == 0 ? ContactType::Line : ContactType::Point, hd.nx, hd.ny, hd.h, std::move(g)};
}

DeformationKernel cached_kernel(const std::string& path, ContactType type, std::size_t n, double h) {
    try {
        DeformationKernel k = load_kernel(path);
        const std::size_t ny = type == ContactType::Line ? 0 : n;
        if (k.type() == type && k.nx() == n && k.ny() == ny && k.h() == h) return k;
    } catch (const ConfigError&) {
    }
    DeformationKernel k = type == ContactType::Line ? kernel_line(n, h) : kernel_point(n, n, h);
    save_kernel(k, path);
    return k;
}

// ---------------------------------------------------------------- film

struct FilmThickness::Fft {
    std::size_t m = 0; // padded size per direction
    std::size_t mc = 0; // complex columns m/2+1
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    std::vector<std::complex<double>> kernel_spec;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Fft(std::size_t mm) : m(mm), mc(mm / 2 + 1) {
        real = fftw_alloc_real(m * m);
        spec = fftw_alloc_complex(m * mc);
        const int im = static_cast<int>(m);
        forward = fftw_plan_dft_r2c_2d(im, im, real, spec, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(im, im, spec, real, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
};

FilmThickness::FilmThickness(const EhlGrid& g, DeformationKernel k)
    : grid_(g), kernel_(std::move(k)), sign_(g.type == ContactType::Line ? -1.0 / std::numbers::pi : 1.0) {
    if (kernel_.type() != g.type || kernel_.nx() < g.n || (g.type == ContactType::Point && kernel_.ny() < g.n))
        throw ContractViolation("FilmThickness: kernel does not cover the grid");
    if (std::abs(kernel_.h() - g.h()) > 1e-12 * g.h()) throw ContractViolation("FilmThickness: kernel spacing mismatch");
    if (g.type == ContactType::Line) return;
    const std::size_t n1 = g.n + 1, m = 2 * n1;
    fft_ = std::make_unique<Fft>(m);
    // Wrapped kernel so that circular convolution of zero-padded data is linear.
    for (std::size_t b = 0; b < m; ++b)
        for (std::size_t a = 0; a < m; ++a) {
            const long da = a < n1 ? static_cast<long>(a) : static_cast<long>(a) - static_cast<long>(m);
            const long db = b < n1 ? static_cast<long>(b) : static_cast<long>(b) - static_cast<long>(m);
            const bool inside = std::abs(da) <= static_cast<long>(g.n) && std::abs(db) <= static_cast<long>(g.n);
            fft_->real[b * m + a] = inside ? kernel_(da, db) : 0.0;
        }
    fftw_execute(fft_->forward);
    fft_->kernel_spec.resize(m * fft_->mc);
    for (std::size_t q = 0; q < m * fft_->mc; ++q) fft_->kernel_spec[q] = {fft_->spec[q][0], fft_->spec[q][1]};
}

FilmThickness::~FilmThickness() = default;

RealVector FilmThickness::deformation_direct(const RealVector& u) const {
    const EhlGrid& g = grid_;
    if (u.size() != g.node_count()) throw ContractViolation("deformation: field size mismatch");
    RealVector d(g.node_count(), 0.0);
    const std::size_t rows = g.rows(), n1 = g.n + 1;
    for (std::size_t j = 0; j < rows; ++j)
        for (std::size_t i = 0; i < n1; ++i) {
            double s = 0.0;
            for (std::size_t jj = 0; jj < rows; ++jj)
                for (std::size_t ii = 0; ii < n1; ++ii) {
                    const double v = u[g.index(ii, jj)];
                    if (v != 0.0)
                        s += v * kernel_(static_cast<long>(i) - static_cast<long>(ii),
                                         static_cast<long>(j) - static_cast<long>(jj));
                }
            d[g.index(i, j)] = sign_ * s;
        }
    return d;
}

RealVector FilmThickness::deformation(const RealVector& u) const {
    if (!fft_) return deformation_direct(u);
    const EhlGrid& g = grid_;
    if (u.size() != g.node_count()) throw ContractViolation("deformation: field size mismatch");
    const std::size_t n1 = g.n + 1, m = fft_->m;
    std::fill(fft_->real, fft_->real + m * m, 0.0);
    for (std::size_t j = 0; j < n1; ++j)
        for (std::size_t i = 0; i < n1; ++i) fft_->real[j * m + i] = u[g.index(i, j)];
    fftw_execute(fft_->forward);
    for (std::size_t q = 0; q < m * fft_->mc; ++q) {
        const std::complex<double> z = std::complex<double>(fft_->spec[q][0], fft_->spec[q][1]) * fft_->kernel_spec[q];
        fft_->spec[q][0] = z.real();
        fft_->spec[q][1] = z.imag();
    }
    fftw_execute(fft_->backward);
    const double scale = sign_ / static_cast<double>(m * m);
    RealVector d(g.node_count());
    for (std::size_t j = 0; j < n1; ++j)
        for (std::size_t i = 0; i < n1; ++i) d[g.index(i, j)] = scale * fft_->real[j * m + i];
    return d;
}

RealVector FilmThickness::film(const RealVector& u, double h0) const {
    RealVector f = deformation(u);
    for (std::size_t j = 0; j < grid_.rows(); ++j)
        for (std::size_t i = 0; i <= grid_.n; ++i) {
            const double x = grid_.x(i), y = grid_.y(j);
            f[grid_.index(i, j)] += h0 + 0.5 * (x * x + y * y);
        }
    return f;
}

} // namespace qif
