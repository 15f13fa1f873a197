#pragma once

#include "morphogen/error.hpp"
#include "morphogen/geometry.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace morphogen {

// 1-based lattice coordinates: 1 <= i, j <= N. Cell (i, j) has its centroid at
// (i - 0.5, j - 0.5) in cell-side units, so the world spans [0, N]^2.
struct Cell {
    int i = 1;
    int j = 1;

    friend bool operator==(const Cell&, const Cell&) = default;
};

inline Point centroid(Cell c) noexcept
{
    return {c.i - 0.5, c.j - 0.5};
}

class Lattice {
public:
    explicit Lattice(int size) : size_(size)
    {
        if (size < 1) throw InputError("lattice size must be >= 1");
        occupancy_.assign(cell_count(), 0);
    }

    int size() const noexcept { return size_; }
    std::size_t cell_count() const noexcept
    {
        return static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_);
    }

    bool contains(Cell c) const noexcept
    {
        return c.i >= 1 && c.i <= size_ && c.j >= 1 && c.j <= size_;
    }

    // Row-major in j: index = (j - 1) * N + (i - 1).
    std::size_t index(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.j - 1) * static_cast<std::size_t>(size_) +
               static_cast<std::size_t>(c.i - 1);
    }

    std::size_t checked_index(Cell c) const
    {
        if (!contains(c)) {
            throw InputError("cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                             ") outside lattice of size " + std::to_string(size_));
        }
        return index(c);
    }

    Cell cell_at(std::size_t idx) const noexcept
    {
        const auto n = static_cast<std::size_t>(size_);
        return {static_cast<int>(idx % n) + 1, static_cast<int>(idx / n) + 1};
    }

    bool built(Cell c) const { return occupancy_[checked_index(c)] != 0; }
    bool built(std::size_t idx) const noexcept { return occupancy_[idx] != 0; }

    // Returns false if the cell was already built.
    bool build(Cell c) { return build(checked_index(c)); }
    bool build(std::size_t idx) noexcept
    {
        if (occupancy_[idx]) return false;
        occupancy_[idx] = 1;
        ++built_count_;
        return true;
    }

    int built_count() const noexcept { return built_count_; }
    const std::vector<std::uint8_t>& occupancy() const noexcept { return occupancy_; }

    friend bool operator==(const Lattice& a, const Lattice& b)
    {
        return a.size_ == b.size_ && a.occupancy_ == b.occupancy_;
    }

private:
    int size_;
    int built_count_ = 0;
    std::vector<std::uint8_t> occupancy_;
};

// Integer offsets (di, dj) whose centroid distance is <= radius, center included.
struct DiskStencil {
    double radius = 0.0;
    std::vector<std::array<int, 2>> offsets;

    explicit DiskStencil(double r) : radius(r)
    {
        if (!(r > 0.0)) throw InputError("neighborhood radius must be > 0");
        const int reach = static_cast<int>(std::floor(r));
        const double r2 = r * r;
        for (int dj = -reach; dj <= reach; ++dj) {
            for (int di = -reach; di <= reach; ++di) {
                if (static_cast<double>(di * di + dj * dj) <= r2) offsets.push_back({di, dj});
            }
        }
    }

    template <typename Fn>
    void for_each_clipped(int n, Cell c, Fn&& fn) const
    {
        for (const auto& o : offsets) {
            const Cell q{c.i + o[0], c.j + o[1]};
            if (q.i >= 1 && q.i <= n && q.j >= 1 && q.j <= n) fn(q);
        }
    }
};

// Fraction of built cells among lattice cells within centroid distance rho of `cell`
// (the cell itself included, disk clipped at the lattice border).
inline double local_density(const Lattice& lattice, Cell cell, double rho)
{
    lattice.checked_index(cell);
    const DiskStencil disk(rho);
    int inside = 0;
    int built = 0;
    disk.for_each_clipped(lattice.size(), cell, [&](Cell q) {
        ++inside;
        built += lattice.built(lattice.index(q)) ? 1 : 0;
    });
    return static_cast<double>(built) / static_cast<double>(inside);
}

// Incrementally maintained d1 field: built-neighbor counts updated per placement.
// Gives exactly the same values as local_density.
class DensityField {
public:
    DensityField(const Lattice& lattice, double rho) : n_(lattice.size()), disk_(rho)
    {
        disk_size_.assign(lattice.cell_count(), 0);
        built_near_.assign(lattice.cell_count(), 0);
        for (std::size_t idx = 0; idx < lattice.cell_count(); ++idx) {
            const Cell c = lattice.cell_at(idx);
            disk_.for_each_clipped(n_, c, [&](Cell) { ++disk_size_[idx]; });
            if (lattice.built(idx)) add(c);
        }
    }

    double radius() const noexcept { return disk_.radius; }

    // Disks are symmetric, so a new built cell raises the count of every cell in its own disk.
    void add(Cell c)
    {
        disk_.for_each_clipped(n_, c, [&](Cell q) { ++built_near_[flat(q)]; });
    }

    double value(std::size_t idx) const noexcept
    {
        return static_cast<double>(built_near_[idx]) / static_cast<double>(disk_size_[idx]);
    }

    void fill(std::vector<double>& out) const
    {
        out.resize(disk_size_.size());
        for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = value(idx);
    }

private:
    std::size_t flat(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.j - 1) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(c.i - 1);
    }

    int n_;
    DiskStencil disk_;
    std::vector<int> disk_size_;
    std::vector<int> built_near_;
};

// Per-cell explicative variables, indexed like Lattice::index.
struct ExplicativeFields {
    std::vector<double> d1; // local density
    std::vector<double> d2; // distance to nearest road
    std::vector<double> d3; // network distance to nearest center (any activity)
    std::vector<double> d4; // activity accessibility; empty if some activity has no center
    std::vector<std::vector<double>> d3_by_activity; // [a - 1][cell]
    std::vector<std::size_t> d3_center;               // node realizing d3

    const std::vector<double>& term(int k) const
    {
        switch (k) {
        case 0: return d1;
        case 1: return d2;
        case 2: return d3;
        case 3: return d4;
        default: throw InputError("explicative variable index out of range");
        }
    }
};

struct WeightVector {
    std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0};

    double sum() const noexcept { return alpha[0] + alpha[1] + alpha[2] + alpha[3]; }

    void validate() const
    {
        for (double a : alpha) {
            if (!(a >= 0.0 && a <= 1.0)) throw InputError("weights must lie in [0,1]");
        }
        if (!(sum() > 0.0)) throw InputError("at least one weight must be > 0");
    }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

struct LandValueField {
    std::vector<double> v;
};

// Weighted, min-max normalized complement of the explicative variables, with
// bounds taken over all lattice cells. A spatially constant term contributes 1.
// Weightless terms are skipped, so their fields may be left empty.
inline LandValueField land_value_field(const Lattice& lattice, const ExplicativeFields& fields,
                                       const WeightVector& weights)
{
    if (!(weights.sum() > 0.0)) throw InputError("land value needs at least one weight > 0");
    const std::size_t cells = lattice.cell_count();
    LandValueField out;
    out.v.assign(cells, 0.0);
    const double norm = weights.sum();
    for (int k = 0; k < 4; ++k) {
        const double w = weights.alpha[static_cast<std::size_t>(k)];
        if (w == 0.0) continue;
        const auto& d = fields.term(k);
        if (d.size() != cells) {
            throw InputError("explicative variable d" + std::to_string(k + 1) + " is not available");
        }
        double lo = d[0];
        double hi = d[0];
        for (double x : d) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double span = hi - lo;
        for (std::size_t idx = 0; idx < cells; ++idx) {
            const double term = span > 0.0 ? (hi - d[idx]) / span : 1.0;
            out.v[idx] += w * term;
        }
    }
    for (double& x : out.v) x /= norm;
    return out;
}

inline std::vector<Cell> eligible_cells(const Lattice& lattice)
{
    std::vector<Cell> out;
    out.reserve(lattice.cell_count() - static_cast<std::size_t>(lattice.built_count()));
    for (std::size_t idx = 0; idx < lattice.cell_count(); ++idx) {
        if (!lattice.built(idx)) out.push_back(lattice.cell_at(idx));
    }
    return out;
}

} // namespace morphogen
