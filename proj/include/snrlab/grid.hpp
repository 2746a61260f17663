#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace snrlab {

struct GridShape {
    int channels = 1;
    int height = 8;
    int width = 8;

    int size() const { return channels * height * width; }
    bool operator==(const GridShape&) const = default;
};

// Dense C x H x W field of doubles, row-major. Sample grids use even H and W
// so one level of the 2x2 wavelet split applies; subbands are half-size.
class Grid {
  public:
    Grid() = default;
    explicit Grid(GridShape shape);
    Grid(GridShape shape, double fill);

    const GridShape& shape() const { return shape_; }
    int size() const { return static_cast<int>(values_.size()); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

    double& at(int c, int h, int w) {
        return values_[static_cast<std::size_t>((c * shape_.height + h) * shape_.width + w)];
    }
    double at(int c, int h, int w) const {
        return values_[static_cast<std::size_t>((c * shape_.height + h) * shape_.width + w)];
    }

    bool all_finite() const;

    // mean of squared entries, i.e. ||x||^2 / dim
    double mean_sq() const;

  private:
    GridShape shape_{0, 0, 0};
    std::vector<double> values_;
};

// a*x + b*y elementwise; shapes must match.
Grid axpy(double a, const Grid& x, double b, const Grid& y);

// y += a*x, in place (hot path helper; same contract as axpy otherwise).
void axpy_into(Grid& y, double a, const Grid& x);

struct MomentStats {
    double mean_sq_norm = 0.0;  // E ||x||^2 / dim
    double mean_sq_norm_se = 0.0;
    Grid mean;
    long long count = 0;
};

// Streaming moments with compensated sums. Partial accumulators merge
// associatively, so chain-parallel reductions reproduce the serial result.
class MomentAccumulator {
  public:
    MomentAccumulator() = default;
    explicit MomentAccumulator(GridShape shape);

    void add(const Grid& sample);
    void merge(const MomentAccumulator& other);
    MomentStats finalize() const;
    long long count() const { return count_; }

  private:
    GridShape shape_{0, 0, 0};
    std::vector<double> sum_;
    std::vector<double> sum_c_;  // compensation terms
    double msq_sum_ = 0.0, msq_c_ = 0.0;
    double msq_sq_sum_ = 0.0, msq_sq_c_ = 0.0;
    long long count_ = 0;
};

// Flat CSV: "c,h,w" header line, then one value per line.
void write_grid_csv(const std::filesystem::path& path, const Grid& g);
Grid read_grid_csv(const std::filesystem::path& path);

}  // namespace snrlab
