#include "snrlab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace snrlab {

namespace {

void check_shape(const GridShape& s) {
    if (s.channels < 1) {
        throw std::invalid_argument("grid: channels must be positive");
    }
    if (s.height < 1 || s.width < 1) {
        throw std::invalid_argument("grid: height and width must be positive");
    }
}

inline void kahan_add(double& sum, double& comp, double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

}  // namespace

Grid::Grid(GridShape shape) : shape_(shape) {
    check_shape(shape);
    values_.assign(static_cast<std::size_t>(shape.size()), 0.0);
}

Grid::Grid(GridShape shape, double fill) : Grid(shape) {
    values_.assign(values_.size(), fill);
}

bool Grid::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

double Grid::mean_sq() const {
    double sum = 0.0, comp = 0.0;
    for (double v : values_) {
        kahan_add(sum, comp, v * v);
    }
    return sum / static_cast<double>(values_.size());
}

Grid axpy(double a, const Grid& x, double b, const Grid& y) {
    if (!(x.shape() == y.shape())) {
        throw std::invalid_argument("axpy: shape mismatch");
    }
    Grid out(x.shape());
    const int n = x.size();
    for (int i = 0; i < n; ++i) {
        out[i] = a * x[i] + b * y[i];
    }
    return out;
}

void axpy_into(Grid& y, double a, const Grid& x) {
    if (!(x.shape() == y.shape())) {
        throw std::invalid_argument("axpy_into: shape mismatch");
    }
    const int n = x.size();
    for (int i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

MomentAccumulator::MomentAccumulator(GridShape shape) : shape_(shape) {
    check_shape(shape);
    sum_.assign(static_cast<std::size_t>(shape.size()), 0.0);
    sum_c_.assign(sum_.size(), 0.0);
}

void MomentAccumulator::add(const Grid& sample) {
    if (shape_.size() == 0) {
        *this = MomentAccumulator(sample.shape());
    }
    if (!(sample.shape() == shape_)) {
        throw std::invalid_argument("moments: shape mismatch");
    }
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        kahan_add(sum_[i], sum_c_[i], sample[static_cast<int>(i)]);
    }
    const double msq = sample.mean_sq();
    kahan_add(msq_sum_, msq_c_, msq);
    kahan_add(msq_sq_sum_, msq_sq_c_, msq * msq);
    ++count_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.count_ == 0) {
        return;
    }
    if (count_ == 0) {
        *this = other;
        return;
    }
    if (!(shape_ == other.shape_)) {
        throw std::invalid_argument("moments: shape mismatch in merge");
    }
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        kahan_add(sum_[i], sum_c_[i], other.sum_[i]);
    }
    kahan_add(msq_sum_, msq_c_, other.msq_sum_);
    kahan_add(msq_sq_sum_, msq_sq_c_, other.msq_sq_sum_);
    count_ += other.count_;
}

MomentStats MomentAccumulator::finalize() const {
    if (count_ == 0) {
        throw std::invalid_argument("moments: no samples accumulated");
    }
    MomentStats stats;
    stats.count = count_;
    stats.mean = Grid(shape_);
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        stats.mean[static_cast<int>(i)] = sum_[i] * inv;
    }
    stats.mean_sq_norm = msq_sum_ * inv;
    if (count_ > 1) {
        const double var =
            (msq_sq_sum_ - msq_sum_ * msq_sum_ * inv) / static_cast<double>(count_ - 1);
        stats.mean_sq_norm_se = std::sqrt(std::max(var, 0.0) * inv);
    }
    return stats;
}

void write_grid_csv(const std::filesystem::path& path, const Grid& g) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << g.shape().channels << "," << g.shape().height << "," << g.shape().width << "\n";
    char buf[40];
    for (double v : g.values()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << "\n";
    }
}

Grid read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open grid csv: " + path.string());
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty grid csv: " + path.string());
    }
    GridShape shape;
    char comma = 0;
    std::istringstream hs(header);
    if (!(hs >> shape.channels >> comma >> shape.height >> comma >> shape.width)) {
        throw std::runtime_error("bad grid csv header: " + path.string());
    }
    Grid g(shape);
    for (int i = 0; i < g.size(); ++i) {
        std::string line;
        if (!std::getline(in, line)) {
            throw std::runtime_error("grid csv truncated: " + path.string());
        }
        g[i] = std::stod(line);
    }
    return g;
}

}  // namespace snrlab
