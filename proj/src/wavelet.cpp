#include "snrlab/wavelet.hpp"

#include <stdexcept>

namespace snrlab {

SubbandSet dwt_haar(const Grid& x) {
    const GridShape in = x.shape();
    if (in.height % 2 != 0 || in.width % 2 != 0 || in.height < 2 || in.width < 2) {
        throw std::invalid_argument("dwt_haar: height and width must be even");
    }
    const GridShape half{in.channels, in.height / 2, in.width / 2};
    SubbandSet s{Grid(half), Grid(half), Grid(half), Grid(half)};
    for (int c = 0; c < in.channels; ++c) {
        for (int i = 0; i < half.height; ++i) {
            for (int j = 0; j < half.width; ++j) {
                const double a = x.at(c, 2 * i, 2 * j);
                const double b = x.at(c, 2 * i, 2 * j + 1);
                const double d = x.at(c, 2 * i + 1, 2 * j);
                const double e = x.at(c, 2 * i + 1, 2 * j + 1);
                s.ll.at(c, i, j) = (a + b + d + e) / 2.0;
                s.lh.at(c, i, j) = (a + b - d - e) / 2.0;
                s.hl.at(c, i, j) = (a - b + d - e) / 2.0;
                s.hh.at(c, i, j) = (a - b - d + e) / 2.0;
            }
        }
    }
    return s;
}

Grid idwt_haar(const SubbandSet& s) {
    const GridShape half = s.ll.shape();
    if (!(s.lh.shape() == half) || !(s.hl.shape() == half) || !(s.hh.shape() == half)) {
        throw std::invalid_argument("idwt_haar: subband shape mismatch");
    }
    Grid x(GridShape{half.channels, half.height * 2, half.width * 2});
    for (int c = 0; c < half.channels; ++c) {
        for (int i = 0; i < half.height; ++i) {
            for (int j = 0; j < half.width; ++j) {
                const double ll = s.ll.at(c, i, j);
                const double lh = s.lh.at(c, i, j);
                const double hl = s.hl.at(c, i, j);
                const double hh = s.hh.at(c, i, j);
                x.at(c, 2 * i, 2 * j) = (ll + lh + hl + hh) / 2.0;
                x.at(c, 2 * i, 2 * j + 1) = (ll + lh - hl - hh) / 2.0;
                x.at(c, 2 * i + 1, 2 * j) = (ll - lh + hl - hh) / 2.0;
                x.at(c, 2 * i + 1, 2 * j + 1) = (ll - lh - hl + hh) / 2.0;
            }
        }
    }
    return x;
}

}  // namespace snrlab
