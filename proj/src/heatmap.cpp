#include "bvae/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

namespace bvae {

void render_heatmap(const Matrix& x, const std::string& path) {
    if (x.rows() == 0 || x.cols() == 0)
        throw std::invalid_argument("render_heatmap: empty matrix");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x.data()[i] >= 0.0))
            throw std::invalid_argument("render_heatmap: negative or NaN entry");

    std::vector<double> nonzero;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x.data()[i] > 0.0) nonzero.push_back(x.data()[i]);
    double q99 = 1.0;
    if (!nonzero.empty()) {
        std::sort(nonzero.begin(), nonzero.end());
        q99 = nonzero[static_cast<std::size_t>(0.99 * static_cast<double>(nonzero.size() - 1))];
        if (q99 <= 0.0) q99 = 1.0;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << x.cols() << " " << x.rows() << "\n255\n";
    std::vector<unsigned char> line(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double intensity = std::min(1.0, row[j] / q99);
            line[j] = static_cast<unsigned char>(std::lround(255.0 * intensity));
        }
        out.write(reinterpret_cast<const char*>(line.data()),
                  static_cast<std::streamsize>(line.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bvae
