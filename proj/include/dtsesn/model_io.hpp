#pragma once

// Trained model serialization. Single binary file, little-endian, with a
// magic tag and format version; matrices are stored column-major as raw
// doubles so a round trip is bit-exact.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "dtsesn/errors.hpp"
#include "dtsesn/reservoir.hpp"

namespace dtsesn {

inline constexpr char kModelMagic[8] = {'D', 'T', 'S', 'E', 'S', 'N', 'M', '\0'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

namespace detail {

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("model file truncated");
    return v;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    write_pod<std::int64_t>(out, m.rows());
    write_pod<std::int64_t>(out, m.cols());
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

inline Matrix read_matrix(std::istream& in) {
    const auto rows = read_pod<std::int64_t>(in);
    const auto cols = read_pod<std::int64_t>(in);
    if (rows < 0 || cols < 0) throw Error("model file corrupt: negative matrix size");
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!in) throw Error("model file truncated");
    return m;
}

}  // namespace detail

inline void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(kModelMagic, sizeof(kModelMagic));
    detail::write_pod(out, kModelFormatVersion);

    const HyperParams& hp = model.hyper;
    detail::write_pod<std::int64_t>(out, hp.reservoir_size);
    detail::write_pod(out, hp.density);
    detail::write_pod(out, hp.rho);
    detail::write_pod(out, hp.gamma);
    detail::write_pod(out, hp.zeta);
    detail::write_pod(out, hp.beta);
    detail::write_pod(out, hp.alpha_min);
    detail::write_pod(out, hp.alpha_max);
    detail::write_pod(out, hp.dt);
    detail::write_pod<std::uint8_t>(out, hp.readout == ReadoutMode::state_only ? 1 : 0);
    detail::write_pod(out, hp.seed);

    detail::write_matrix(out, model.matrices.w);
    detail::write_matrix(out, model.matrices.w_in);
    detail::write_matrix(out, model.matrices.w_fb);
    detail::write_matrix(out, model.matrices.alphas);
    detail::write_matrix(out, model.w_out);
    if (!out) throw Error("write to '" + path + "' failed");
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw Error("'" + path + "' is not a model file");
    const auto version = detail::read_pod<std::uint32_t>(in);
    if (version != kModelFormatVersion)
        throw Error("unsupported model format version " + std::to_string(version));

    TrainedModel model;
    HyperParams& hp = model.hyper;
    hp.reservoir_size = static_cast<int>(detail::read_pod<std::int64_t>(in));
    hp.density = detail::read_pod<double>(in);
    hp.rho = detail::read_pod<double>(in);
    hp.gamma = detail::read_pod<double>(in);
    hp.zeta = detail::read_pod<double>(in);
    hp.beta = detail::read_pod<double>(in);
    hp.alpha_min = detail::read_pod<double>(in);
    hp.alpha_max = detail::read_pod<double>(in);
    hp.dt = detail::read_pod<double>(in);
    hp.readout = detail::read_pod<std::uint8_t>(in) ? ReadoutMode::state_only
                                                    : ReadoutMode::state_input_bias;
    hp.seed = detail::read_pod<std::uint64_t>(in);

    model.matrices.w = detail::read_matrix(in);
    model.matrices.w_in = detail::read_matrix(in);
    model.matrices.w_fb = detail::read_matrix(in);
    model.matrices.alphas = detail::read_matrix(in);
    model.w_out = detail::read_matrix(in);
    return model;
}

}  // namespace dtsesn
