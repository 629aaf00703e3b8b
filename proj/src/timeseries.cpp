#include "chaoscast/timeseries.hpp"

#include <cstring>
#include <fstream>

namespace chaoscast {

namespace {

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error(std::string("dataset file truncated reading ") + what);
    return v;
}

}  // namespace

void TimeSeriesDataset::compute_train_stats() {
    require(split > 0, "dataset: empty training split");
    auto tr = train();
    mean = tr.rowwise().mean();
    Vec var = (tr.colwise() - mean).array().square().rowwise().mean();
    stddev = var.array().sqrt();
    for (Index i = 0; i < stddev.size(); ++i) {
        if (!(stddev[i] > 0.0))
            throw std::runtime_error("dataset: component " + std::to_string(i) +
                                     " has zero variance on the training split");
    }
}

double TimeSeriesDataset::train_abs_max() const {
    return train().array().abs().maxCoeff();
}

void save_dataset(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write("CHF1", 4);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dim()));
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ds.n_samples()));
    write_pod<double>(out, ds.dt);
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(ds.split));
    // column-major d_o x N == row-major N x d_o with one sample per row
    out.write(reinterpret_cast<const char*>(ds.values.data()),
              static_cast<std::streamsize>(sizeof(double) * ds.values.size()));
    out.write(reinterpret_cast<const char*>(ds.mean.data()),
              static_cast<std::streamsize>(sizeof(double) * ds.mean.size()));
    out.write(reinterpret_cast<const char*>(ds.stddev.data()),
              static_cast<std::streamsize>(sizeof(double) * ds.stddev.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

TimeSeriesDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CHF1", 4) != 0)
        throw std::runtime_error("not a dataset container (bad magic): " + path.string());
    auto d = read_pod<std::uint32_t>(in, "dimension");
    auto n = read_pod<std::uint64_t>(in, "sample count");
    TimeSeriesDataset ds;
    ds.dt = read_pod<double>(in, "dt");
    auto split = read_pod<std::uint64_t>(in, "split");
    if (split > n) throw std::runtime_error("dataset: split index exceeds sample count");
    ds.split = static_cast<Index>(split);
    ds.values.resize(d, static_cast<Index>(n));
    in.read(reinterpret_cast<char*>(ds.values.data()),
            static_cast<std::streamsize>(sizeof(double) * ds.values.size()));
    ds.mean.resize(d);
    in.read(reinterpret_cast<char*>(ds.mean.data()), sizeof(double) * d);
    ds.stddev.resize(d);
    in.read(reinterpret_cast<char*>(ds.stddev.data()), sizeof(double) * d);
    if (!in) throw std::runtime_error("dataset file truncated: " + path.string());
    return ds;
}

}  // namespace chaoscast
