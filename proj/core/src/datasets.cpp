#include "levcode/datasets.hpp"

#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>

#include "levcode/csvio.hpp"
#include "levcode/rng.hpp"

namespace levcode {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const std::string& what) {
    if (offset + 4 > buf.size()) throw FormatError("truncated file while reading " + what, offset);
    return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
           (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                           static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(bytes, 4);
}

}  // namespace

SynthRegression synth_regression(std::uint64_t seed) {
    constexpr std::size_t kBlocks = 20;
    constexpr std::size_t kBlockRows = 50;
    constexpr std::size_t kCols = 20;
    constexpr std::size_t kRows = kBlocks * kBlockRows;

    SplitMix64 rng(seed);
    Mat stacked(kRows, kCols);
    for (std::size_t b = 0; b < kBlocks; ++b) {
        const std::int64_t bound = 15 * static_cast<std::int64_t>(b + 1);
        for (std::size_t i = 0; i < kBlockRows; ++i)
            for (std::size_t j = 0; j < kCols; ++j)
                stacked(b * kBlockRows + i, j) =
                    static_cast<double>(rng.next_int(-bound, bound));
    }

    std::vector<std::size_t> perm(kRows);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    SynthRegression out;
    out.data.X = Mat(kRows, kCols);
    out.block_of_row.resize(kRows);
    for (std::size_t i = 0; i < kRows; ++i) {
        std::copy(stacked.row(perm[i]).begin(), stacked.row(perm[i]).end(),
                  out.data.X.row(i).begin());
        out.block_of_row[i] = perm[i] / kBlockRows;
    }

    out.theta_true.resize(kCols);
    for (double& v : out.theta_true) v = rng.next_uniform(-1.0, 1.0);
    out.noise.resize(kRows);
    for (double& v : out.noise) v = rng.next_gaussian();

    out.data.y = matvec(out.data.X, out.theta_true);
    for (std::size_t i = 0; i < kRows; ++i) out.data.y[i] += out.noise[i];
    out.data.meta = "synthetic-regression seed=" + std::to_string(seed);
    return out;
}

Dataset load_mnist(const std::string& images_path, const std::string& labels_path,
                   std::pair<int, int> classes, std::size_t limit) {
    if (limit == 0) throw InvalidInputError("load_mnist: limit = 0 would make an empty dataset");

    const std::vector<std::uint8_t> img = read_file(images_path);
    const std::vector<std::uint8_t> lab = read_file(labels_path);

    if (read_be32(img, 0, "image magic") != kImagesMagic)
        throw FormatError("bad image magic number in " + images_path, 0);
    const std::size_t img_count = read_be32(img, 4, "image count");
    const std::size_t img_rows = read_be32(img, 8, "image rows");
    const std::size_t img_cols = read_be32(img, 12, "image cols");
    if (img_rows != 28 || img_cols != 28)
        throw FormatError("expected 28x28 images in " + images_path, 8);
    const std::size_t pixels = img_rows * img_cols;
    if (img.size() < 16 + img_count * pixels)
        throw FormatError("image payload shorter than header promises", img.size());

    if (read_be32(lab, 0, "label magic") != kLabelsMagic)
        throw FormatError("bad label magic number in " + labels_path, 0);
    const std::size_t lab_count = read_be32(lab, 4, "label count");
    if (lab.size() < 8 + lab_count)
        throw FormatError("label payload shorter than header promises", lab.size());
    if (img_count != lab_count)
        throw ArityError("image count " + std::to_string(img_count) + " != label count " +
                         std::to_string(lab_count));

    // Full scan in file order so an absent class is always detected.
    std::vector<std::size_t> kept;
    std::size_t count_pos = 0, count_neg = 0;
    for (std::size_t i = 0; i < img_count; ++i) {
        const int label = lab[8 + i];
        if (label == classes.first) {
            ++count_pos;
            kept.push_back(i);
        } else if (label == classes.second) {
            ++count_neg;
            kept.push_back(i);
        }
    }
    if (count_pos == 0)
        throw EmptyClassError("no samples of class " + std::to_string(classes.first));
    if (count_neg == 0)
        throw EmptyClassError("no samples of class " + std::to_string(classes.second));
    if (kept.size() > limit) kept.resize(limit);

    Dataset ds;
    ds.X = Mat(kept.size(), pixels);
    ds.y.resize(kept.size());
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const std::uint8_t* px = img.data() + 16 + kept[r] * pixels;
        for (std::size_t c = 0; c < pixels; ++c) ds.X(r, c) = px[c] / 255.0;
        ds.y[r] = (lab[8 + kept[r]] == classes.first) ? 1.0 : -1.0;
    }
    ds.meta = images_path + "+" + labels_path + " classes=" + std::to_string(classes.first) + "," +
              std::to_string(classes.second) + " n=" + std::to_string(kept.size());
    return ds;
}

Dataset truncate_to_multiple(Dataset ds, std::size_t K) {
    if (K == 0) throw InvalidInputError("truncate_to_multiple: K must be positive");
    const std::size_t keep = (ds.X.rows() / K) * K;
    if (keep == 0)
        throw InvalidInputError("truncate_to_multiple: fewer than K = " + std::to_string(K) +
                                " rows");
    if (keep == ds.X.rows()) return ds;
    Mat x(keep, ds.X.cols());
    std::copy(ds.X.data().begin(), ds.X.data().begin() + static_cast<std::ptrdiff_t>(keep * ds.X.cols()),
              x.data().begin());
    ds.X = std::move(x);
    ds.y.resize(keep);
    ds.meta += " truncated=" + std::to_string(keep);
    return ds;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    std::vector<std::string> fields;
    for (std::size_t j = 0; j < ds.X.cols(); ++j) fields.push_back("x_" + std::to_string(j));
    fields.push_back("y");
    write_csv_row(out, fields);
    for (std::size_t i = 0; i < ds.X.rows(); ++i) {
        fields.clear();
        for (std::size_t j = 0; j < ds.X.cols(); ++j) fields.push_back(csv_double(ds.X(i, j)));
        fields.push_back(csv_double(ds.y[i]));
        write_csv_row(out, fields);
    }
}

void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      std::size_t rows, std::size_t cols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write file: " + path);
    write_be32(out, kImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(images.size()));
    write_be32(out, static_cast<std::uint32_t>(rows));
    write_be32(out, static_cast<std::uint32_t>(cols));
    for (const auto& im : images) {
        if (im.size() != rows * cols) throw ArityError("write_idx_images: wrong pixel count");
        out.write(reinterpret_cast<const char*>(im.data()), static_cast<std::streamsize>(im.size()));
    }
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write file: " + path);
    write_be32(out, kLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

}  // namespace levcode
