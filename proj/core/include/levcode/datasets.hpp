#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "levcode/matrix.hpp"

namespace levcode {

struct Dataset {
    Mat X;
    Vec y;
    std::string meta;  // source descriptor: synthetic seed or file names
};

/// Synthetic regression instance: twenty 50×20 integer blocks, block i with
/// entries uniform on [-15i, 15i], stacked and row-shuffled into a 1000×20
/// matrix whose rows span two orders of magnitude — which is what makes the
/// leverage scores markedly nonuniform. Targets are X theta_true + eps with
/// theta_true uniform on [-1,1] and eps standard Gaussian.
struct SynthRegression {
    Dataset data;
    Vec theta_true;
    Vec noise;
    std::vector<std::size_t> block_of_row;  // originating block, post-shuffle
};

SynthRegression synth_regression(std::uint64_t seed);

/// Read an IDX image/label pair, keep the two requested digit classes
/// (first -> +1, second -> -1), flatten to rows scaled into [0,1] and stop
/// after `limit` kept samples. limit = 0 is an error, as is a class with no
/// samples. Malformed files raise FormatError with the failing byte offset.
Dataset load_mnist(const std::string& images_path, const std::string& labels_path,
                   std::pair<int, int> classes, std::size_t limit);

/// Drop trailing rows so the row count becomes a multiple of K.
Dataset truncate_to_multiple(Dataset ds, std::size_t K);

/// CSV export with header x_0,...,x_{p-1},y.
void write_dataset_csv(const Dataset& ds, std::ostream& out);

// IDX writers (big-endian magic + dims + raw bytes); used to build fixtures.
void write_idx_images(const std::string& path, const std::vector<std::vector<std::uint8_t>>& images,
                      std::size_t rows = 28, std::size_t cols = 28);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

}  // namespace levcode
