#ifndef KSVM_IO_HPP
#define KSVM_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ksvm/types.hpp"

namespace ksvm {

/// Parse a libsvm-format model file (c_svc, binary, linear/polynomial/rbf).
/// The file stores rho = -bias; when the file's label order starts with -1,
/// every dual coefficient and the bias flip sign on import so that this
/// library's +1 class matches the file's +1 class.
SvmModel parse_model(const std::string& text);

/// Serialize a model to libsvm model-file text. Support vectors are grouped
/// by coefficient sign (+ first) to match the label/nr_sv header; floats are
/// printed with 17 significant digits so parse(write(m)) reproduces decision
/// values exactly.
std::string write_model(const SvmModel& model);

/// Parse libsvm sparse data text ("label idx:val ...", 1-based strictly
/// increasing indices, labels +1/-1). The dimension is the largest index
/// seen, or force_dimension when nonzero (indices beyond it are an error).
Dataset read_libsvm_data(const std::string& text, Index force_dimension = 0);

/// Parse one probe vector from text: either a libsvm sparse line (an
/// optional leading label token is ignored) or a dense row of
/// comma/whitespace-separated numbers. Sparse lines densify to `dimension`
/// (required > 0); dense rows must match `dimension` when it is nonzero.
Vector parse_vector_line(const std::string& text, Index dimension = 0);

/// Decode a big-endian IDX image file (magic 0x00000803) plus its label file
/// (magic 0x00000801) into a binary dataset: images labeled positive_digit
/// map to +1, negative_digit to -1, everything else is dropped. Pixels are
/// divided by 255 unless scale is false.
Dataset read_idx(const std::string& images_bytes, const std::string& labels_bytes,
                 int positive_digit, int negative_digit, bool scale = true);

/// Decode CIFAR-10 binary records (3073 bytes: label + 3072 channel-planar
/// pixels) into a binary dataset, same class mapping and scaling as read_idx.
Dataset read_cifar_bin(const std::string& bytes, int positive_class, int negative_class,
                       bool scale = true);

enum class RenderMode {
    MinMax, // affine rescale: min -> 0, max -> 255; constant vectors -> 128
    Signed, // symmetric around zero: 0 -> 128, +/-max|v| -> 255/1
};

/// Render a vector as a binary PGM (channels = 1) or PPM (channels = 3)
/// image, maxval 255. Three-channel input is channel-planar (all R, then G,
/// then B); output pixels are interleaved as the formats require.
std::string render_image(const Vector& v, int width, int height, int channels,
                         RenderMode mode = RenderMode::MinMax);

/// RFC-4180 CSV: first row is the header, fields quoted when they contain
/// commas/quotes/newlines, CRLF record separators.
std::string write_csv(const std::vector<std::vector<std::string>>& rows);

/// Shortest unambiguous float text: printf %.17g, enough digits that reading
/// the text back reproduces the exact double. All emitters share it so
/// repeated runs produce byte-identical output.
std::string format_g17(double v);

/// FNV-1a 64-bit hash, used to fingerprint inputs in result manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string hex64(std::uint64_t value);

/// Deterministic fingerprint of a dataset's exact contents (feature bits,
/// labels, order).
std::string dataset_fingerprint(const Dataset& data);

/// Whole-file read/write; FileError on open failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

} // namespace ksvm

#endif
