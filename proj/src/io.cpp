#include "ksvm/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <utility>

#include "ksvm/errors.hpp"

namespace ksvm {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    if (!cur.empty()) lines.push_back(std::move(cur));
    return lines;
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : line) {
        if (c == ' ' || c == '\t') {
            if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
}

double to_double(const std::string& tok, long line) {
    if (tok.empty()) throw ParseError("empty numeric field", line);
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size()) throw ParseError("bad number '" + tok + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite number '" + tok + "'", line);
    return v;
}

long to_long(const std::string& tok, long line) {
    if (tok.empty()) throw ParseError("empty integer field", line);
    const char* begin = tok.c_str();
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size() || errno == ERANGE)
        throw ParseError("bad integer '" + tok + "'", line);
    return v;
}

struct SparseEntry {
    Index index; // 1-based
    double value;
};

/// Parse "idx:val" pairs from toks[begin..); indices must be >= 1 and
/// strictly increasing.
std::vector<SparseEntry> parse_sparse_entries(const std::vector<std::string>& toks,
                                              size_t begin, long line) {
    std::vector<SparseEntry> entries;
    long prev = 0;
    for (size_t t = begin; t < toks.size(); ++t) {
        const std::string& tok = toks[t];
        const size_t colon = tok.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
            throw ParseError("expected index:value pair, got '" + tok + "'", line);
        const long idx = to_long(tok.substr(0, colon), line);
        if (idx < 1) throw ParseError("feature index must be >= 1, got " + std::to_string(idx), line);
        if (idx <= prev)
            throw ParseError("feature indices must be strictly increasing (saw " +
                                 std::to_string(idx) + " after " + std::to_string(prev) + ")",
                             line);
        prev = idx;
        entries.push_back({static_cast<Index>(idx), to_double(tok.substr(colon + 1), line)});
    }
    return entries;
}

Vector densify(const std::vector<SparseEntry>& entries, Index d) {
    Vector v = Vector::Zero(d);
    for (const auto& e : entries) v[e.index - 1] = e.value;
    return v;
}

const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Linear: return "linear";
        case KernelFamily::Polynomial: return "polynomial";
        case KernelFamily::Rbf: return "rbf";
    }
    return "?";
}

} // namespace

SvmModel parse_model(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);

    std::string svm_type, kernel_type;
    double gamma = 0.0, coef0 = 0.0, degree = 0.0, rho = 0.0;
    long nr_class = 0, total_sv = -1;
    long nr_sv0 = -1, nr_sv1 = -1;
    int label0 = 0, label1 = 0;
    bool has_svm_type = false, has_kernel = false, has_gamma = false, has_coef0 = false,
         has_degree = false, has_rho = false, has_nr_class = false, has_total = false,
         has_label = false, has_nr_sv = false;

    size_t li = 0;
    bool sv_sentinel = false;
    for (; li < lines.size(); ++li) {
        const long line_no = static_cast<long>(li) + 1;
        const auto toks = tokens(lines[li]);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        if (key == "SV") {
            if (toks.size() != 1) throw ParseError("unexpected content after 'SV'", line_no);
            sv_sentinel = true;
            ++li;
            break;
        }
        auto want = [&](size_t n) {
            if (toks.size() != n + 1)
                throw ParseError("header key '" + key + "' expects " + std::to_string(n) +
                                     " value(s)",
                                 line_no);
        };
        if (key == "svm_type") {
            want(1);
            svm_type = toks[1];
            has_svm_type = true;
        } else if (key == "kernel_type") {
            want(1);
            kernel_type = toks[1];
            has_kernel = true;
        } else if (key == "gamma") {
            want(1);
            gamma = to_double(toks[1], line_no);
            has_gamma = true;
        } else if (key == "coef0") {
            want(1);
            coef0 = to_double(toks[1], line_no);
            has_coef0 = true;
        } else if (key == "degree") {
            want(1);
            degree = to_double(toks[1], line_no);
            has_degree = true;
        } else if (key == "rho") {
            want(1);
            rho = to_double(toks[1], line_no);
            has_rho = true;
        } else if (key == "nr_class") {
            want(1);
            nr_class = to_long(toks[1], line_no);
            has_nr_class = true;
        } else if (key == "total_sv") {
            want(1);
            total_sv = to_long(toks[1], line_no);
            has_total = true;
        } else if (key == "label") {
            want(2);
            label0 = static_cast<int>(to_long(toks[1], line_no));
            label1 = static_cast<int>(to_long(toks[2], line_no));
            has_label = true;
        } else if (key == "nr_sv") {
            want(2);
            nr_sv0 = to_long(toks[1], line_no);
            nr_sv1 = to_long(toks[2], line_no);
            has_nr_sv = true;
        } else if (key == "probA" || key == "probB") {
            // probability-estimate tables; irrelevant to decision values
        } else {
            throw ParseError("unknown header key '" + key + "'", line_no);
        }
    }

    const long header_end = static_cast<long>(li);
    if (!sv_sentinel) throw ParseError("missing 'SV' sentinel line", header_end);
    auto require = [&](bool ok, const char* what) {
        if (!ok) throw ParseError(std::string("missing header key '") + what + "'", header_end);
    };
    require(has_svm_type, "svm_type");
    require(has_kernel, "kernel_type");
    require(has_nr_class, "nr_class");
    require(has_total, "total_sv");
    require(has_rho, "rho");
    require(has_label, "label");
    require(has_nr_sv, "nr_sv");

    if (svm_type != "c_svc") throw InvalidInput("unsupported svm_type '" + svm_type + "'");
    if (nr_class != 2)
        throw InvalidInput("unsupported model: nr_class = " + std::to_string(nr_class) +
                           " (binary only)");
    KernelSpec kernel;
    if (kernel_type == "linear") {
        kernel = KernelSpec::linear();
    } else if (kernel_type == "rbf") {
        require(has_gamma, "gamma");
        kernel = KernelSpec::rbf(gamma);
    } else if (kernel_type == "polynomial") {
        require(has_gamma, "gamma");
        require(has_degree, "degree");
        require(has_coef0, "coef0");
        kernel = KernelSpec::polynomial(gamma, coef0, degree);
    } else {
        throw InvalidInput("unsupported kernel_type '" + kernel_type + "'");
    }
    if ((label0 != 1 || label1 != -1) && (label0 != -1 || label1 != 1))
        throw InvalidInput("unsupported labels: expected {+1, -1}, got " +
                           std::to_string(label0) + " " + std::to_string(label1));
    if (total_sv < 1) throw ParseError("total_sv must be >= 1", header_end);
    if (nr_sv0 < 0 || nr_sv1 < 0 || nr_sv0 + nr_sv1 != total_sv)
        throw ParseError("nr_sv counts do not sum to total_sv", header_end);

    // SV block: total_sv rows of "coefficient idx:val ..."
    std::vector<double> coeffs;
    std::vector<std::vector<SparseEntry>> rows;
    Index max_index = 0;
    for (; li < lines.size() && static_cast<long>(rows.size()) < total_sv; ++li) {
        const long line_no = static_cast<long>(li) + 1;
        const auto toks = tokens(lines[li]);
        if (toks.empty()) continue;
        const double coeff = to_double(toks[0], line_no);
        const bool first_group = static_cast<long>(rows.size()) < nr_sv0;
        if (first_group ? coeff <= 0.0 : coeff >= 0.0)
            throw ParseError(std::string("coefficient sign does not match its class group (") +
                                 (first_group ? "expected > 0)" : "expected < 0)"),
                             line_no);
        auto entries = parse_sparse_entries(toks, 1, line_no);
        for (const auto& e : entries) max_index = std::max(max_index, e.index);
        coeffs.push_back(coeff);
        rows.push_back(std::move(entries));
    }
    if (static_cast<long>(rows.size()) < total_sv)
        throw ParseError("expected " + std::to_string(total_sv) + " support vector rows, got " +
                             std::to_string(rows.size()),
                         static_cast<long>(lines.size()));
    for (; li < lines.size(); ++li)
        if (!tokens(lines[li]).empty())
            throw ParseError("unexpected content after the SV block",
                             static_cast<long>(li) + 1);
    if (max_index == 0)
        throw ParseError("support vectors carry no feature indices; dimension unknown",
                         static_cast<long>(lines.size()));

    SvmModel model;
    model.kernel = kernel;
    model.bias = -rho;
    model.dual_coeffs = Vector(static_cast<Index>(coeffs.size()));
    for (size_t i = 0; i < coeffs.size(); ++i) {
        model.dual_coeffs[static_cast<Index>(i)] = coeffs[i];
        model.support_vectors.push_back(densify(rows[i], max_index));
    }
    // The file orients its decision function so its first label acts as +1;
    // realign to this library's fixed +1 orientation.
    if (label0 == -1) {
        model.dual_coeffs = -model.dual_coeffs;
        model.bias = -model.bias;
    }
    model.validate();
    return model;
}

std::string write_model(const SvmModel& model) {
    model.validate();
    const Index n = model.num_support_vectors();
    const Index d = model.dimension();
    std::vector<Index> order;
    for (Index i = 0; i < n; ++i)
        if (model.dual_coeffs[i] > 0.0) order.push_back(i);
    const Index num_pos = static_cast<Index>(order.size());
    for (Index i = 0; i < n; ++i)
        if (model.dual_coeffs[i] < 0.0) order.push_back(i);

    std::string out;
    out += "svm_type c_svc\n";
    out += std::string("kernel_type ") + family_name(model.kernel.family) + "\n";
    if (model.kernel.family == KernelFamily::Polynomial) {
        const double deg = model.kernel.degree;
        if (deg == std::floor(deg) && std::abs(deg) < 1e15)
            out += "degree " + std::to_string(static_cast<long long>(deg)) + "\n";
        else
            out += "degree " + format_g17(deg) + "\n";
        out += "gamma " + format_g17(model.kernel.scale_p) + "\n";
        out += "coef0 " + format_g17(model.kernel.offset_a) + "\n";
    } else if (model.kernel.family == KernelFamily::Rbf) {
        out += "gamma " + format_g17(model.kernel.gamma) + "\n";
    }
    out += "nr_class 2\n";
    out += "total_sv " + std::to_string(n) + "\n";
    out += "rho " + format_g17(-model.bias) + "\n";
    out += "label 1 -1\n";
    out += "nr_sv " + std::to_string(num_pos) + " " + std::to_string(n - num_pos) + "\n";
    out += "SV\n";

    // Sparse rows omit zeros, so the last dimension must be anchored by at
    // least one explicit entry or the parsed dimension would shrink.
    bool anchored = false;
    for (Index i = 0; i < n && !anchored; ++i)
        anchored = model.support_vectors[static_cast<size_t>(i)][d - 1] != 0.0;
    for (Index k = 0; k < n; ++k) {
        const Index i = order[static_cast<size_t>(k)];
        const Vector& sv = model.support_vectors[static_cast<size_t>(i)];
        out += format_g17(model.dual_coeffs[i]);
        for (Index j = 0; j < d; ++j)
            if (sv[j] != 0.0) out += " " + std::to_string(j + 1) + ":" + format_g17(sv[j]);
        if (k == 0 && !anchored) out += " " + std::to_string(d) + ":0";
        out += "\n";
    }
    return out;
}

Dataset read_libsvm_data(const std::string& text, Index force_dimension) {
    if (force_dimension < 0) throw InvalidInput("force_dimension must be >= 0");
    const std::vector<std::string> lines = split_lines(text);

    struct Row {
        int label;
        std::vector<SparseEntry> entries;
    };
    std::vector<Row> rows;
    Index max_index = 0;
    for (size_t li = 0; li < lines.size(); ++li) {
        const long line_no = static_cast<long>(li) + 1;
        const auto toks = tokens(lines[li]);
        if (toks.empty()) continue;
        const double lab = to_double(toks[0], line_no);
        if (lab != 1.0 && lab != -1.0)
            throw ParseError("label must be +1 or -1, got '" + toks[0] + "'", line_no);
        auto entries = parse_sparse_entries(toks, 1, line_no);
        for (const auto& e : entries) {
            if (force_dimension > 0 && e.index > force_dimension)
                throw ParseError("feature index " + std::to_string(e.index) +
                                     " exceeds the declared dimension " +
                                     std::to_string(force_dimension),
                                 line_no);
            max_index = std::max(max_index, e.index);
        }
        rows.push_back({lab > 0 ? 1 : -1, std::move(entries)});
    }

    const Index d = force_dimension > 0 ? force_dimension : max_index;
    if (rows.empty()) return d > 0 ? Dataset(d) : Dataset();
    if (d == 0)
        throw ParseError("cannot infer the feature dimension: no index:value entries",
                         static_cast<long>(lines.size()));
    Dataset data(d);
    for (auto& row : rows) data.add(densify(row.entries, d), row.label);
    return data;
}

Vector parse_vector_line(const std::string& text, Index dimension) {
    // the probe is the first line with content
    std::string line;
    for (auto& candidate : split_lines(text))
        if (!tokens(candidate).empty()) {
            line = candidate;
            break;
        }
    if (line.empty()) throw ParseError("no vector found in input", 1);

    if (line.find(':') != std::string::npos) {
        auto toks = tokens(line);
        const size_t begin = toks[0].find(':') == std::string::npos ? 1 : 0;
        const auto entries = parse_sparse_entries(toks, begin, 1);
        if (dimension <= 0)
            throw InvalidInput("sparse input needs a known target dimension");
        for (const auto& e : entries)
            if (e.index > dimension)
                throw DimensionError("feature index " + std::to_string(e.index) +
                                     " exceeds dimension " + std::to_string(dimension));
        return densify(entries, dimension);
    }

    // dense row: commas are separators, whitespace tolerated
    std::string normalized = line;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    const auto toks = tokens(normalized);
    Vector v(static_cast<Index>(toks.size()));
    for (size_t i = 0; i < toks.size(); ++i)
        v[static_cast<Index>(i)] = to_double(toks[i], 1);
    if (dimension > 0 && v.size() != dimension)
        throw DimensionError("input vector has " + std::to_string(v.size()) +
                             " values, expected " + std::to_string(dimension));
    return v;
}

namespace {

std::uint32_t be32(const std::string& bytes, size_t off) {
    const auto b = [&](size_t k) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + k])); };
    return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

void check_class_pair(int positive, int negative) {
    if (positive < 0 || positive > 255 || negative < 0 || negative > 255)
        throw InvalidInput("class ids must lie in [0, 255]");
    if (positive == negative) throw InvalidInput("positive and negative class must differ");
}

} // namespace

Dataset read_idx(const std::string& images_bytes, const std::string& labels_bytes,
                 int positive_digit, int negative_digit, bool scale) {
    check_class_pair(positive_digit, negative_digit);
    if (images_bytes.size() < 16) throw ParseError("image file truncated: header needs 16 bytes");
    const std::uint32_t magic = be32(images_bytes, 0);
    if (magic != 0x00000803u) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        throw ParseError(std::string("bad image file magic ") + buf + ", expected 0x00000803");
    }
    const std::uint64_t count = be32(images_bytes, 4);
    const std::uint64_t rows = be32(images_bytes, 8);
    const std::uint64_t cols = be32(images_bytes, 12);
    if (rows == 0 || cols == 0) throw ParseError("image geometry is zero");
    const std::uint64_t expected = 16 + count * rows * cols;
    if (images_bytes.size() != expected)
        throw ParseError("image file size mismatch: expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(images_bytes.size()));

    if (labels_bytes.size() < 8) throw ParseError("label file truncated: header needs 8 bytes");
    const std::uint32_t lmagic = be32(labels_bytes, 0);
    if (lmagic != 0x00000801u) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "0x%08x", lmagic);
        throw ParseError(std::string("bad label file magic ") + buf + ", expected 0x00000801");
    }
    const std::uint64_t lcount = be32(labels_bytes, 4);
    if (lcount != count)
        throw ParseError("label count " + std::to_string(lcount) + " does not match image count " +
                         std::to_string(count));
    if (labels_bytes.size() != 8 + count)
        throw ParseError("label file size mismatch: expected " + std::to_string(8 + count) +
                         " bytes, got " + std::to_string(labels_bytes.size()));

    const Index d = static_cast<Index>(rows * cols);
    Dataset data(d);
    const double denom = scale ? 255.0 : 1.0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const int lab = static_cast<unsigned char>(labels_bytes[8 + i]);
        int mapped = 0;
        if (lab == positive_digit) mapped = 1;
        else if (lab == negative_digit) mapped = -1;
        else continue;
        Vector f(d);
        const size_t base = 16 + static_cast<size_t>(i) * static_cast<size_t>(d);
        for (Index j = 0; j < d; ++j)
            f[j] = static_cast<unsigned char>(images_bytes[base + static_cast<size_t>(j)]) / denom;
        data.add(std::move(f), mapped);
    }
    return data;
}

Dataset read_cifar_bin(const std::string& bytes, int positive_class, int negative_class,
                       bool scale) {
    check_class_pair(positive_class, negative_class);
    constexpr size_t kRecord = 3073; // 1 label byte + 3072 pixel bytes
    if (bytes.empty() || bytes.size() % kRecord != 0)
        throw ParseError("file size " + std::to_string(bytes.size()) +
                         " is not a positive multiple of 3073");
    const size_t n = bytes.size() / kRecord;
    const Index d = 3072;
    Dataset data(d);
    const double denom = scale ? 255.0 : 1.0;
    for (size_t i = 0; i < n; ++i) {
        const size_t base = i * kRecord;
        const int lab = static_cast<unsigned char>(bytes[base]);
        int mapped = 0;
        if (lab == positive_class) mapped = 1;
        else if (lab == negative_class) mapped = -1;
        else continue;
        Vector f(d);
        for (Index j = 0; j < d; ++j)
            f[j] = static_cast<unsigned char>(bytes[base + 1 + static_cast<size_t>(j)]) / denom;
        data.add(std::move(f), mapped);
    }
    return data;
}

std::string render_image(const Vector& v, int width, int height, int channels,
                         RenderMode mode) {
    if (width <= 0 || height <= 0) throw InvalidInput("image geometry must be positive");
    if (channels != 1 && channels != 3) throw InvalidInput("channels must be 1 or 3");
    const Index expected = static_cast<Index>(width) * height * channels;
    if (v.size() != expected)
        throw DimensionError("vector length " + std::to_string(v.size()) +
                             " does not match " + std::to_string(width) + "x" +
                             std::to_string(height) + "x" + std::to_string(channels));
    if (!v.allFinite()) throw InvalidInput("cannot render non-finite values");

    // map each value to a byte
    auto quantize = [](double t) {
        const double r = std::round(t);
        return static_cast<unsigned char>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
    };
    std::vector<unsigned char> bytes(static_cast<size_t>(expected));
    if (mode == RenderMode::MinMax) {
        const double lo = v.minCoeff();
        const double hi = v.maxCoeff();
        if (hi == lo) {
            std::fill(bytes.begin(), bytes.end(), static_cast<unsigned char>(128));
        } else {
            for (Index i = 0; i < expected; ++i)
                bytes[static_cast<size_t>(i)] = quantize((v[i] - lo) / (hi - lo) * 255.0);
        }
    } else {
        const double amax = v.cwiseAbs().maxCoeff();
        if (amax == 0.0) {
            std::fill(bytes.begin(), bytes.end(), static_cast<unsigned char>(128));
        } else {
            for (Index i = 0; i < expected; ++i)
                bytes[static_cast<size_t>(i)] = quantize(128.0 + v[i] / amax * 127.0);
        }
    }

    std::string out = channels == 1 ? "P5" : "P6";
    out += "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    const size_t plane = static_cast<size_t>(width) * static_cast<size_t>(height);
    if (channels == 1) {
        out.append(reinterpret_cast<const char*>(bytes.data()), plane);
    } else {
        // input is channel-planar, PPM wants per-pixel interleaving
        std::string pix(plane * 3, '\0');
        for (size_t p = 0; p < plane; ++p)
            for (size_t c = 0; c < 3; ++c)
                pix[p * 3 + c] = static_cast<char>(bytes[c * plane + p]);
        out += pix;
    }
    return out;
}

std::string write_csv(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) throw InvalidInput("csv output needs at least a header row");
    std::string out;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            const std::string& f = row[i];
            if (f.find_first_of(",\"\r\n") != std::string::npos) {
                out += '"';
                for (char c : f) {
                    if (c == '"') out += '"';
                    out += c;
                }
                out += '"';
            } else {
                out += f;
            }
        }
        out += "\r\n";
    }
    return out;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 14695981039346656037ull;
    void feed(const void* data, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    }
};

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    Fnv1a f;
    f.feed(data, len);
    return f.h;
}

std::string hex64(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string dataset_fingerprint(const Dataset& data) {
    Fnv1a f;
    const std::int64_t d = data.dimension();
    const std::int64_t m = data.size();
    f.feed(&d, sizeof d);
    f.feed(&m, sizeof m);
    for (Index i = 0; i < data.size(); ++i) {
        const Sample& s = data[i];
        const std::int32_t lab = s.label;
        f.feed(&lab, sizeof lab);
        f.feed(s.features.data(), static_cast<std::size_t>(s.features.size()) * sizeof(double));
    }
    return hex64(f.h);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw FileError("read failed: " + path);
    return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FileError("write failed: " + path);
}

} // namespace ksvm
