#ifndef QDMOO_IO_HPP
#define QDMOO_IO_HPP

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/common.hpp"

namespace qdmoo {

/// Writes a matrix as CSV with 17-significant-digit scalars (lossless
/// round-trip). Leading '#' lines carry metadata such as the config hash.
void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m,
                      const std::vector<std::string>& comment_lines = {},
                      const std::string& header = "");

/// Reads a CSV written by write_matrix_csv ('#' comments and an optional
/// non-numeric header line are skipped). Values round-trip exactly.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Returns the '# key=value' comment metadata of a CSV file.
std::map<std::string, std::string> read_csv_metadata(const std::string& path);

/// Append-only JSON-lines writer; each write is one line, flushed
/// immediately so partial traces survive aborts.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path);

    void write_line(const std::string& json_object);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

std::vector<std::string> read_lines(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace qdmoo

#endif
