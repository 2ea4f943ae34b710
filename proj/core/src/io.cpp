#include "qdmoo/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace qdmoo {

std::string fmt_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_matrix_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m,
                      const std::vector<std::string>& comment_lines, const std::string& header)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw EvalError("cannot open for writing: " + path);
    for (const auto& c : comment_lines)
        out << "# " << c << "\n";
    if (!header.empty())
        out << header << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out << ',';
            out << fmt_g17(m(i, j));
        }
        out << "\n";
    }
    if (!out)
        throw EvalError("write failed: " + path);
}

namespace {

bool looks_numeric(const std::string& line)
{
    for (char c : line) {
        if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E'
            || c == ',' || c == ' ' || c == '\t' || c == '\r' || c == 'n' || c == 'a' || c == 'i'
            || c == 'f' || c == 'N' || c == 'A' || c == 'I' || c == 'F')
            continue;
        return false;
    }
    return !line.empty();
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& path)
{
    std::vector<double> row;
    const char* p = line.c_str();
    while (*p) {
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p)
            throw EvalError("bad CSV number in " + path + ": '" + line + "'");
        row.push_back(v);
        p = end;
        while (*p == ' ' || *p == '\t' || *p == '\r')
            ++p;
        if (*p == ',')
            ++p;
    }
    return row;
}

} // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open for reading: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (first_content && !looks_numeric(line)) { // header row
            first_content = false;
            continue;
        }
        first_content = false;
        rows.push_back(parse_csv_row(line, path));
    }
    if (rows.empty())
        return {};
    const auto cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw EvalError("ragged CSV in " + path);
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

std::map<std::string, std::string> read_csv_metadata(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open for reading: " + path);
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#')
            break;
        auto body = line.substr(1);
        auto eq = body.find('=');
        if (eq == std::string::npos)
            continue;
        auto key = body.substr(0, eq);
        auto val = body.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.pop_back();
        };
        trim(key);
        trim(val);
        meta[key] = val;
    }
    return meta;
}

JsonlWriter::JsonlWriter(const std::string& path) : path_(path)
{
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    out_.open(path, std::ios::trunc);
    if (!out_)
        throw EvalError("cannot open for writing: " + path);
}

void JsonlWriter::write_line(const std::string& json_object)
{
    out_ << json_object << "\n";
    out_.flush();
}

std::vector<std::string> read_lines(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open for reading: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_text_file(const std::string& path, const std::string& text)
{
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw EvalError("cannot open for writing: " + path);
    out << text;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qdmoo
