#include "slbec/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "slbec/errors.hpp"

namespace slbec {
namespace fs = std::filesystem;

namespace {

void append_le(std::string& out, double value) {
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>(bits & 0xffu));
        bits >>= 8;
    }
}

double read_le(const char* p) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
    return std::bit_cast<double>(bits);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string join3(const std::array<double, 3>& v) {
    return format_double(v[0]) + "," + format_double(v[1]) + "," + format_double(v[2]);
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Splits "key=value" tokens of a header line after the magic and version words.
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& magic,
                                                const fs::path& path) {
    std::istringstream ss(line);
    std::string word, version;
    ss >> word >> version;
    if (word != magic || version != "v1") throw IoError(path.string() + ": not a " + magic + " v1 file");
    std::map<std::string, std::string> fields;
    while (ss >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw IoError(path.string() + ": malformed header token '" + word + "'");
        fields[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return fields;
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const fs::path& path) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw IoError(path.string() + ": bad number '" + item + "' in header");
        }
    }
    if (values.size() != expected) throw IoError(path.string() + ": header list has wrong length");
    return values;
}

const std::string& require_key(const std::map<std::string, std::string>& fields, const std::string& key,
                               const fs::path& path) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw IoError(path.string() + ": header lacks '" + key + "'");
    return it->second;
}

Grid header_grid(const std::map<std::string, std::string>& fields, const fs::path& path) {
    const auto dims = parse_list(require_key(fields, "dims", path), 3, path);
    const auto spacing = parse_list(require_key(fields, "spacing", path), 3, path);
    Grid g;
    for (int a = 0; a < 3; ++a) {
        g.dims[a] = static_cast<std::size_t>(dims[a]);
        g.spacing[a] = spacing[a];
    }
    validate_grid(g);
    return g;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_table(const Table& table) {
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw IoError("table row has " + std::to_string(row.size()) + " cells, schema has " +
                          std::to_string(table.columns.size()));
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::visit(
                [&out](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out += format_double(v);
                    else if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
                    else out += csv_escape(v);
                },
                row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void write_table(const Table& table, const fs::path& path) { write_file_atomic(path, format_table(table)); }

void write_field(const CondensateState& state, const fs::path& path, const std::map<std::string, double>& metadata) {
    const Grid& g = state.phi.grid;
    std::string out = "slbec-field v1 dims=" + std::to_string(g.dims[0]) + "," + std::to_string(g.dims[1]) + "," +
                      std::to_string(g.dims[2]) + " spacing=" + join3(g.spacing) + " t=" + format_double(state.t);
    for (const auto& [key, value] : metadata) {
        if (key.find_first_of(" =\n") != std::string::npos) throw IoError("invalid metadata key '" + key + "'");
        out += " " + key + "=" + format_double(value);
    }
    out += '\n';
    out.reserve(out.size() + 16 * state.phi.size());
    for (const auto& v : state.phi.values) {
        append_le(out, v.real());
        append_le(out, v.imag());
    }
    write_file_atomic(path, out);
}

FieldFile read_field(const fs::path& path) {
    const std::string bytes = read_all(path);
    const auto eol = bytes.find('\n');
    if (eol == std::string::npos) throw IoError(path.string() + ": missing header line");
    auto fields = parse_header(bytes.substr(0, eol), "slbec-field", path);
    FieldFile file;
    const Grid g = header_grid(fields, path);
    file.state.phi = ComplexField(g);
    file.state.t = std::stod(require_key(fields, "t", path));
    for (const auto& [key, value] : fields)
        if (key != "dims" && key != "spacing" && key != "t") file.metadata[key] = std::stod(value);

    const std::size_t payload = bytes.size() - eol - 1;
    if (payload != 16 * g.size())
        throw IoError(path.string() + ": expected " + std::to_string(16 * g.size()) + " data bytes, found " +
                      std::to_string(payload));
    const char* p = bytes.data() + eol + 1;
    for (std::size_t i = 0; i < g.size(); ++i, p += 16) file.state.phi[i] = {read_le(p), read_le(p + 8)};
    return file;
}

void write_fourier_table(const FourierTable& table, const fs::path& path) {
    const Grid& g = table.grid;
    const auto& o = table.spec.orientation;
    std::string out = "slbec-kernel v1 dims=" + std::to_string(g.dims[0]) + "," + std::to_string(g.dims[1]) + "," +
                      std::to_string(g.dims[2]) + " spacing=" + join3(g.spacing) +
                      " strength=" + format_double(table.spec.strength) + " orientation=" + join3({o.x, o.y, o.z}) +
                      " method=" + (table.method == TableMethod::analytic ? "analytic" : "lattice") +
                      " inner=" + format_double(table.inner_radius) + " outer=" + format_double(table.outer_radius) +
                      "\n";
    out.reserve(out.size() + 8 * table.coefficients.size());
    for (double c : table.coefficients) append_le(out, c);
    write_file_atomic(path, out);
}

FourierTable read_fourier_table(const fs::path& path) {
    const std::string bytes = read_all(path);
    const auto eol = bytes.find('\n');
    if (eol == std::string::npos) throw IoError(path.string() + ": missing header line");
    const auto fields = parse_header(bytes.substr(0, eol), "slbec-kernel", path);
    FourierTable table;
    table.grid = header_grid(fields, path);
    table.spec.strength = std::stod(require_key(fields, "strength", path));
    const auto o = parse_list(require_key(fields, "orientation", path), 3, path);
    table.spec.orientation = {o[0], o[1], o[2]};
    const std::string& method = require_key(fields, "method", path);
    if (method != "analytic" && method != "lattice") throw IoError(path.string() + ": unknown method " + method);
    table.method = method == "analytic" ? TableMethod::analytic : TableMethod::lattice;
    table.inner_radius = std::stod(require_key(fields, "inner", path));
    table.outer_radius = std::stod(require_key(fields, "outer", path));
    table.spec.cutoff_radius = table.inner_radius;
    table.spec.sphere_radius = table.outer_radius;

    const std::size_t n = table.grid.size();
    if (bytes.size() - eol - 1 != 8 * n) throw IoError(path.string() + ": coefficient payload has the wrong size");
    table.coefficients.resize(n);
    const char* p = bytes.data() + eol + 1;
    for (std::size_t i = 0; i < n; ++i, p += 8) table.coefficients[i] = read_le(p);
    return table;
}

}  // namespace slbec
