#include "lueq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lueq {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json matrix_to_json(const ComplexMatrix& mat) {
    json re = json::array();
    json im = json::array();
    for (std::size_t r = 0; r < mat.rows(); ++r) {
        json row_re = json::array();
        json row_im = json::array();
        for (std::size_t c = 0; c < mat.cols(); ++c) {
            row_re.push_back(mat(r, c).real());
            row_im.push_back(mat(r, c).imag());
        }
        re.push_back(std::move(row_re));
        im.push_back(std::move(row_im));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                               const std::string& what) {
    if (!j.contains("re") || !j.contains("im")) {
        throw IoError(what + ": missing re/im arrays");
    }
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (!re.is_array() || !im.is_array() || re.size() != rows || im.size() != rows) {
        throw IoError(what + ": expected " + std::to_string(rows) + " rows");
    }
    ComplexMatrix mat(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row_re = re.at(r);
        const json& row_im = im.at(r);
        if (!row_re.is_array() || !row_im.is_array() || row_re.size() != cols ||
            row_im.size() != cols) {
            throw IoError(what + ": row " + std::to_string(r) + " has wrong length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row_re.at(c).is_number() || !row_im.at(c).is_number()) {
                throw IoError(what + ": non-numeric entry at (" + std::to_string(r) + "," +
                              std::to_string(c) + ")");
            }
            mat(r, c) = Complex(row_re.at(c).get<double>(), row_im.at(c).get<double>());
        }
    }
    return mat;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
}

BipartiteDims dims_from_json(const json& j, const std::string& path) {
    if (!j.contains("m") || !j.contains("n") || !j.at("m").is_number_integer() ||
        !j.at("n").is_number_integer()) {
        throw IoError("'" + path + "': missing integer fields m, n");
    }
    const long long m = j.at("m").get<long long>();
    const long long n = j.at("n").get<long long>();
    if (m < 2 || n < 2 || m > 64 || n > 64) {
        throw IoError("'" + path + "': factor dimensions out of range");
    }
    return BipartiteDims{static_cast<std::size_t>(m), static_cast<std::size_t>(n)};
}

}  // namespace

StateFile read_state_file(const std::string& path) {
    const json j = parse_file(path);
    const BipartiteDims dims = dims_from_json(j, path);
    const std::size_t d = dims.total();
    return StateFile{dims, matrix_from_json(j, d, d, "'" + path + "'")};
}

void write_state_file(const std::string& path, const BipartiteDims& dims,
                      const ComplexMatrix& mat) {
    json j = matrix_to_json(mat);
    j["m"] = dims.m;
    j["n"] = dims.n;
    write_file(path, j);
}

void write_certificate_file(const std::string& path, const BipartiteDims& dims,
                            const LocalUnitary& lu) {
    json j;
    j["m"] = dims.m;
    j["n"] = dims.n;
    j["u"] = matrix_to_json(lu.u);
    j["v"] = matrix_to_json(lu.v);
    write_file(path, j);
}

LocalUnitary read_certificate_file(const std::string& path) {
    const json j = parse_file(path);
    const BipartiteDims dims = dims_from_json(j, path);
    if (!j.contains("u") || !j.contains("v")) {
        throw IoError("'" + path + "': missing u/v blocks");
    }
    return LocalUnitary{matrix_from_json(j.at("u"), dims.m, dims.m, "'" + path + "' u"),
                        matrix_from_json(j.at("v"), dims.n, dims.n, "'" + path + "' v")};
}

std::string representation_report(const Representation& rep, const GaugeDescriptor& descriptor,
                                  bool as_json) {
    if (as_json) {
        json j;
        j["m"] = rep.dims.m;
        j["n"] = rep.dims.n;
        j["rank"] = rep.rank;
        j["degenerate_anchor"] = rep.degenerate_anchor;
        json items = json::array();
        for (const RepresentationItem& item : rep.items) {
            json it;
            it["eigenvalue"] = item.eigenvalue;
            it["schmidt_rank"] = item.schmidt.rank;
            it["schmidt_coefficients"] = item.schmidt.coefficients;
            json blocks = json::array();
            for (const DegeneracyBlock& b : item.schmidt.degeneracy_blocks) {
                blocks.push_back({{"first", b.first}, {"size", b.size}});
            }
            it["degeneracy_blocks"] = std::move(blocks);
            it["x"] = matrix_to_json(item.x);
            it["y"] = matrix_to_json(item.y);
            items.push_back(std::move(it));
        }
        j["items"] = std::move(items);
        j["basis_a"] = matrix_to_json(rep.basis_a);
        j["basis_b"] = matrix_to_json(rep.basis_b);
        json eigen_blocks = json::array();
        for (const DegeneracyBlock& b : rep.eigenvalue_blocks) {
            eigen_blocks.push_back({{"first", b.first}, {"size", b.size}});
        }
        j["eigenvalue_blocks"] = std::move(eigen_blocks);
        json g;
        g["left_a_phases"] = descriptor.left_a_phases;
        g["left_b_phases"] = descriptor.left_b_phases;
        g["left_a_blocks"] = descriptor.left_a_blocks;
        g["left_b_blocks"] = descriptor.left_b_blocks;
        g["per_item_phase"] = descriptor.per_item_phase;
        g["schmidt_blocks"] = descriptor.schmidt_blocks;
        g["eigen_blocks"] = descriptor.eigen_blocks;
        g["constraint_count"] = descriptor.constraint_count;
        g["free_parameter_count"] = descriptor.free_parameter_count;
        j["gauge"] = std::move(g);
        return j.dump(1) + "\n";
    }

    std::ostringstream out;
    out << "representation: dims " << rep.dims.m << "x" << rep.dims.n << ", rank " << rep.rank
        << (rep.degenerate_anchor ? ", degenerate anchor\n" : "\n");
    for (std::size_t i = 0; i < rep.rank; ++i) {
        const RepresentationItem& item = rep.items[i];
        out << "item " << i + 1 << ": lambda = " << fmt17(item.eigenvalue) << ", k = "
            << item.schmidt.rank << ", mu = [";
        for (std::size_t s = 0; s < item.schmidt.rank; ++s) {
            out << (s ? ", " : "") << fmt17(item.schmidt.coefficients[s]);
        }
        out << "]\n";
        auto print_matrix = [&out](const char* name, const ComplexMatrix& m) {
            out << "  " << name << " =\n";
            for (std::size_t r = 0; r < m.rows(); ++r) {
                out << "   ";
                for (std::size_t c = 0; c < m.cols(); ++c) {
                    out << " (" << fmt17(m(r, c).real()) << ", " << fmt17(m(r, c).imag()) << ")";
                }
                out << "\n";
            }
        };
        print_matrix("X", item.x);
        print_matrix("Y", item.y);
    }
    out << "eigenvalue blocks:";
    for (const DegeneracyBlock& b : rep.eigenvalue_blocks) {
        out << " [" << b.first + 1 << ".." << b.first + b.size << "]";
    }
    out << "\ngauge: item phases " << descriptor.per_item_phase << ", basis phases (a: "
        << descriptor.left_a_phases << ", b: " << descriptor.left_b_phases << ")";
    auto print_blocks = [&out](const char* name, const std::vector<std::size_t>& blocks) {
        if (blocks.empty()) return;
        out << ", " << name << " blocks:";
        for (std::size_t b : blocks) out << " U(" << b << ")";
    };
    print_blocks("a", descriptor.left_a_blocks);
    print_blocks("b", descriptor.left_b_blocks);
    print_blocks("eigen", descriptor.eigen_blocks);
    for (std::size_t i = 0; i < descriptor.schmidt_blocks.size(); ++i) {
        for (std::size_t b : descriptor.schmidt_blocks[i]) {
            if (b >= 2) out << ", item " << i + 1 << " Schmidt U(" << b << ")";
        }
    }
    out << "\nfree parameters: " << descriptor.free_parameter_count << "\n";
    return out.str();
}

std::string verdict_report(const Verdict& verdict, bool as_json) {
    if (as_json) {
        json j;
        if (const auto* eq = std::get_if<Equivalent>(&verdict)) {
            j["verdict"] = "equivalent";
            j["residual"] = eq->residual;
        } else if (const auto* in = std::get_if<Inequivalent>(&verdict)) {
            j["verdict"] = "inequivalent";
            j["witness"] = witness_name(in->witness);
            j["detail"] = in->detail;
        } else if (const auto* un = std::get_if<Undecided>(&verdict)) {
            j["verdict"] = "undecided";
            j["reason"] = un->reason;
            j["best_residual"] = un->best_residual;
        }
        return j.dump(1) + "\n";
    }
    std::ostringstream out;
    if (const auto* eq = std::get_if<Equivalent>(&verdict)) {
        out << "verdict: equivalent (residual " << fmt17(eq->residual) << ")\n";
    } else if (const auto* in = std::get_if<Inequivalent>(&verdict)) {
        out << "verdict: inequivalent, witness " << witness_name(in->witness) << ": "
            << in->detail << "\n";
    } else if (const auto* un = std::get_if<Undecided>(&verdict)) {
        out << "verdict: undecided (" << un->reason << "), best residual "
            << fmt17(un->best_residual) << "\n";
    }
    return out.str();
}

}  // namespace lueq
