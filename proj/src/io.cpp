#include "niche/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "niche/error.hpp"

namespace niche {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string header(int dim) { return dim == 1 ? "x,count,density\n" : "x,y,count,density\n"; }

void append_point(std::string& out, const Point& x) {
    for (int k = 0; k < x.dim(); ++k) {
        out += format_double(x[k]);
        out += ',';
    }
}

std::string nodes_csv(const GridField& field, const std::vector<int>& nodes) {
    const Lattice& L = field.lattice();
    std::string out = header(L.dim());
    for (int node : nodes) {
        append_point(out, L.position(node));
        out += ',';
        out += format_double(field.values()[node]);
        out += '\n';
    }
    return out;
}

double parse_number(const std::string& s, const std::string& path) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("'" + path + "': bad number '" + s + "'");
    return v;
}

// Grid from sorted unique cell centres along one axis.
void axis_from_centres(std::vector<double> c, double& lo, double& hi, int& cells, const std::string& path) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.size() < 2) throw std::runtime_error("'" + path + "': need at least two cells per axis");
    const double w = (c.back() - c.front()) / static_cast<double>(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        if (std::abs(c[k] - c[k - 1] - w) > 1e-6 * w)
            throw std::runtime_error("'" + path + "': cell centres are not uniformly spaced");
    lo = c.front() - 0.5 * w;
    hi = c.back() + 0.5 * w;
    cells = static_cast<int>(c.size());
}

}  // namespace

std::string histogram_csv(const HistogramEstimate& est) {
    std::string out = header(est.grid.dim());
    for (int k = 0; k < est.grid.cell_count(); ++k) {
        append_point(out, est.grid.cell_center(k));
        out += std::to_string(est.counts[k]);
        out += ',';
        out += format_double(est.density[k]);
        out += '\n';
    }
    return out;
}

std::string field_csv(const GridField& field) { return nodes_csv(field, field.lattice().interior_nodes()); }

std::string band_csv(const GridField& field) { return nodes_csv(field, field.lattice().exterior_nodes()); }

DensityTable read_density_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "': empty file");
    int dim;
    if (line == "x,count,density") dim = 1;
    else if (line == "x,y,count,density") dim = 2;
    else throw std::runtime_error("'" + path + "': unexpected header '" + line + "'");

    std::vector<std::array<double, 2>> pos;
    std::vector<double> dens;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (!line.empty() && line.back() == ',') cols.push_back("");
        if (static_cast<int>(cols.size()) != dim + 2) throw std::runtime_error("'" + path + "': bad row '" + line + "'");
        std::array<double, 2> x{0.0, 0.0};
        for (int k = 0; k < dim; ++k) x[k] = parse_number(cols[k], path);
        pos.push_back(x);
        dens.push_back(parse_number(cols[dim + 1], path));
    }
    if (pos.empty()) throw std::runtime_error("'" + path + "': no rows");

    std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
    std::array<int, 2> cells{1, 1};
    for (int k = 0; k < dim; ++k) {
        std::vector<double> c;
        for (const auto& x : pos) c.push_back(x[k]);
        axis_from_centres(c, lo[k], hi[k], cells[k], path);
    }
    DensityTable t;
    t.grid = dim == 1 ? HistogramGrid(Point{lo[0]}, Point{hi[0]}, cells)
                      : HistogramGrid(Point{lo[0], lo[1]}, Point{hi[0], hi[1]}, cells);
    if (static_cast<int>(pos.size()) != t.grid.cell_count())
        throw std::runtime_error("'" + path + "': rows do not fill the grid");
    t.density.assign(t.grid.cell_count(), 0.0);
    std::vector<char> seen(t.density.size(), 0);
    for (std::size_t r = 0; r < pos.size(); ++r) {
        const int idx = t.grid.locate(dim == 1 ? Point{pos[r][0]} : Point{pos[r][0], pos[r][1]});
        if (idx < 0 || seen[idx]) throw std::runtime_error("'" + path + "': duplicate or stray cell");
        seen[idx] = 1;
        t.density[idx] = dens[r];
    }
    return t;
}

DensityTable density_table(const HistogramEstimate& est) { return {est.grid, est.density}; }

DensityTable density_table(const GridField& field) {
    return {field.lattice().interior_grid(), field.interior_values()};
}

double l1_distance(const DensityTable& a, const DensityTable& b) {
    if (!a.grid.matches(b.grid, 1e-6) || a.density.size() != b.density.size())
        throw PreconditionError("grid mismatch: the two densities live on different grids");
    double total = 0.0;
    for (std::size_t k = 0; k < a.density.size(); ++k) total += std::abs(a.density[k] - b.density[k]);
    return total * a.grid.cell_volume();
}

}  // namespace niche
