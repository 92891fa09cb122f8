#include "ksl/io.hpp"

#include "ksl/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace ksl {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

template <class T>
void put(std::string& buf, const T& v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf.append(b, sizeof(T));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    template <class T>
    T get(const char* what) {
        if (pos + sizeof(T) > buf.size())
            fail(ErrorKind::truncated, std::string("snapshot truncated while reading ") + what);
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
};

const char* coords_name(Coordinates c) { return c == Coordinates::physical ? "physical" : "characteristic"; }

nlohmann::json vec_json(const Vec& v, int n) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < n; ++i) a.push_back(v[i]);
    return a;
}

Vec json_vec(const nlohmann::json& a) {
    Vec v{};
    for (std::size_t i = 0; i < a.size() && i < 3; ++i) v[i] = a[i].get<double>();
    return v;
}

}  // namespace

void write_snapshot(const DistributionField& field, const std::string& path) {
    const PhaseGrid& g = field.grid();
    std::string buf = "KSLB";
    put<std::uint32_t>(buf, snapshot_version);
    put<std::uint32_t>(buf, g.n);
    put<std::uint32_t>(buf, g.nx);
    put<std::uint32_t>(buf, g.nxi);
    for (const Vec* b : {&g.x_lo, &g.x_hi, &g.xi_lo, &g.xi_hi})
        for (int a = 0; a < g.n; ++a) put<double>(buf, (*b)[a]);
    put<double>(buf, field.time());
    buf.append(reinterpret_cast<const char*>(field.values().data()), field.values().size() * sizeof(double));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) fail(ErrorKind::io, "write failed for " + path);
}

DistributionField read_snapshot(const std::string& path, Coordinates coords, std::size_t budget_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open snapshot " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();
    if (buf.size() < 4) fail(ErrorKind::truncated, "snapshot truncated before the magic: " + path);
    if (buf.compare(0, 4, "KSLB") != 0) fail(ErrorKind::format_magic, "not a KSLB snapshot: " + path);
    Reader r{buf, 4};
    const auto version = r.get<std::uint32_t>("version");
    if (version != snapshot_version)
        fail(ErrorKind::format_version, "snapshot version " + std::to_string(version) + " is not supported");
    GridSpec spec;
    spec.n = static_cast<int>(r.get<std::uint32_t>("n"));
    spec.nx = static_cast<int>(r.get<std::uint32_t>("nx"));
    spec.nxi = static_cast<int>(r.get<std::uint32_t>("nxi"));
    spec.budget_bytes = budget_bytes;
    if (spec.n < 1 || spec.n > 3) fail(ErrorKind::format_magic, "snapshot dimension out of range");
    for (Vec* b : {&spec.x_lo, &spec.x_hi, &spec.xi_lo, &spec.xi_hi})
        for (int a = 0; a < spec.n; ++a) (*b)[a] = r.get<double>("bounds");
    const double time = r.get<double>("time");
    auto grid = make_grid(spec);
    const std::size_t bytes = grid->size * sizeof(double);
    if (buf.size() - r.pos < bytes)
        fail(ErrorKind::truncated, "snapshot payload truncated: expected " + std::to_string(bytes) + " bytes, found " +
                                       std::to_string(buf.size() - r.pos));
    if (buf.size() - r.pos > bytes) fail(ErrorKind::format_magic, "trailing bytes after snapshot payload");
    std::vector<double> values(grid->size);
    std::memcpy(values.data(), buf.data() + r.pos, bytes);
    return DistributionField(grid, std::move(values), time, coords);
}

std::string format_double(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string csv_header(int n) {
    std::string h = "t,M";
    const char* names[] = {"Vx", "Vy", "Vz"};
    for (int a = 0; a < n; ++a) h += std::string(",") + names[a];
    h += ",E,A,U,loc_x,loc_shift,gap,morawetz,mass_gamma,energy_ball,leakage,clipped_mass";
    return h;
}

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows, int n) {
    if (rows.empty()) fail(ErrorKind::argument, "diagnostics CSV needs a nonempty history");
    std::string out = csv_header(n) + "\n";
    for (const auto& row : rows) {
        const MomentReport& r = row.report;
        std::vector<double> cols{r.time, r.M};
        for (int a = 0; a < n; ++a) cols.push_back(r.V[a]);
        for (double v : {r.E, r.A, r.U, r.loc_x, r.loc_shift, row.gap, row.morawetz, row.mass_gamma, row.energy_ball,
                         row.leakage, row.clipped_mass})
            cols.push_back(v);
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + format_double(cols[i]);
        out += "\n";
    }
    return out;
}

void emit_diagnostics_csv(const std::vector<DiagnosticRow>& rows, int n, const std::string& path) {
    const std::string text = diagnostics_csv(rows, n);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    out << text;
    if (!out) fail(ErrorKind::io, "write failed for " + path);
}

void write_manifest(const Manifest& m, const std::string& path) {
    nlohmann::json j;
    j["coordinates"] = coords_name(m.coords);
    j["n"] = m.n;
    const DiagnosticsSpec& d = m.diagnostics;
    j["diagnostics"] = {{"observer", vec_json(d.observer, m.n)},
                        {"cone_x0", vec_json(d.cone.x0, m.n)},
                        {"cone_c", d.cone.c},
                        {"cone_v", d.cone.v},
                        {"ball_center", vec_json(d.ball_center, m.n)},
                        {"ball_radius", d.ball_radius},
                        {"ball_v_floor", d.ball_v_floor},
                        {"ball_mass", d.ball_mass}};
    j["snapshots"] = nlohmann::json::array();
    for (const auto& s : m.snapshots)
        j["snapshots"].push_back({{"file", s.file}, {"time", s.time}, {"clipped_mass", s.clipped_mass}});
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open manifest " + path);
    Manifest m;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        const std::string c = j.at("coordinates").get<std::string>();
        if (c != "physical" && c != "characteristic") fail(ErrorKind::validation, "manifest: unknown coordinates " + c);
        m.coords = c == "physical" ? Coordinates::physical : Coordinates::characteristic;
        m.n = j.at("n").get<int>();
        const auto& d = j.at("diagnostics");
        m.diagnostics.observer = json_vec(d.at("observer"));
        m.diagnostics.cone.x0 = json_vec(d.at("cone_x0"));
        m.diagnostics.cone.c = d.at("cone_c").get<double>();
        m.diagnostics.cone.v = d.at("cone_v").get<double>();
        m.diagnostics.ball_center = json_vec(d.at("ball_center"));
        m.diagnostics.ball_radius = d.at("ball_radius").get<double>();
        m.diagnostics.ball_v_floor = d.at("ball_v_floor").get<double>();
        m.diagnostics.ball_mass = d.at("ball_mass").get<bool>();
        for (const auto& s : j.at("snapshots"))
            m.snapshots.push_back({s.at("file").get<std::string>(), s.at("time").get<double>(),
                                   s.at("clipped_mass").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, std::string("malformed manifest: ") + e.what());
    }
    return m;
}

Manifest write_history_snapshots(const History& h, const DiagnosticsSpec& diag, const std::string& dir) {
    std::filesystem::create_directories(dir);
    Manifest m;
    m.diagnostics = diag;
    if (!h.snapshots.empty()) {
        m.coords = h.snapshots.front().coords();
        m.n = h.snapshots.front().grid().n;
    }
    for (std::size_t k = 0; k < h.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%05zu.kslb", k);
        write_snapshot(h.snapshots[k], (std::filesystem::path(dir) / name).string());
        m.snapshots.push_back({name, h.snapshots[k].time(), h.snapshot_clipped[k]});
    }
    write_manifest(m, (std::filesystem::path(dir) / "manifest.json").string());
    return m;
}

std::vector<DiagnosticRow> rows_from_manifest(const std::string& manifest_path) {
    const Manifest m = read_manifest(manifest_path);
    const auto dir = std::filesystem::path(manifest_path).parent_path();
    std::vector<DiagnosticRow> rows;
    for (const auto& s : m.snapshots) {
        const DistributionField f = read_snapshot((dir / s.file).string(), m.coords);
        if (f.time() != s.time) fail(ErrorKind::validation, "manifest time differs from snapshot " + s.file);
        rows.push_back(diagnose(f, m.diagnostics, s.clipped_mass));
    }
    return rows;
}

void write_svg_plot(const std::string& path, const std::string& title, const std::vector<PlotSeries>& series,
                    bool log_y) {
    const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
       << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto label = [&](double v) { char b[32]; std::snprintf(b, sizeof b, "%.4g", v); return std::string(b); };
    os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << label(x0) << "</text>\n"
       << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">" << label(x1)
       << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">"
       << (log_y ? "1e" : "") << label(y0) << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
       << (log_y ? "1e" : "") << label(y1) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 5];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
           << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0)) continue;
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        os << "\"/>\n<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 14 * k << "\" font-size=\"12\" fill=\"" << c
           << "\">" << s.name << "</text>\n";
    }
    os << "</svg>\n";
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    out << os.str();
}

}  // namespace ksl
