#include "kp/io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kp {

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw bad_input("snapshot: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_snapshot(const std::string& path, const SpectralField& f, double t, double epsilon,
                    int n, int sigma) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw bad_input("snapshot: cannot open for writing: " + path);
    os.write("DBL1", 4);
    put_le<std::uint32_t>(os, 1u);
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid().nx));
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid().ny));
    put_le<double>(os, f.grid().lx);
    put_le<double>(os, f.grid().ly);
    put_le<double>(os, t);
    put_le<double>(os, epsilon);
    put_le<std::int32_t>(os, n);
    put_le<std::int32_t>(os, sigma);
    for (double v : f.values()) put_le<double>(os, v);
    if (!os) throw bad_input("snapshot: write failed: " + path);
}

SpectralField read_snapshot(const std::string& path, SnapshotHeader& header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw bad_input("snapshot: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DBL1", 4) != 0) throw bad_input("snapshot: magic mismatch");
    auto version = get_le<std::uint32_t>(is);
    if (version != 1) throw bad_input("snapshot: unsupported version");
    SnapshotHeader h;
    h.nx = get_le<std::uint64_t>(is);
    h.ny = get_le<std::uint64_t>(is);
    h.lx = get_le<double>(is);
    h.ly = get_le<double>(is);
    h.t = get_le<double>(is);
    h.epsilon = get_le<double>(is);
    h.n = get_le<std::int32_t>(is);
    h.sigma = get_le<std::int32_t>(is);
    if (h.nx == 0 || h.ny == 0 || h.nx > (1u << 20) || h.ny > (1u << 20))
        throw bad_input("snapshot: implausible dimensions");
    GridSpec g(static_cast<int>(h.nx), static_cast<int>(h.ny), h.lx, h.ly);
    std::vector<double> v(g.size());
    for (auto& x : v) x = get_le<double>(is);
    header = h;
    return SpectralField::from_values(g, std::move(v));
}

void write_diagnostics_csv(const std::string& path, const RunDiagnostics& d) {
    std::ofstream os(path);
    if (!os) throw bad_input("cannot open for writing: " + path);
    os << "t,delta2,linf,outer_band\n";
    os.precision(17);
    for (const auto& r : d.rows)
        os << r.t << ',' << r.delta2 << ',' << r.linf << ',' << r.outer_band << '\n';
}

void write_monotonicity_csv(const std::string& path, const std::vector<CharacteristicSlice>& rows) {
    std::ofstream os(path);
    if (!os) throw bad_input("cannot open for writing: " + path);
    os << "y,min_delta_row,monotone\n";
    os.precision(17);
    for (const auto& r : rows) os << r.y << ',' << r.min_delta_row << ',' << (r.monotone ? 1 : 0) << '\n';
}

void write_critical_report(const std::string& path, const CriticalPoint& cp,
                           const LocateResult& loc, double bracket_width, int index) {
    nlohmann::json j;
    j["t_c"] = cp.t_c;
    j["xi_c"] = cp.xi_c;
    j["y_c"] = cp.y_c;
    j["x_c"] = cp.x_c;
    j["u_c"] = cp.u_c;
    j["k"] = cp.k;
    j["kappa"] = cp.kappa;
    j["beta_bar"] = cp.beta_bar;
    j["G"] = cp.G;
    j["G_xi"] = cp.G_xi;
    j["G_xixi"] = cp.G_xixi;
    j["G_xiy"] = cp.G_xiy;
    j["G_xixixi"] = cp.G_xixixi;
    j["G_xixiy"] = cp.G_xixiy;
    j["G_xiyy"] = cp.G_xiyy;
    j["G_y"] = cp.G_y;
    j["G_yy"] = cp.G_yy;
    j["G_yyy"] = cp.G_yyy;
    j["G_t"] = cp.G_t;
    j["G_yt"] = cp.G_yt;
    j["G_xit"] = cp.G_xit;
    j["F_xi"] = cp.F_xi;
    j["F_y"] = cp.F_y;
    j["F_yy"] = cp.F_yy;
    j["F_xiy"] = cp.F_xiy;
    j["F_t"] = cp.F_t;
    j["F_yt"] = cp.F_yt;
    j["F_xit"] = cp.F_xit;
    j["delta_at_c"] = cp.delta_at_c;
    j["res_Ft"] = cp.res_Ft;
    j["res_Fyt"] = cp.res_Fyt;
    j["res_Fxit"] = cp.res_Fxit;
    j["rel_res_Ft"] = cp.rel_res_Ft;
    j["rel_res_Fyt"] = cp.rel_res_Fyt;
    j["rel_res_Fxit"] = cp.rel_res_Fxit;
    j["generic"] = cp.generic;
    j["n"] = cp.n;
    j["sigma"] = cp.sigma;
    j["breakup_index"] = index;
    j["bracket_width"] = bracket_width;
    j["locate_objective"] = loc.objective;
    j["locate_converged"] = loc.converged;
    j["locate_iters"] = loc.iters;
    j["residual_G_xixi"] = loc.g_xixi;
    j["residual_G_xiy"] = loc.g_xiy;
    // Branch bookkeeping: positive odd-root scale factors pair the stored
    // PI2 branch U ~ -sign(X)|X|^{1/3} with the outer cubic root for k > 0.
    j["pi2_branch"] = "U ~ -sign(X)|X|^(1/3), positive scale factors, k > 0";

    std::ofstream os(path);
    if (!os) throw bad_input("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
}

CriticalPoint read_critical_report(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw bad_input("cannot open: " + path);
    nlohmann::json j;
    is >> j;
    CriticalPoint cp;
    cp.t_c = j.at("t_c");
    cp.xi_c = j.at("xi_c");
    cp.y_c = j.at("y_c");
    cp.x_c = j.at("x_c");
    cp.u_c = j.at("u_c");
    cp.k = j.at("k");
    cp.kappa = j.at("kappa");
    cp.beta_bar = j.at("beta_bar");
    cp.G = j.at("G");
    cp.G_xi = j.at("G_xi");
    cp.G_xixi = j.at("G_xixi");
    cp.G_xiy = j.at("G_xiy");
    cp.G_xixixi = j.at("G_xixixi");
    cp.G_xixiy = j.at("G_xixiy");
    cp.G_xiyy = j.at("G_xiyy");
    cp.G_y = j.at("G_y");
    cp.G_yy = j.at("G_yy");
    cp.G_yyy = j.at("G_yyy");
    cp.G_t = j.at("G_t");
    cp.G_yt = j.at("G_yt");
    cp.G_xit = j.at("G_xit");
    cp.F_xi = j.at("F_xi");
    cp.F_y = j.at("F_y");
    cp.F_yy = j.at("F_yy");
    cp.F_xiy = j.at("F_xiy");
    cp.F_t = j.at("F_t");
    cp.F_yt = j.at("F_yt");
    cp.F_xit = j.at("F_xit");
    cp.delta_at_c = j.at("delta_at_c");
    cp.res_Ft = j.at("res_Ft");
    cp.res_Fyt = j.at("res_Fyt");
    cp.res_Fxit = j.at("res_Fxit");
    cp.rel_res_Ft = j.at("rel_res_Ft");
    cp.rel_res_Fyt = j.at("rel_res_Fyt");
    cp.rel_res_Fxit = j.at("rel_res_Fxit");
    cp.generic = j.at("generic");
    cp.n = j.at("n");
    cp.sigma = j.at("sigma");
    return cp;
}

void write_pi2_csv(const std::string& path, const Pi2Solution& sol) {
    std::ofstream os(path);
    if (!os) throw bad_input("cannot open for writing: " + path);
    os << "T,X,U\n";
    os.precision(17);
    for (std::size_t j = 0; j < sol.T.size(); ++j)
        for (std::size_t i = 0; i < sol.X.size(); ++i)
            os << sol.T[j] << ',' << sol.X[i] << ',' << sol.U[j][i] << '\n';
}

Pi2Solution read_pi2_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw bad_input("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("T,X,U", 0) != 0)
        throw bad_input("pi2 table: bad header");
    Pi2Solution sol;
    double prevT = -1e300;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double T, X, U;
        char c1, c2;
        if (!(ls >> T >> c1 >> X >> c2 >> U)) throw bad_input("pi2 table: bad row: " + line);
        if (T != prevT) {
            sol.T.push_back(T);
            sol.U.emplace_back();
            prevT = T;
        }
        if (sol.T.size() == 1) sol.X.push_back(X);
        sol.U.back().push_back(U);
    }
    for (const auto& u : sol.U)
        if (u.size() != sol.X.size()) throw bad_input("pi2 table: ragged rows");
    // U_X by interior differences, for completeness of the in-memory table
    sol.U_X = sol.U;
    if (sol.X.size() >= 5) {
        double h = sol.X[1] - sol.X[0];
        for (auto& row : sol.U_X) {
            std::vector<double> src = row;
            for (std::size_t i = 0; i < src.size(); ++i) {
                std::size_t l = std::min(std::max<std::size_t>(i, 2), src.size() - 3);
                row[i] = (src[l - 2] - 8 * src[l - 1] + 8 * src[l + 1] - src[l + 2]) / (12 * h);
            }
        }
    }
    return sol;
}

void write_comparison(const std::string& dir, const std::string& stem, const ComparisonReport& rep) {
    {
        std::ofstream os(dir + "/" + stem + "_report.txt");
        if (!os) throw bad_input("cannot open comparison report for writing");
        os.precision(17);
        os << "t = " << rep.t << '\n';
        os << "window_half_x = " << rep.window_half_x << '\n';
        os << "window_half_y = " << rep.window_half_y << '\n';
        os << "nx_window = " << rep.nx_window << '\n';
        os << "ny_window = " << rep.ny_window << '\n';
        os << "linf_error = " << rep.linf_error << '\n';
        os << "l2_error = " << rep.l2_error << '\n';
        os << "window_amplitude = " << rep.window_amplitude << '\n';
    }
    auto dump = [&](const std::string& name, const std::vector<std::array<double, 3>>& rows,
                    const char* head) {
        std::ofstream os(dir + "/" + stem + "_" + name + ".csv");
        os << head << '\n';
        os.precision(17);
        for (const auto& r : rows) os << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    };
    dump("xslice", rep.x_slice, "x,u_num,u_asym");
    dump("yslice", rep.y_slice, "y,u_num,u_asym");
}

Config Config::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw bad_input("config: cannot open: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw bad_input("config: line " + std::to_string(lineno) + " is not key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
        if (key.empty()) throw bad_input("config: empty key on line " + std::to_string(lineno));
        c.kv_[key] = val;
    }
    return c;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw bad_input("config: missing required key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw bad_input("config: key '" + key + "' is not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    double v = get_double(key, fallback);
    int i = static_cast<int>(v);
    if (v != i) throw bad_input("config: key '" + key + "' is not an integer");
    return i;
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::string Config::echo() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << '\n';
    return os.str();
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw bad_input("checksum: cannot open: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[65536];
    while (is) {
        is.read(buf, sizeof(buf));
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace kp
