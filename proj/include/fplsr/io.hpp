#pragma once

// File formats: curve CSVs, experiment result CSVs, and JSON (de)serialization
// for every model object. Doubles are written with enough digits to round-trip
// exactly, so save/load pairs reproduce values bit for bit.

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fplsr/error.hpp"
#include "fplsr/ffrm.hpp"
#include "fplsr/simlab.hpp"

namespace fplsr::io {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const char* context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw std::invalid_argument(std::string(context) + ": bad number '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s, const char* context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw std::invalid_argument(std::string(context) + ": bad integer '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

// ---------------------------------------------------------------------------
// Curve CSV
//
// Column layout (default): header `arg,<id1>,<id2>,...`; each data row is one
// argument value followed by every curve's observation there. Row layout is
// the transpose: header `id,<arg1>,<arg2>,...`; each data row is one curve.
// ---------------------------------------------------------------------------

enum class Orientation { col, row };

struct CurveTable {
    std::vector<double> argvals;   // length J, shared by all curves
    std::vector<std::string> ids;  // length N
    Eigen::MatrixXd obs;           // N x J, one row per curve
};

inline void write_curve_csv(std::ostream& os, const CurveTable& table,
                            Orientation orientation = Orientation::col) {
    const Eigen::Index N = table.obs.rows(), J = table.obs.cols();
    if (static_cast<Eigen::Index>(table.argvals.size()) != J ||
        static_cast<Eigen::Index>(table.ids.size()) != N)
        throw std::invalid_argument("write_curve_csv: inconsistent table");
    if (orientation == Orientation::col) {
        os << "arg";
        for (const auto& id : table.ids) os << ',' << id;
        os << '\n';
        for (Eigen::Index j = 0; j < J; ++j) {
            os << format_double(table.argvals[j]);
            for (Eigen::Index i = 0; i < N; ++i) os << ',' << format_double(table.obs(i, j));
            os << '\n';
        }
    } else {
        os << "id";
        for (Eigen::Index j = 0; j < J; ++j) os << ',' << format_double(table.argvals[j]);
        os << '\n';
        for (Eigen::Index i = 0; i < N; ++i) {
            os << table.ids[i];
            for (Eigen::Index j = 0; j < J; ++j) os << ',' << format_double(table.obs(i, j));
            os << '\n';
        }
    }
}

inline CurveTable read_curve_csv(std::istream& is, Orientation orientation = Orientation::col) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("curve csv: empty input");
    const auto header = split_csv_line(line);
    if (header.size() < 2) throw std::invalid_argument("curve csv: header needs >= 2 columns");

    CurveTable table;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::invalid_argument("curve csv: ragged row '" + line + "'");
        rows.emplace_back();
        if (orientation == Orientation::col) {
            for (const auto& f : fields) rows.back().push_back(parse_double(f, "curve csv"));
        } else {
            table.ids.push_back(fields[0]);
            for (std::size_t k = 1; k < fields.size(); ++k)
                rows.back().push_back(parse_double(fields[k], "curve csv"));
        }
    }
    if (rows.empty()) throw std::invalid_argument("curve csv: no data rows");

    if (orientation == Orientation::col) {
        const Eigen::Index N = static_cast<Eigen::Index>(header.size()) - 1;
        const Eigen::Index J = static_cast<Eigen::Index>(rows.size());
        table.ids.assign(header.begin() + 1, header.end());
        table.argvals.resize(J);
        table.obs.resize(N, J);
        for (Eigen::Index j = 0; j < J; ++j) {
            table.argvals[j] = rows[j][0];
            for (Eigen::Index i = 0; i < N; ++i) table.obs(i, j) = rows[j][i + 1];
        }
    } else {
        const Eigen::Index N = static_cast<Eigen::Index>(rows.size());
        const Eigen::Index J = static_cast<Eigen::Index>(header.size()) - 1;
        table.argvals.resize(J);
        for (Eigen::Index j = 0; j < J; ++j)
            table.argvals[j] = parse_double(header[j + 1], "curve csv header");
        table.obs.resize(N, J);
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = 0; j < J; ++j) table.obs(i, j) = rows[i][j];
    }
    return table;
}

inline CurveTable read_curve_csv_file(const std::string& path,
                                      Orientation orientation = Orientation::col) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open file: " + path);
    try {
        return read_curve_csv(is, orientation);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Experiment CSVs
// ---------------------------------------------------------------------------

inline constexpr const char* kExperimentHeader =
    "method,K,rho,mean_amse,se_amse,mean_amse_p,se_amse_p,mean_fit_seconds,failures";

inline void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
    os << kExperimentHeader << '\n';
    for (const auto& r : records) {
        os << algorithm_name(r.method) << ',' << r.K << ',' << format_double(r.rho) << ','
           << format_double(r.mean_amse) << ',' << format_double(r.se_amse) << ','
           << format_double(r.mean_amse_p) << ',' << format_double(r.se_amse_p) << ','
           << format_double(r.mean_fit_seconds) << ',' << r.failures << '\n';
    }
}

inline std::vector<ExperimentRecord> read_experiment_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("experiment csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kExperimentHeader)
        throw std::invalid_argument("experiment csv: unexpected header '" + line + "'");
    std::vector<ExperimentRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 9) throw std::invalid_argument("experiment csv: ragged row '" + line + "'");
        ExperimentRecord r;
        r.method = algorithm_from_name(f[0]);
        r.K = static_cast<int>(parse_long(f[1], "experiment csv"));
        r.rho = parse_double(f[2], "experiment csv");
        r.mean_amse = parse_double(f[3], "experiment csv");
        r.se_amse = parse_double(f[4], "experiment csv");
        r.mean_amse_p = parse_double(f[5], "experiment csv");
        r.se_amse_p = parse_double(f[6], "experiment csv");
        r.mean_fit_seconds = parse_double(f[7], "experiment csv");
        r.failures = static_cast<int>(parse_long(f[8], "experiment csv"));
        records.push_back(r);
    }
    return records;
}

inline void write_losses_csv(std::ostream& os, const std::vector<ReplicationLoss>& losses) {
    os << "method,K,rho,rep,amse,amse_p,fit_seconds,failed\n";
    for (const auto& l : losses) {
        os << algorithm_name(l.method) << ',' << l.K << ',' << format_double(l.rho) << ','
           << l.rep << ',' << format_double(l.amse) << ',' << format_double(l.amse_p) << ','
           << format_double(l.fit_seconds) << ',' << (l.failed ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON: matrices and vectors
// ---------------------------------------------------------------------------

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    j["data"] = std::move(data);
    return j;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::invalid_argument("matrix json: data length does not match dims");
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
    return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

// ---------------------------------------------------------------------------
// JSON: basis and curves
// ---------------------------------------------------------------------------

inline json basis_to_json(const BasisSystem& bs) {
    json j;
    j["order"] = bs.order;
    j["domain"] = {bs.a, bs.b};
    j["n_basis"] = bs.n_basis;
    j["interior_knots"] = bs.interior_knots;
    return j;
}

inline BasisSystem basis_from_json(const json& j) {
    BasisSystem bs;
    bs.order = j.at("order").get<int>();
    const auto& dom = j.at("domain");
    if (dom.size() != 2) throw std::invalid_argument("basis json: domain must be [a,b]");
    bs.a = dom[0].get<double>();
    bs.b = dom[1].get<double>();
    bs.n_basis = j.at("n_basis").get<int>();
    bs.interior_knots = j.at("interior_knots").get<std::vector<double>>();
    if (bs.order < 1 || bs.n_basis < bs.order || !(bs.a < bs.b))
        throw std::invalid_argument("basis json: invalid sizes");
    if (static_cast<int>(bs.interior_knots.size()) != bs.n_basis - bs.order)
        throw std::invalid_argument("basis json: interior knot count does not match n_basis");
    bs.knots.assign(bs.order, bs.a);
    bs.knots.insert(bs.knots.end(), bs.interior_knots.begin(), bs.interior_knots.end());
    bs.knots.insert(bs.knots.end(), bs.order, bs.b);
    return bs;
}

inline json curveset_to_json(const CurveSet& cs) {
    json j;
    j["basis"] = basis_to_json(cs.basis);
    j["coef"] = matrix_to_json(cs.coef);
    return j;
}

inline CurveSet curveset_from_json(const json& j) {
    CurveSet cs;
    cs.basis = basis_from_json(j.at("basis"));
    cs.coef = matrix_from_json(j.at("coef"));
    if (cs.coef.cols() != cs.basis.n_basis)
        throw std::invalid_argument("curveset json: coef width does not match basis");
    return cs;
}

// ---------------------------------------------------------------------------
// JSON: models
// ---------------------------------------------------------------------------

inline json pls_to_json(const PlsModel& m) {
    json j;
    j["algorithm"] = m.algorithm == PlsAlgorithm::nipals ? "nipals" : "simpls";
    j["h"] = m.h;
    j["truncated"] = m.truncated;
    j["x_mean"] = vector_to_json(m.x_mean);
    j["y_mean"] = vector_to_json(m.y_mean);
    j["W"] = matrix_to_json(m.W);
    j["T"] = matrix_to_json(m.T);
    j["P"] = matrix_to_json(m.P);
    j["Q"] = matrix_to_json(m.Q);
    j["proj"] = matrix_to_json(m.proj);
    j["B"] = matrix_to_json(m.B);
    j["fitted"] = matrix_to_json(m.fitted);
    return j;
}

inline PlsModel pls_from_json(const json& j) {
    PlsModel m;
    const std::string alg = j.at("algorithm").get<std::string>();
    if (alg == "nipals")
        m.algorithm = PlsAlgorithm::nipals;
    else if (alg == "simpls")
        m.algorithm = PlsAlgorithm::simpls;
    else
        throw std::invalid_argument("pls json: unknown algorithm '" + alg + "'");
    m.h = j.at("h").get<int>();
    m.truncated = j.at("truncated").get<bool>();
    m.x_mean = vector_from_json(j.at("x_mean"));
    m.y_mean = vector_from_json(j.at("y_mean"));
    m.W = matrix_from_json(j.at("W"));
    m.T = matrix_from_json(j.at("T"));
    m.P = matrix_from_json(j.at("P"));
    m.Q = matrix_from_json(j.at("Q"));
    m.proj = matrix_from_json(j.at("proj"));
    m.B = matrix_from_json(j.at("B"));
    m.fitted = matrix_from_json(j.at("fitted"));
    return m;
}

inline json sqrt_pair_to_json(const SqrtPair& sp) {
    json j;
    j["sqrt"] = matrix_to_json(sp.sqrt);
    j["inv_sqrt"] = matrix_to_json(sp.inv_sqrt);
    j["condition"] = sp.condition;
    return j;
}

inline SqrtPair sqrt_pair_from_json(const json& j) {
    SqrtPair sp;
    sp.sqrt = matrix_from_json(j.at("sqrt"));
    sp.inv_sqrt = matrix_from_json(j.at("inv_sqrt"));
    sp.condition = j.at("condition").get<double>();
    return sp;
}

inline json ffr_to_json(const FfrModel& m) {
    json j;
    j["algorithm"] = algorithm_name(m.algorithm);
    j["h"] = m.h;
    j["truncated"] = m.truncated;
    j["response_basis"] = basis_to_json(m.response_basis);
    j["response_mean"] = vector_to_json(m.response_mean);
    j["response_gram"] = matrix_to_json(m.response_gram.values);
    j["response_sqrt"] = sqrt_pair_to_json(m.response_sqrt);
    json blocks = json::array();
    for (const auto& b : m.blocks) {
        json jb;
        jb["basis"] = basis_to_json(b.basis);
        jb["mean"] = vector_to_json(b.mean);
        jb["gram"] = matrix_to_json(b.gram.values);
        jb["gram_sqrt"] = sqrt_pair_to_json(b.gram_sqrt);
        jb["B"] = matrix_to_json(b.B);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    if (m.algorithm == FfrAlgorithm::ridge)
        j["ridge_theta"] = m.ridge_theta;
    else
        j["pls"] = pls_to_json(m.pls);
    j["xi"] = matrix_to_json(m.xi);
    j["fitted_coef"] = matrix_to_json(m.fitted_coef);
    return j;
}

inline FfrModel ffr_from_json(const json& j) {
    FfrModel m;
    m.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    m.h = j.at("h").get<int>();
    m.truncated = j.at("truncated").get<bool>();
    m.response_basis = basis_from_json(j.at("response_basis"));
    m.response_mean = vector_from_json(j.at("response_mean"));
    m.response_gram = GramMatrix{matrix_from_json(j.at("response_gram")), m.response_basis};
    m.response_sqrt = sqrt_pair_from_json(j.at("response_sqrt"));
    for (const auto& jb : j.at("blocks")) {
        PredictorBlock b;
        b.basis = basis_from_json(jb.at("basis"));
        b.mean = vector_from_json(jb.at("mean"));
        b.gram = GramMatrix{matrix_from_json(jb.at("gram")), b.basis};
        b.gram_sqrt = sqrt_pair_from_json(jb.at("gram_sqrt"));
        b.B = matrix_from_json(jb.at("B"));
        m.blocks.push_back(std::move(b));
    }
    if (m.algorithm == FfrAlgorithm::ridge)
        m.ridge_theta = j.at("ridge_theta").get<double>();
    else
        m.pls = pls_from_json(j.at("pls"));
    m.xi = matrix_from_json(j.at("xi"));
    m.fitted_coef = matrix_from_json(j.at("fitted_coef"));
    return m;
}

// ---------------------------------------------------------------------------
// JSON: experiment configuration
//
// {"rho": [...], "K": [...]} are required; everything else defaults to the
// study's values. Unknown keys are rejected so config typos fail loudly.
// ---------------------------------------------------------------------------

inline json experiment_grid_to_json(const ExperimentGrid& grid) {
    json j;
    j["N"] = grid.base.N;
    j["n_points"] = grid.base.n_points;
    j["h"] = grid.base.h;
    j["mc"] = grid.base.mc;
    j["seed"] = grid.base.seed;
    j["obs_noise_sd"] = grid.base.obs_noise_sd;
    json methods = json::array();
    for (FfrAlgorithm m : grid.base.methods) methods.push_back(algorithm_name(m));
    j["methods"] = std::move(methods);
    j["rho"] = grid.rho_list;
    j["K"] = grid.K_list;
    return j;
}

inline ExperimentGrid experiment_grid_from_json(const json& j) {
    static const std::vector<std::string> known = {"N",    "n_points", "h",   "mc",          "seed",
                                                   "rho",  "K",        "methods", "obs_noise_sd"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("config json: unknown key '" + it.key() + "'");
    }
    ExperimentGrid grid;
    if (j.contains("N")) grid.base.N = j.at("N").get<int>();
    if (j.contains("n_points")) grid.base.n_points = j.at("n_points").get<int>();
    if (j.contains("h")) grid.base.h = j.at("h").get<int>();
    if (j.contains("mc")) grid.base.mc = j.at("mc").get<int>();
    if (j.contains("seed")) grid.base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("obs_noise_sd")) grid.base.obs_noise_sd = j.at("obs_noise_sd").get<double>();
    if (j.contains("methods")) {
        grid.base.methods.clear();
        for (const auto& name : j.at("methods"))
            grid.base.methods.push_back(algorithm_from_name(name.get<std::string>()));
        if (grid.base.methods.empty())
            throw std::invalid_argument("config json: methods must be nonempty");
    }
    grid.rho_list = j.at("rho").get<std::vector<double>>();
    grid.K_list = j.at("K").get<std::vector<int>>();
    if (grid.rho_list.empty() || grid.K_list.empty())
        throw std::invalid_argument("config json: rho and K must be nonempty");
    return grid;
}

inline json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open file: " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

inline void save_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open file for writing: " + path);
    os << content;
    if (!os) throw std::invalid_argument("failed writing file: " + path);
}

}  // namespace fplsr::io
