#pragma once

// Serialization: graphon and ensemble JSON, the GSPC binary sample format, and
// CSV writers for curves and spectra.
//
// GSPC layout (little-endian): "GSPC", u32 version, u64 n, u64 m, then the
// (n + m) x (n + m) normalized matrix as row-major f64. W-random samples append
// their n latent coordinates as f64. For non-Gram samples m = 0.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "homdensity.hpp"
#include "models.hpp"
#include "qve.hpp"
#include "spectra.hpp"

namespace graphon_spectra {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Matrices and vectors

inline json to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a non-empty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(what + " must contain only numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(what + " must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(what + " rows must all have the same length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw ConfigError(what + " must contain only numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Graphons

inline json to_json(const StepGraphon& w) {
    json j = {{"kind", "step"}, {"fractions", to_json(w.fractions())}, {"weights", to_json(w.weights())}};
    if (w.sign() == KernelSign::Signed) j["signed"] = true;
    return j;
}

inline json to_json(const AnalyticGraphon& g) {
    switch (g.kind()) {
        case AnalyticGraphon::Kind::Step: return to_json(*g.step_graphon());
        case AnalyticGraphon::Kind::Constant: return {{"kind", "constant"}, {"value", g.scale()}};
        default: return {{"kind", "analytic"}, {"name", g.name()}, {"scale", g.scale()}};
    }
}

/// Accepts {"kind":"step",...}, {"kind":"constant","value":c} and
/// {"kind":"analytic","name":"product|min|max","scale":c}.
inline AnalyticGraphon graphon_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("graphon JSON needs a string field 'kind'");
    }
    const std::string kind = j["kind"];
    try {
        if (kind == "step") {
            if (!j.contains("fractions") || !j.contains("weights")) {
                throw ConfigError("step graphon needs 'fractions' and 'weights'");
            }
            const bool is_signed = j.value("signed", false);
            return AnalyticGraphon::step(StepGraphon(vector_from_json(j["fractions"], "fractions"),
                                                     matrix_from_json(j["weights"], "weights"),
                                                     is_signed ? KernelSign::Signed : KernelSign::NonNegative));
        }
        if (kind == "constant") {
            if (!j.contains("value") || !j["value"].is_number()) throw ConfigError("constant graphon needs 'value'");
            return AnalyticGraphon::constant(j["value"].get<double>());
        }
        if (kind == "analytic") {
            const std::string name = j.value("name", "");
            const double scale = j.value("scale", 1.0);
            if (name == "product") return AnalyticGraphon::product(scale);
            if (name == "min") return AnalyticGraphon::min(scale);
            if (name == "max") return AnalyticGraphon::max(scale);
            if (name == "constant") return AnalyticGraphon::constant(scale);
            throw ConfigError("unknown analytic graphon '" + name + "' (expected product, min, max or constant)");
        }
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid graphon: ") + e.what());
    }
    throw ConfigError("unknown graphon kind '" + kind + "'");
}

/// Step form of a graphon JSON: exact for step/constant, midpoint refinement otherwise.
inline StepGraphon step_graphon_from_json(const json& j, std::size_t panels = 256) {
    const std::size_t p = j.is_object() && j.contains("panels") ? j["panels"].get<std::size_t>() : panels;
    return graphon_from_json(j).refine(p);
}

inline json read_json_file(const std::string& path, const std::string& what = "file") {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + what + " '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + what + " '" + path + "': " + e.what());
    }
}

inline AnalyticGraphon load_graphon(const std::string& path) {
    return graphon_from_json(read_json_file(path, "graphon file"));
}

// ---------------------------------------------------------------------------
// Ensemble specs

inline json to_json(const EnsembleSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["n"] = s.n;
    if (s.kind == EnsembleKind::Gram) j["m"] = s.m;
    if (s.profile) j["profile"] = to_json(*s.profile);
    if (s.graphon) j["graphon"] = to_json(*s.graphon);
    if (s.gram_profile) {
        j["gram_profile"] = {{"left", to_json(s.gram_profile->left)},
                             {"right", to_json(s.gram_profile->right)},
                             {"weights", to_json(s.gram_profile->weights)}};
    }
    if (!s.sizes.empty()) j["sizes"] = s.sizes;
    if (s.block_weights.size() > 0) j["block_weights"] = to_json(s.block_weights);
    const bool continuous = s.kind == EnsembleKind::WignerType || s.kind == EnsembleKind::GeneralizedWigner ||
                            s.kind == EnsembleKind::BlockMatrix || s.kind == EnsembleKind::Gram;
    if (continuous) j["dist"] = to_string(s.dist);
    if (s.kind == EnsembleKind::WRandomGraph) j["sparsity"] = s.sparsity;
    j["seed"] = s.seed;
    return j;
}

inline EnsembleSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("ensemble spec must be a JSON object");
    EnsembleSpec s;
    try {
        s.kind = parse_ensemble_kind(j.value("kind", std::string("wigner-type")));
        s.n = j.value("n", std::size_t{0});
        s.m = j.value("m", std::size_t{0});
        if (j.contains("profile")) s.profile = step_graphon_from_json(j["profile"]);
        if (j.contains("graphon")) s.graphon = graphon_from_json(j["graphon"]);
        if (j.contains("gram_profile")) {
            const json& g = j["gram_profile"];
            s.gram_profile = GramProfile{vector_from_json(g.at("left"), "gram_profile.left"),
                                         vector_from_json(g.at("right"), "gram_profile.right"),
                                         matrix_from_json(g.at("weights"), "gram_profile.weights")};
        }
        if (j.contains("sizes")) s.sizes = j["sizes"].get<std::vector<std::size_t>>();
        if (j.contains("block_weights")) s.block_weights = matrix_from_json(j["block_weights"], "block_weights");
        if (j.contains("dist")) s.dist = parse_entry_dist(j["dist"].get<std::string>());
        s.sparsity = j.value("sparsity", 1.0);
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid ensemble spec: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid ensemble spec: ") + e.what());
    }
    if (s.n == 0 && s.sizes.empty()) throw ConfigError("ensemble spec needs n >= 1");
    if (s.n == 0) {
        for (std::size_t b : s.sizes) s.n += b;
    }
    return s;
}

// ---------------------------------------------------------------------------
// GSPC binary samples

inline constexpr char kSampleMagic[4] = {'G', 'S', 'P', 'C'};
inline constexpr std::uint32_t kSampleVersion = 1;

struct SampleFile {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    Eigen::MatrixXd matrix;
    std::vector<double> latent;
};

namespace detail {

template <class T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in, const std::string& path) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw ValidationError("truncated sample file '" + path + "'");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace detail

inline void write_sample(std::ostream& out, const EnsembleSample& s) {
    out.write(kSampleMagic, 4);
    detail::write_le<std::uint32_t>(out, kSampleVersion);
    const std::uint64_t m = s.spec.kind == EnsembleKind::Gram ? s.spec.m : 0;
    const std::uint64_t n = static_cast<std::uint64_t>(s.matrix.rows()) - m;
    detail::write_le<std::uint64_t>(out, n);
    detail::write_le<std::uint64_t>(out, m);
    for (Eigen::Index i = 0; i < s.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.matrix.cols(); ++j) detail::write_le<double>(out, s.matrix(i, j));
    }
    for (double x : s.latent) detail::write_le<double>(out, x);
}

inline void write_sample(const std::string& path, const EnsembleSample& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write sample file '" + path + "'");
    write_sample(out, s);
    if (!out) throw ConfigError("failed writing sample file '" + path + "'");
}

inline SampleFile read_sample(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open sample file '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kSampleMagic, 4) != 0) {
        throw ValidationError("'" + path + "' is not a GSPC sample file");
    }
    const auto version = detail::read_le<std::uint32_t>(in, path);
    if (version != kSampleVersion) {
        throw ValidationError("unsupported GSPC version " + std::to_string(version) + " in '" + path + "'");
    }
    SampleFile f;
    f.n = detail::read_le<std::uint64_t>(in, path);
    f.m = detail::read_le<std::uint64_t>(in, path);
    const std::uint64_t dim = f.n + f.m;
    if (dim > kDefaultDenseCap) throw SizeError("sample dimension exceeds the dense cap");
    const auto d = static_cast<Eigen::Index>(dim);
    f.matrix.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) f.matrix(i, j) = detail::read_le<double>(in, path);
    }
    // trailing latent coordinates, if any
    std::vector<double> rest;
    double x;
    while (in.peek() != std::char_traits<char>::eof()) {
        x = detail::read_le<double>(in, path);
        rest.push_back(x);
    }
    if (!rest.empty() && rest.size() != f.n) {
        throw ValidationError("sample file '" + path + "' has " + std::to_string(rest.size()) +
                              " trailing values; expected 0 or n latent coordinates");
    }
    f.latent = std::move(rest);
    return f;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline void write_moments_csv(std::ostream& out, const MomentTable& t) {
    out << "order,value,source\n";
    for (const auto& [k, v] : t.entries) out << k << ',' << format_double(v) << ',' << to_string(t.source) << '\n';
}

inline void write_density_csv(std::ostream& out, const DensityCurve& c) {
    out << "E,rho\n";
    for (const auto& p : c.points) out << format_double(p.energy) << ',' << format_double(p.rho) << '\n';
}

inline void write_eigenvalues_csv(std::ostream& out, const Spectrum& sp) {
    out << "index,eigenvalue\n";
    for (std::size_t i = 0; i < sp.size(); ++i) out << i << ',' << format_double(sp.eigenvalues[i]) << '\n';
}

}  // namespace graphon_spectra
