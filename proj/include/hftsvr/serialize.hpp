#pragma once

// Versioned JSON model files.
//
//   {"format": "hftsvr-model", "version": 1,
//    "checksum": "<fnv1a-64 hex of payload.dump()>", "payload": {...}}
//
// Doubles are written with round-trip precision, so save/load is exact.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hftsvr/error.hpp"
#include "hftsvr/regressor.hpp"

namespace hftsvr {

inline constexpr int kModelSchemaVersion = 1;
inline constexpr const char* kModelFormat = "hftsvr-model";

namespace serial {

using nlohmann::json;

inline std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

inline json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vec(const json& j) {
    const auto raw = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size()));
}

inline json mat(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Matrix mat(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw CorruptModel("matrix size");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
    return m;
}

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> opt(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

inline json to_json(const KernelSpec& k) { return {{"kind", to_string(k.kind)}, {"tau", k.tau}}; }

inline KernelSpec kernel_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const double tau = j.at("tau").get<double>();
    if (kind == "linear") return {KernelKind::linear, tau};
    if (kind == "gaussian") return {KernelKind::gaussian, tau};
    throw CorruptModel("unknown kernel kind '" + kind + "'");
}

inline json to_json(const TsvrParams& p) {
    return {{"p1", p.p1},     {"p2", p.p2},     {"p3", p.p3},
            {"p4", p.p4},     {"eps1", p.eps1}, {"eps2", p.eps2},
            {"kernel", to_json(p.kernel)}};
}

inline TsvrParams tsvr_params_from_json(const json& j) {
    TsvrParams p;
    p.p1 = j.at("p1").get<double>();
    p.p2 = j.at("p2").get<double>();
    p.p3 = j.at("p3").get<double>();
    p.p4 = j.at("p4").get<double>();
    p.eps1 = j.at("eps1").get<double>();
    p.eps2 = j.at("eps2").get<double>();
    p.kernel = kernel_from_json(j.at("kernel"));
    return p;
}

inline json to_json(const TsvrModel& m) {
    const auto& d = m.diagnostics;
    return {{"w1", vec(m.w1)},
            {"w2", vec(m.w2)},
            {"b1", m.b1},
            {"b2", m.b2},
            {"kernel", to_json(m.kernel)},
            {"basis", mat(m.basis)},
            {"input_dim", m.input_dim},
            {"diagnostics",
             {{"alpha", vec(d.alpha)},
              {"gamma", vec(d.gamma)},
              {"slack_down_norm", d.slack_down_norm},
              {"slack_up_norm", d.slack_up_norm},
              {"dual_objective_down", d.dual_objective_down},
              {"dual_objective_up", d.dual_objective_up},
              {"iterations_down", d.iterations_down},
              {"iterations_up", d.iterations_up}}}};
}

inline TsvrModel tsvr_model_from_json(const json& j) {
    TsvrModel m;
    m.w1 = vec(j.at("w1"));
    m.w2 = vec(j.at("w2"));
    m.b1 = j.at("b1").get<double>();
    m.b2 = j.at("b2").get<double>();
    m.kernel = kernel_from_json(j.at("kernel"));
    m.basis = mat(j.at("basis"));
    m.input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.alpha = vec(d.at("alpha"));
    m.diagnostics.gamma = vec(d.at("gamma"));
    m.diagnostics.slack_down_norm = d.at("slack_down_norm").get<double>();
    m.diagnostics.slack_up_norm = d.at("slack_up_norm").get<double>();
    m.diagnostics.dual_objective_down = d.at("dual_objective_down").get<double>();
    m.diagnostics.dual_objective_up = d.at("dual_objective_up").get<double>();
    m.diagnostics.iterations_down = d.at("iterations_down").get<int>();
    m.diagnostics.iterations_up = d.at("iterations_up").get<int>();
    const auto expected_w = m.kernel.kind == KernelKind::linear ? m.input_dim : m.basis.rows();
    if (m.w1.size() != expected_w || m.w2.size() != expected_w) {
        throw CorruptModel("coefficient length does not match model shape");
    }
    return m;
}

inline json to_json(const HierarchyConfig& c) {
    return {{"max_layers", c.max_layers},
            {"tau1", opt(c.tau1)},
            {"tau1_factor", c.tau1_factor},
            {"scale_divisor", c.scale_divisor},
            {"s_factor", c.s_factor},
            {"eps", c.eps},
            {"tube_tolerance", opt(c.tube_tolerance)},
            {"stop_residual_var", opt(c.stop_residual_var)},
            {"stop_rel_improvement", c.stop_rel_improvement},
            {"base_params", to_json(c.base_params)},
            {"pruning_enabled", c.pruning_enabled},
            {"min_pruned_fraction", c.min_pruned_fraction},
            {"rescale_second_pass_regularization", c.rescale_second_pass_regularization}};
}

inline HierarchyConfig hierarchy_config_from_json(const json& j) {
    HierarchyConfig c;
    c.max_layers = j.at("max_layers").get<std::size_t>();
    c.tau1 = opt(j.at("tau1"));
    c.tau1_factor = j.at("tau1_factor").get<double>();
    c.scale_divisor = j.at("scale_divisor").get<double>();
    c.s_factor = j.at("s_factor").get<double>();
    c.eps = j.at("eps").get<double>();
    c.tube_tolerance = opt(j.at("tube_tolerance"));
    c.stop_residual_var = opt(j.at("stop_residual_var"));
    c.stop_rel_improvement = j.at("stop_rel_improvement").get<double>();
    c.base_params = tsvr_params_from_json(j.at("base_params"));
    c.pruning_enabled = j.at("pruning_enabled").get<bool>();
    c.min_pruned_fraction = j.at("min_pruned_fraction").get<double>();
    c.rescale_second_pass_regularization =
        j.at("rescale_second_pass_regularization").get<bool>();
    return c;
}

inline StopReason stop_reason_from_string(const std::string& s) {
    for (auto r : {StopReason::max_layers, StopReason::residual_variance,
                   StopReason::small_improvement, StopReason::zero_variance}) {
        if (s == to_string(r)) return r;
    }
    throw CorruptModel("unknown stop reason '" + s + "'");
}

inline json to_json(const HfTsvrModel& m) {
    json layers = json::array();
    for (const auto& l : m.layers) {
        layers.push_back({{"index", l.index},
                          {"tau", l.tau},
                          {"b_v", l.b_v},
                          {"b_v_prime", l.b_v_prime},
                          {"model", to_json(l.model)},
                          {"pruned_indices", l.pruned_indices},
                          {"second_pass", l.second_pass},
                          {"residual_variance_in", l.residual_variance_in}});
    }
    json reports = json::array();
    for (const auto& r : m.training_report.layers) {
        reports.push_back({{"residual_variance_in", r.residual_variance_in},
                           {"residual_variance_out", r.residual_variance_out},
                           {"first_pass_residual_variance", r.first_pass_residual_variance},
                           {"sv_count_first", r.sv_count_first},
                           {"sv_count_final", r.sv_count_final},
                           {"full_size", r.full_size},
                           {"pruned_size", r.pruned_size},
                           {"seconds", r.seconds}});
    }
    const auto& rep = m.training_report;
    return {{"layers", layers},
            {"config", to_json(m.config)},
            {"input_dim", m.input_dim},
            {"training_report",
             {{"layers", reports},
              {"final_residuals", vec(rep.final_residuals)},
              {"stop_reason", to_string(rep.stop_reason)},
              {"resolved_tau1", rep.resolved_tau1},
              {"resolved_stop_var", rep.resolved_stop_var},
              {"rejected_layers", rep.rejected_layers}}}};
}

inline HfTsvrModel hierarchy_model_from_json(const json& j) {
    HfTsvrModel m;
    for (const auto& l : j.at("layers")) {
        LayerState s;
        s.index = l.at("index").get<std::size_t>();
        s.tau = l.at("tau").get<double>();
        s.b_v = l.at("b_v").get<double>();
        s.b_v_prime = l.at("b_v_prime").get<double>();
        s.model = tsvr_model_from_json(l.at("model"));
        s.pruned_indices = l.at("pruned_indices").get<std::vector<std::size_t>>();
        s.second_pass = l.at("second_pass").get<bool>();
        s.residual_variance_in = l.at("residual_variance_in").get<double>();
        m.layers.push_back(std::move(s));
    }
    m.config = hierarchy_config_from_json(j.at("config"));
    m.input_dim = j.at("input_dim").get<Eigen::Index>();
    const auto& rep = j.at("training_report");
    for (const auto& r : rep.at("layers")) {
        LayerReport lr;
        lr.residual_variance_in = r.at("residual_variance_in").get<double>();
        lr.residual_variance_out = r.at("residual_variance_out").get<double>();
        lr.first_pass_residual_variance = r.at("first_pass_residual_variance").get<double>();
        lr.sv_count_first = r.at("sv_count_first").get<std::size_t>();
        lr.sv_count_final = r.at("sv_count_final").get<std::size_t>();
        lr.full_size = r.at("full_size").get<std::size_t>();
        lr.pruned_size = r.at("pruned_size").get<std::size_t>();
        lr.seconds = r.at("seconds").get<double>();
        m.training_report.layers.push_back(lr);
    }
    m.training_report.final_residuals = vec(rep.at("final_residuals"));
    m.training_report.stop_reason = stop_reason_from_string(rep.at("stop_reason").get<std::string>());
    m.training_report.resolved_tau1 = rep.at("resolved_tau1").get<double>();
    m.training_report.resolved_stop_var = rep.at("resolved_stop_var").get<double>();
    m.training_report.rejected_layers = rep.at("rejected_layers").get<std::size_t>();
    for (const auto& l : m.layers) {
        if (l.model.input_dim != m.input_dim) throw CorruptModel("layer dimension mismatch");
    }
    return m;
}

inline json payload(const FittedModel& m) {
    json model = std::visit([](const auto& inner) { return to_json(inner); }, m.model);
    return {{"kind", to_string(m.kind)}, {"model", std::move(model)}};
}

inline FittedModel from_payload(const json& p) {
    FittedModel out;
    out.kind = regressor_kind_from_string(p.at("kind").get<std::string>());
    if (out.kind == RegressorKind::hftsvr) {
        out.model = hierarchy_model_from_json(p.at("model"));
    } else {
        out.model = tsvr_model_from_json(p.at("model"));
    }
    return out;
}

}  // namespace serial

inline std::string serialize_model(const FittedModel& model) {
    const auto body = serial::payload(model);
    const serial::json doc = {{"format", kModelFormat},
                              {"version", kModelSchemaVersion},
                              {"checksum", serial::fnv1a64(body.dump())},
                              {"payload", body}};
    return doc.dump(1) + "\n";
}

inline FittedModel deserialize_model(const std::string& text) {
    serial::json doc;
    try {
        doc = serial::json::parse(text);
    } catch (const serial::json::parse_error& e) {
        throw CorruptModel(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", "") != kModelFormat) {
            throw CorruptModel("not a model file");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelSchemaVersion) {
            throw SchemaVersionMismatch("model schema version " + std::to_string(version) +
                                        ", expected " + std::to_string(kModelSchemaVersion));
        }
        const auto& body = doc.at("payload");
        if (serial::fnv1a64(body.dump()) != doc.at("checksum").get<std::string>()) {
            throw CorruptModel("model checksum mismatch");
        }
        return serial::from_payload(body);
    } catch (const serial::json::exception& e) {
        throw CorruptModel(std::string("malformed model file: ") + e.what());
    }
}

inline void save_model(const FittedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << serialize_model(model);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline FittedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

}  // namespace hftsvr
