#pragma once

// Plain-text configuration: one `key = value` per line, grouped in
// [sections] whose keys mirror the struct field names.
//
//   [tsvr]         p1 p2 p3 p4 eps1 eps2 kernel tau
//   [hierarchy]    max_layers tau1 tau1_factor scale_divisor s_factor eps
//                  tube_tolerance stop_residual_var stop_rel_improvement
//                  pruning_enabled min_pruned_fraction
//                  rescale_second_pass_regularization
//   [base_params]  p3 p4            (hierarchy layer template)
//   [grid]         exponent_lo exponent_hi tie_p12 tie_p34 tie_eps objective
//                  tuning_fraction folds eps_exponent_lo eps_exponent_hi
//                  s_values hierarchy_exponent_stride
//   [suite]        datasets regressors seeds base_seed output
//
// Unknown keys are rejected so typos do not pass silently.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hftsvr/error.hpp"
#include "hftsvr/hierarchy.hpp"
#include "hftsvr/tsvr.hpp"

namespace hftsvr::config {

using Tree = boost::property_tree::ptree;

inline Tree parse(std::istream& in) {
    Tree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return tree;
}

inline Tree parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

inline Tree load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    return parse(in);
}

namespace detail {

inline void check_keys(const Tree& section, const std::string& name,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : section) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw InvalidArgument("config: unknown key '" + key + "' in [" + name + "]");
        }
    }
}

template <class T>
void read(const Tree& section, const char* key, T& out) {
    if (auto v = section.get_optional<std::string>(key)) {
        try {
            out = section.get<T>(key);
        } catch (const boost::property_tree::ptree_bad_data&) {
            throw InvalidArgument(std::string("config: bad value for '") + key + "': '" + *v + "'");
        }
    }
}

inline void read_bool(const Tree& section, const char* key, bool& out) {
    if (auto v = section.get_optional<std::string>(key)) {
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") out = true;
        else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") out = false;
        else throw InvalidArgument(std::string("config: bad boolean for '") + key + "'");
    }
}

inline void read_optional_auto(const Tree& section, const char* key, std::optional<double>& out) {
    if (auto v = section.get_optional<std::string>(key)) {
        if (*v == "auto" || v->empty()) {
            out.reset();
        } else {
            double d = 0.0;
            read(section, key, d);
            out = d;
        }
    }
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace detail

inline KernelSpec kernel_from_string(const std::string& s, double tau) {
    if (s == "linear") return KernelSpec::linear();
    if (s == "gaussian") return KernelSpec::gaussian(tau);
    throw InvalidArgument("config: unknown kernel '" + s + "'");
}

/// Reads [tsvr] over the given defaults.
inline TsvrParams read_tsvr_params(const Tree& tree, TsvrParams params = {}) {
    const auto section = tree.get_child_optional("tsvr");
    if (!section) return params;
    detail::check_keys(*section, "tsvr", {"p1", "p2", "p3", "p4", "eps1", "eps2", "kernel", "tau"});
    detail::read(*section, "p1", params.p1);
    detail::read(*section, "p2", params.p2);
    detail::read(*section, "p3", params.p3);
    detail::read(*section, "p4", params.p4);
    detail::read(*section, "eps1", params.eps1);
    detail::read(*section, "eps2", params.eps2);
    double tau = params.kernel.tau;
    detail::read(*section, "tau", tau);
    std::string kernel = to_string(params.kernel.kind);
    detail::read(*section, "kernel", kernel);
    params.kernel = kernel_from_string(kernel, tau);
    params.validate();
    return params;
}

/// Reads [hierarchy] and [base_params] over the given defaults.
inline HierarchyConfig read_hierarchy_config(const Tree& tree, HierarchyConfig cfg = {}) {
    if (const auto section = tree.get_child_optional("hierarchy")) {
        detail::check_keys(*section, "hierarchy",
                           {"max_layers", "tau1", "tau1_factor", "scale_divisor", "s_factor", "eps",
                            "tube_tolerance", "stop_residual_var", "stop_rel_improvement",
                            "pruning_enabled", "min_pruned_fraction",
                            "rescale_second_pass_regularization"});
        detail::read(*section, "max_layers", cfg.max_layers);
        detail::read_optional_auto(*section, "tau1", cfg.tau1);
        detail::read(*section, "tau1_factor", cfg.tau1_factor);
        detail::read(*section, "scale_divisor", cfg.scale_divisor);
        detail::read(*section, "s_factor", cfg.s_factor);
        detail::read(*section, "eps", cfg.eps);
        detail::read_optional_auto(*section, "tube_tolerance", cfg.tube_tolerance);
        detail::read_optional_auto(*section, "stop_residual_var", cfg.stop_residual_var);
        detail::read(*section, "stop_rel_improvement", cfg.stop_rel_improvement);
        detail::read_bool(*section, "pruning_enabled", cfg.pruning_enabled);
        detail::read(*section, "min_pruned_fraction", cfg.min_pruned_fraction);
        detail::read_bool(*section, "rescale_second_pass_regularization",
                          cfg.rescale_second_pass_regularization);
    }
    if (const auto section = tree.get_child_optional("base_params")) {
        detail::check_keys(*section, "base_params", {"p3", "p4"});
        detail::read(*section, "p3", cfg.base_params.p3);
        detail::read(*section, "p4", cfg.base_params.p4);
    }
    cfg.validate();
    return cfg;
}

}  // namespace hftsvr::config
