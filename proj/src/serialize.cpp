// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/serialize.hpp"

namespace cchan {
namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

const json& require(const json& j, const char* key, const std::string& context) {
    if (!j.is_object() || !j.contains(key)) {
        parse_error(context + ": missing field \"" + key + "\"");
    }
    return j.at(key);
}

double require_number(const json& j, const char* key, const std::string& context) {
    const json& v = require(j, key, context);
    if (!v.is_number()) parse_error(context + ": field \"" + key + "\" must be a number");
    return v.get<double>();
}

void check_n(const Matrix& m, int n, const std::string& field) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        parse_error(field + ": expected a square matrix of even dimension, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (n > 0 && m.rows() != 2 * n) {
        parse_error(field + ": expected dimension " + std::to_string(2 * n) + ", got " +
                    std::to_string(m.rows()));
    }
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) parse_error(field + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) parse_error(field + ": row 0 is not a non-empty array");
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            parse_error(field + ": row " + std::to_string(r) + " has the wrong length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j[r][c];
            cplx v;
            if (e.is_number()) {
                v = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                v = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                parse_error(field + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                            ") must be a number or a [re, im] pair");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return m;
}

json bc_to_json(const BoundaryCondition& bc) {
    json j;
    j["n"] = bc.n();
    switch (bc.kind()) {
        case FormKind::AB: {
            const auto& f = std::get<ABForm>(bc.form());
            j["form"] = "ab";
            j["A"] = matrix_to_json(f.A());
            j["B"] = matrix_to_json(f.B());
            break;
        }
        case FormKind::U: {
            j["form"] = "u";
            j["U"] = matrix_to_json(std::get<UForm>(bc.form()).U());
            break;
        }
        case FormKind::LM: {
            const auto& f = std::get<LMForm>(bc.form());
            j["form"] = "lm";
            j["L"] = matrix_to_json(f.L());
            j["M"] = matrix_to_json(f.M());
            break;
        }
        case FormKind::Transfer: {
            const auto& f = std::get<TransferForm>(bc.form());
            j["form"] = "transfer";
            j["C11"] = matrix_to_json(f.C11());
            j["C12"] = matrix_to_json(f.C12());
            j["C21"] = matrix_to_json(f.C21());
            j["C22"] = matrix_to_json(f.C22());
            break;
        }
    }
    return j;
}

BoundaryCondition bc_from_json(const json& j, int n, const Tolerances& tol) {
    const std::string ctx = "bc";
    const json& form_j = require(j, "form", ctx);
    if (!form_j.is_string()) parse_error("bc: \"form\" must be a string");
    const std::string form = form_j.get<std::string>();
    if (j.contains("n") && n > 0 && (!j["n"].is_number_integer() || j["n"].get<int>() != n)) {
        parse_error("bc: \"n\" disagrees with the system channel count");
    }

    if (form == "ab") {
        const Matrix a = matrix_from_json(require(j, "A", ctx), "bc.A");
        const Matrix b = matrix_from_json(require(j, "B", ctx), "bc.B");
        check_n(a, n, "bc.A");
        check_n(b, n, "bc.B");
        return validate_ab(a, b, tol);
    }
    if (form == "u") {
        const Matrix u = matrix_from_json(require(j, "U", ctx), "bc.U");
        check_n(u, n, "bc.U");
        return validate_u(u, tol);
    }
    if (form == "lm") {
        const Matrix l = matrix_from_json(require(j, "L", ctx), "bc.L");
        const Matrix m = matrix_from_json(require(j, "M", ctx), "bc.M");
        check_n(l, n, "bc.L");
        check_n(m, n, "bc.M");
        return validate_lm(l, m, tol);
    }
    if (form == "transfer") {
        std::array<Matrix, 4> c;
        const char* names[] = {"C11", "C12", "C21", "C22"};
        for (int i = 0; i < 4; ++i) {
            c[static_cast<std::size_t>(i)] =
                matrix_from_json(require(j, names[i], ctx), std::string("bc.") + names[i]);
            const Matrix& ci = c[static_cast<std::size_t>(i)];
            if (ci.rows() != ci.cols() || (n > 0 && ci.rows() != n)) {
                parse_error(std::string("bc.") + names[i] + ": expected an n x n block");
            }
        }
        return validate_transfer(c[0], c[1], c[2], c[3], tol);
    }
    if (form == "coupling") {
        if (n < 1) parse_error("bc: couplings need the channel count n");
        const json& type_j = require(j, "type", ctx);
        if (!type_j.is_string()) parse_error("bc: \"type\" must be a string");
        const std::string type = type_j.get<std::string>();
        if (type == "kirchhoff") return make_coupling(CouplingSpec::kirchhoff(), n);
        if (type == "delta") {
            return make_coupling(CouplingSpec::delta(require_number(j, "alpha", ctx)), n);
        }
        if (type == "delta_p") {
            return make_coupling(CouplingSpec::delta_p(require_number(j, "alpha", ctx)), n);
        }
        if (type == "delta_prime_s") {
            return make_coupling(CouplingSpec::delta_prime_s(require_number(j, "beta", ctx)), n);
        }
        if (type == "delta_prime") {
            return make_coupling(CouplingSpec::delta_prime(require_number(j, "beta", ctx)), n);
        }
        if (type == "matrix_delta") {
            const Matrix s = matrix_from_json(require(j, "strength", ctx), "bc.strength");
            if (s.rows() != n || s.cols() != n) parse_error("bc.strength: expected an n x n matrix");
            return make_matrix_delta(s, tol);
        }
        parse_error("bc: unknown coupling type \"" + type + "\"");
    }
    parse_error("bc: unknown form \"" + form + "\"");
}

json reduction_to_json(const ReductionResult& r) {
    json j;
    j["theta"] = matrix_to_json(r.theta);
    json channels = json::array();
    for (std::size_t p = 0; p < r.blocks.size(); ++p) {
        for (std::size_t s = 0; s < r.blocks[p].size(); ++s) {
            channels.push_back({{"q", r.q[p]},
                                {"s", s},
                                {"lambda", matrix_to_json(Matrix(r.blocks[p][s]))}});
        }
    }
    j["channels"] = std::move(channels);
    j["max_offdiag_residual"] = r.max_offdiag_residual;
    j["borderline"] = r.borderline;
    return j;
}

}  // namespace cchan
