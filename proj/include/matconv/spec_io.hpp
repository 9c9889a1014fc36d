#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "matconv/oracle.hpp"
#include "matconv/subgrad.hpp"

namespace matconv {

using nlohmann::json;

namespace io_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw ParseError(msg, path);
}

inline const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, "missing key '" + key + "'");
    return *it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

inline std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::vector<std::vector<double>> rows(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    std::vector<std::vector<double>> r;
    r.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        r.push_back(vector(j[i], path + "[" + std::to_string(i) + "]"));
    return r;
}

/// Rebuilding a domain value can throw library errors; surface them as parse
/// errors tagged with the document location.
template <typename Fn>
auto guarded(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

inline SymMat sym_mat(const json& j, const std::string& path) {
    return guarded(path, [&] { return SymMat::from_rows(rows(j, path)); });
}

inline DenseMat dense_mat(const json& j, const std::string& path) {
    return guarded(path, [&] { return DenseMat::from_rows(rows(j, path)); });
}

inline ScalarAtom parse_atom(const json& j, const std::string& path) {
    const std::string kind = text(member(j, path, "atom"), path + ".atom");
    if (kind == "abs_coord") {
        const int index = integer(member(j, path, "index"), path + ".index");
        const int dim = integer(member(j, path, "dim"), path + ".dim");
        return guarded(path, [&] { return ScalarAtom(AbsCoordAtom(index, dim)); });
    }
    if (kind == "affine_scalar") {
        std::vector<double> coeffs = vector(member(j, path, "coeffs"), path + ".coeffs");
        const double offset = number(member(j, path, "offset"), path + ".offset");
        return guarded(path,
                       [&] { return ScalarAtom(AffineScalarAtom(std::move(coeffs), offset)); });
    }
    if (kind == "max_affine") {
        const json& pj = member(j, path, "pieces");
        if (!pj.is_array() || pj.empty()) fail(path + ".pieces", "expected a nonempty array");
        std::vector<MaxAffineAtom::Piece> pieces;
        for (std::size_t k = 0; k < pj.size(); ++k) {
            const std::string pp = path + ".pieces[" + std::to_string(k) + "]";
            MaxAffineAtom::Piece piece;
            piece.coeffs = vector(member(pj[k], pp, "coeffs"), pp + ".coeffs");
            piece.offset = number(member(pj[k], pp, "offset"), pp + ".offset");
            pieces.push_back(std::move(piece));
        }
        return guarded(path, [&] { return ScalarAtom(MaxAffineAtom(std::move(pieces))); });
    }
    fail(path + ".atom", "unknown atom kind '" + kind + "'");
}

inline json atom_to_json(const ScalarAtom& atom) {
    return std::visit(
        [](const auto& a) -> json {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineScalarAtom>) {
                return {{"atom", "affine_scalar"}, {"coeffs", a.coeffs}, {"offset", a.offset}};
            } else if constexpr (std::is_same_v<T, AbsCoordAtom>) {
                return {{"atom", "abs_coord"}, {"index", a.index}, {"dim", a.dim}};
            } else {
                json pieces = json::array();
                for (const auto& p : a.pieces)
                    pieces.push_back({{"coeffs", p.coeffs}, {"offset", p.offset}});
                return {{"atom", "max_affine"}, {"pieces", std::move(pieces)}};
            }
        },
        atom);
}

inline ExprPtr parse_node(const json& j, const std::string& path) {
    const std::string op = text(member(j, path, "op"), path + ".op");
    auto fold = [&](const char* key, ExprPtr (*combine)(ExprPtr, ExprPtr)) {
        const json& tj = member(j, path, key);
        const std::string tpath = path + "." + key;
        if (!tj.is_array() || tj.size() < 2) fail(tpath, "expected an array of at least two nodes");
        ExprPtr acc = parse_node(tj[0], tpath + "[0]");
        for (std::size_t k = 1; k < tj.size(); ++k) {
            ExprPtr next = parse_node(tj[k], tpath + "[" + std::to_string(k) + "]");
            acc = guarded(tpath, [&] { return combine(std::move(acc), std::move(next)); });
        }
        return acc;
    };

    if (op == "const") {
        SymMat value = sym_mat(member(j, path, "matrix"), path + ".matrix");
        const int d = integer(member(j, path, "d"), path + ".d");
        return guarded(path, [&] { return mk_const(std::move(value), d); });
    }
    if (op == "affine") {
        const json& cj = member(j, path, "coeffs");
        const std::string cpath = path + ".coeffs";
        if (!cj.is_array() || cj.empty()) fail(cpath, "expected a nonempty array of matrices");
        std::vector<SymMat> coeffs;
        for (std::size_t k = 0; k < cj.size(); ++k)
            coeffs.push_back(sym_mat(cj[k], cpath + "[" + std::to_string(k) + "]"));
        SymMat offset = sym_mat(member(j, path, "offset"), path + ".offset");
        return guarded(path,
                       [&] { return mk_affine(MatTuple(std::move(coeffs)), std::move(offset)); });
    }
    if (op == "lift") {
        ScalarAtom atom = parse_atom(member(j, path, "atom"), path + ".atom");
        SymMat shape = sym_mat(member(j, path, "matrix"), path + ".matrix");
        return guarded(path, [&] { return mk_lift(std::move(atom), std::move(shape)); });
    }
    if (op == "sum") return fold("terms", &mk_sum);
    if (op == "scale") {
        const double alpha = number(member(j, path, "alpha"), path + ".alpha");
        ExprPtr child = parse_node(member(j, path, "arg"), path + ".arg");
        return guarded(path, [&] { return mk_scale(alpha, std::move(child)); });
    }
    if (op == "congruence") {
        DenseMat m = dense_mat(member(j, path, "matrix"), path + ".matrix");
        ExprPtr child = parse_node(member(j, path, "arg"), path + ".arg");
        return guarded(path, [&] { return mk_congruence(std::move(m), std::move(child)); });
    }
    if (op == "hadamard") {
        SymMat mask = sym_mat(member(j, path, "matrix"), path + ".matrix");
        ExprPtr child = parse_node(member(j, path, "arg"), path + ".arg");
        return guarded(path, [&] { return mk_hadamard(std::move(mask), std::move(child)); });
    }
    if (op == "precompose") {
        DenseMat a = dense_mat(member(j, path, "matrix"), path + ".matrix");
        std::vector<double> b = vector(member(j, path, "offset"), path + ".offset");
        ExprPtr child = parse_node(member(j, path, "arg"), path + ".arg");
        return guarded(path,
                       [&] { return mk_precompose(std::move(child), std::move(a), std::move(b)); });
    }
    if (op == "blockdiag") return fold("blocks", &mk_block_diag);
    if (op == "double") {
        ExprPtr child = parse_node(member(j, path, "arg"), path + ".arg");
        return guarded(path, [&] { return mk_double(std::move(child)); });
    }
    fail(path + ".op", "unknown op '" + op + "'");
}

}  // namespace io_detail

inline json to_json(const SymMat& m) { return json(m.to_rows()); }

inline json to_json(const MatTuple& t) {
    json arr = json::array();
    for (int i = 0; i < t.count(); ++i) arr.push_back(to_json(t[i]));
    return arr;
}

inline json to_json(const Interval1D& iv) {
    return {{"left", to_json(iv.left)}, {"right", to_json(iv.right)}};
}

inline json to_json(const ProvenanceNode& p) {
    json node = {{"rule", p.rule}};
    if (!p.note.empty()) node["note"] = p.note;
    if (!p.children.empty()) {
        json kids = json::array();
        for (const ProvenanceNode& c : p.children) kids.push_back(to_json(c));
        node["children"] = std::move(kids);
    }
    return node;
}

inline json to_json(const Witness& w) {
    json node = {{"y", w.y}, {"z", w.z}, {"margin", w.margin}};
    if (w.direction) node["direction"] = *w.direction;
    if (w.t) node["t"] = *w.t;
    return node;
}

inline json to_json(const Verdict& v) {
    json node = {{"outcome", outcome_name(v.outcome)}, {"samples", v.samples}, {"seed", v.seed}};
    if (v.witness) node["witness"] = to_json(*v.witness);
    return node;
}

inline json to_json(const ConvexityWitness& w) {
    return {{"x1", w.x1}, {"x2", w.x2}, {"alpha", w.alpha}, {"z", w.z}, {"violation", w.violation}};
}

/// Serializes an expression into the version-1 function-spec document.
inline json serialize_node(const ConvexMatrixExpr& f) {
    return std::visit(
        [&](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ConstNode>) {
                return {{"op", "const"}, {"matrix", to_json(n.value)}, {"d", n.input_dim}};
            } else if constexpr (std::is_same_v<T, AffineNode>) {
                json coeffs = json::array();
                for (int i = 0; i < n.coeffs.count(); ++i) coeffs.push_back(to_json(n.coeffs[i]));
                return {{"op", "affine"}, {"coeffs", std::move(coeffs)}, {"offset", to_json(n.offset)}};
            } else if constexpr (std::is_same_v<T, LiftNode>) {
                return {{"op", "lift"},
                        {"atom", io_detail::atom_to_json(n.atom)},
                        {"matrix", to_json(n.shape)}};
            } else if constexpr (std::is_same_v<T, SumNode>) {
                return {{"op", "sum"}, {"terms", json::array({serialize_node(*n.lhs), serialize_node(*n.rhs)})}};
            } else if constexpr (std::is_same_v<T, ScaleNode>) {
                return {{"op", "scale"}, {"alpha", n.alpha}, {"arg", serialize_node(*n.child)}};
            } else if constexpr (std::is_same_v<T, CongruenceNode>) {
                return {{"op", "congruence"},
                        {"matrix", n.m.to_rows()},
                        {"arg", serialize_node(*n.child)}};
            } else if constexpr (std::is_same_v<T, HadamardNode>) {
                return {{"op", "hadamard"},
                        {"matrix", to_json(n.mask)},
                        {"arg", serialize_node(*n.child)}};
            } else if constexpr (std::is_same_v<T, PrecomposeNode>) {
                return {{"op", "precompose"},
                        {"matrix", n.a.to_rows()},
                        {"offset", n.b},
                        {"arg", serialize_node(*n.child)}};
            } else if constexpr (std::is_same_v<T, BlockDiagNode>) {
                return {{"op", "blockdiag"},
                        {"blocks", json::array({serialize_node(*n.first), serialize_node(*n.second)})}};
            } else {
                static_assert(std::is_same_v<T, DoubleNode>);
                return {{"op", "double"}, {"arg", serialize_node(*n.child)}};
            }
        },
        f.node());
}

inline json serialize_function_spec(const ConvexMatrixExpr& f) {
    return {{"version", 1},
            {"d", f.input_dim()},
            {"ell", f.output_dim()},
            {"root", serialize_node(f)}};
}

inline json serialize_function_spec(const ExprPtr& f) {
    detail::check_child(f, "serialize_function_spec");
    return serialize_function_spec(*f);
}

/// Parses and validates a version-1 function-spec document; errors carry the
/// offending document path.
inline ExprPtr parse_function_spec(const json& doc) {
    const int version = io_detail::integer(io_detail::member(doc, "$", "version"), "version");
    if (version != 1)
        io_detail::fail("version", "unsupported version " + std::to_string(version) + ", expected 1");
    const int d = io_detail::integer(io_detail::member(doc, "$", "d"), "d");
    const int ell = io_detail::integer(io_detail::member(doc, "$", "ell"), "ell");
    ExprPtr expr = io_detail::parse_node(io_detail::member(doc, "$", "root"), "root");
    if (expr->input_dim() != d)
        io_detail::fail("d", "declared d = " + std::to_string(d) + " but root has input dim " +
                                 std::to_string(expr->input_dim()));
    if (expr->output_dim() != ell)
        io_detail::fail("ell", "declared ell = " + std::to_string(ell) + " but root has output dim " +
                                   std::to_string(expr->output_dim()));
    return expr;
}

/// Candidate document: {"matrices": [matrix, ...]}, one symmetric matrix per
/// input coordinate.
inline MatTuple parse_candidate(const json& doc, int input_dim, int output_dim) {
    const json& mj = io_detail::member(doc, "$", "matrices");
    if (!mj.is_array() || mj.empty()) io_detail::fail("matrices", "expected a nonempty array");
    std::vector<SymMat> mats;
    for (std::size_t k = 0; k < mj.size(); ++k)
        mats.push_back(io_detail::sym_mat(mj[k], "matrices[" + std::to_string(k) + "]"));
    MatTuple t = io_detail::guarded("matrices", [&] { return MatTuple(std::move(mats)); });
    if (t.count() != input_dim)
        io_detail::fail("matrices", "expected " + std::to_string(input_dim) + " matrices, got " +
                                        std::to_string(t.count()));
    if (t.dim() != output_dim)
        io_detail::fail("matrices", "expected dim " + std::to_string(output_dim) + " matrices, got dim " +
                                        std::to_string(t.dim()));
    return t;
}

namespace io_detail {
inline json load_json_file(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) fail(file_path, "cannot open file");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail(file_path, "invalid JSON");
    return doc;
}
}  // namespace io_detail

inline ExprPtr load_function_spec(const std::string& file_path) {
    return parse_function_spec(io_detail::load_json_file(file_path));
}

inline MatTuple load_candidate(const std::string& file_path, int input_dim, int output_dim) {
    return parse_candidate(io_detail::load_json_file(file_path), input_dim, output_dim);
}

}  // namespace matconv
