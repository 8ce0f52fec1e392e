#include "warpcheck/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace warpcheck {
namespace {

using json = nlohmann::ordered_json;

struct Ctx {
    const std::filesystem::path& file;
    std::string path;

    Ctx at(const std::string& key) const { return {file, path + "." + key}; }
    Ctx at(std::size_t index) const { return {file, path + "[" + std::to_string(index) + "]"}; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ManifestError(file.string() + ": " + path + ": " + msg);
    }
};

const json& member(const Ctx& c, const json& node, const std::string& key) {
    const auto it = node.find(key);
    if (it == node.end()) c.fail("missing required key '" + key + "'");
    return *it;
}

std::string as_string(const Ctx& c, const json& node) {
    if (!node.is_string()) c.fail("expected a string");
    return node.get<std::string>();
}

double as_number(const Ctx& c, const json& node) {
    if (!node.is_number()) c.fail("expected a number");
    return node.get<double>();
}

int as_int(const Ctx& c, const json& node) {
    if (!node.is_number_integer()) c.fail("expected an integer");
    return node.get<int>();
}

bool as_bool(const Ctx& c, const json& node) {
    if (!node.is_boolean()) c.fail("expected true or false");
    return node.get<bool>();
}

const json& as_object(const Ctx& c, const json& node) {
    if (!node.is_object()) c.fail("expected an object");
    return node;
}

const json& as_array(const Ctx& c, const json& node) {
    if (!node.is_array()) c.fail("expected an array");
    return node;
}

Expr parse_in(const Ctx& c, const std::string& text, std::span<const std::string> vars,
              const std::map<std::string, double>& consts) {
    try {
        return parse_expr(text, vars, consts);
    } catch (const std::exception& e) {
        c.fail(std::string("in '") + text + "': " + e.what());
    }
}

std::vector<std::array<double, 2>> parse_domain(const Ctx& c, const json& node,
                                                std::size_t expected) {
    const json& arr = as_array(c, node);
    if (arr.size() != expected) {
        c.fail("domain lists " + std::to_string(arr.size()) + " intervals but the chart has " +
               std::to_string(expected) + " coordinates");
    }
    std::vector<std::array<double, 2>> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Ctx ci = c.at(i);
        const json& iv = as_array(ci, arr[i]);
        if (iv.size() != 2) ci.fail("an interval is two numbers [lo, hi]");
        out.push_back({as_number(ci, iv[0]), as_number(ci, iv[1])});
    }
    return out;
}

std::vector<std::string> parse_coords(const Ctx& c, const json& node) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < as_array(c, node).size(); ++i) {
        out.push_back(as_string(c.at(i), node[i]));
    }
    return out;
}

SamplePlan parse_plan(const Ctx& c, const json& node, SamplePlan base) {
    const json& obj = as_object(c, node);
    for (const auto& [key, value] : obj.items()) {
        const Ctx ck = c.at(key);
        if (key == "count") {
            base.count = as_int(ck, value);
            if (base.count < 1) ck.fail("count must be at least 1");
        } else if (key == "seed") {
            base.seed = static_cast<std::uint64_t>(as_int(ck, value));
        } else if (key == "margin") {
            base.margin = as_number(ck, value);
        } else {
            ck.fail("unknown plan key (count, seed, margin)");
        }
    }
    return base;
}

// Resolves manifold declarations in dependency order; `visiting` carries the
// chain for cycle reporting.
struct ManifoldResolver {
    const Ctx root;
    const json& nodes;
    const std::map<std::string, double>& consts;
    Manifest& out;
    std::vector<std::string> visiting;

    const ChartManifold& resolve(const Ctx& ref, const std::string& name) {
        if (const auto it = out.manifolds.find(name); it != out.manifolds.end()) {
            return it->second;
        }
        const auto node = nodes.find(name);
        if (node == nodes.end()) ref.fail("unknown manifold '" + name + "'");
        if (std::find(visiting.begin(), visiting.end(), name) != visiting.end()) {
            std::string chain;
            for (const std::string& v : visiting) chain += v + " -> ";
            root.fail("cyclic manifold reference: " + chain + name);
        }
        visiting.push_back(name);
        build(root.at(name), name, *node);
        visiting.pop_back();
        return out.manifolds.at(name);
    }

    void build(const Ctx& c, const std::string& name, const json& spec) {
        const json& obj = as_object(c, spec);
        const std::string type = as_string(c.at("type"), member(c, obj, "type"));

        if (type == "warped") {
            const std::string base_name = as_string(c.at("base"), member(c, obj, "base"));
            const std::string fiber_name = as_string(c.at("fiber"), member(c, obj, "fiber"));
            const ChartManifold base = resolve(c.at("base"), base_name);
            const ChartManifold fiber = resolve(c.at("fiber"), fiber_name);
            const std::string f_text = as_string(c.at("f"), member(c, obj, "f"));
            const Expr f = parse_in(c.at("f"), f_text, base.coords(), consts);
            try {
                WarpedProduct W = WarpedProduct::build(base, fiber, ScalarField{f});
                out.manifolds.emplace(name, W.product());
                out.products.emplace(name, std::move(W));
            } catch (const std::exception& e) {
                c.fail(e.what());
            }
            out.warped_base.emplace(name, base_name);
            out.warped_fiber.emplace(name, fiber_name);
            return;
        }

        std::optional<ChartManifold> chart;
        if (type == "euclidean") {
            const int n = as_int(c.at("dim"), member(c, obj, "dim"));
            if (n < 1) c.at("dim").fail("dimension must be positive");
            chart = euclidean(n);
        } else if (type == "sphere") {
            chart = sphere_chart(as_number(c.at("radius"), member(c, obj, "radius")));
        } else if (type == "hyperbolic") {
            chart = hyperbolic_chart(as_number(c.at("k"), member(c, obj, "k")));
        } else if (type == "interval") {
            const int sig = as_int(c.at("signature"), member(c, obj, "signature"));
            if (sig != 1 && sig != -1) c.at("signature").fail("signature must be 1 or -1");
            const json& b = as_array(c.at("bounds"), member(c, obj, "bounds"));
            if (b.size() != 2) c.at("bounds").fail("bounds are two numbers [lo, hi]");
            chart = interval(sig, {as_number(c.at("bounds"), b[0]), as_number(c.at("bounds"), b[1])});
        } else if (type == "metric") {
            const auto coords = parse_coords(c.at("coords"), member(c, obj, "coords"));
            const auto domain = parse_domain(c.at("domain"), member(c, obj, "domain"), coords.size());
            const json& rows = as_array(c.at("metric"), member(c, obj, "metric"));
            if (rows.size() != coords.size()) {
                c.at("metric").fail("metric matrix is " + std::to_string(rows.size()) + "x? but the chart has " +
                                    std::to_string(coords.size()) + " coordinates");
            }
            std::vector<std::vector<Expr>> metric;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const Ctx ri = c.at("metric").at(i);
                const json& row = as_array(ri, rows[i]);
                if (row.size() != coords.size()) {
                    ri.fail("metric row has " + std::to_string(row.size()) + " entries but the chart has " +
                            std::to_string(coords.size()) + " coordinates");
                }
                std::vector<Expr> r;
                for (std::size_t j = 0; j < row.size(); ++j) {
                    r.push_back(parse_in(ri.at(j), as_string(ri.at(j), row[j]), coords, consts));
                }
                metric.push_back(std::move(r));
            }
            try {
                chart = ChartManifold::from_metric(coords, domain, std::move(metric));
            } catch (const std::exception& e) {
                c.fail(e.what());
            }
        } else {
            c.at("type").fail("unknown manifold type '" + type +
                              "' (euclidean, sphere, hyperbolic, interval, metric, warped)");
        }

        if (const auto it = obj.find("coords"); it != obj.end() && type != "metric") {
            const auto coords = parse_coords(c.at("coords"), *it);
            if (static_cast<int>(coords.size()) != chart->dim()) {
                c.at("coords").fail("renames " + std::to_string(coords.size()) + " coordinates on a chart of dimension " +
                                    std::to_string(chart->dim()));
            }
            chart = chart->renamed(coords);
        }
        if (const auto it = obj.find("domain"); it != obj.end() && type != "metric") {
            chart = chart->with_domain(
                parse_domain(c.at("domain"), *it, static_cast<std::size_t>(chart->dim())));
        }
        out.manifolds.emplace(name, std::move(*chart));
    }
};

const ChartManifold& need_manifold(const Ctx& c, const Manifest& m, const std::string& name) {
    const auto it = m.manifolds.find(name);
    if (it == m.manifolds.end()) c.fail("unknown manifold '" + name + "'");
    return it->second;
}

const FieldEntry& need_field(const Ctx& c, const Manifest& m, const std::string& name) {
    const auto it = m.fields.find(name);
    if (it == m.fields.end()) c.fail("unknown field '" + name + "'");
    return it->second;
}

const FieldEntry& need_vector_field_on(const Ctx& c, const Manifest& m, const std::string& name,
                                       const std::string& manifold) {
    const FieldEntry& f = need_field(c, m, name);
    if (f.is_scalar) c.fail("field '" + name + "' is a scalar, a vector field is needed here");
    if (f.manifold != manifold) {
        c.fail("field '" + name + "' is declared on '" + f.manifold + "', expected '" + manifold + "'");
    }
    return f;
}

const FieldEntry& need_scalar_field_on(const Ctx& c, const Manifest& m, const std::string& name,
                                       const std::string& manifold) {
    const FieldEntry& f = need_field(c, m, name);
    if (!f.is_scalar) c.fail("field '" + name + "' is a vector field, a scalar is needed here");
    if (f.manifold != manifold) {
        c.fail("field '" + name + "' is declared on '" + f.manifold + "', expected '" + manifold + "'");
    }
    return f;
}

const std::string& warped_factor(const Ctx& c, const Manifest& m, const std::string& product,
                                 bool base) {
    const auto& table = base ? m.warped_base : m.warped_fiber;
    const auto it = table.find(product);
    if (it == table.end()) {
        c.fail("manifold '" + product + "' is not a warped product, this check needs one");
    }
    return it->second;
}

Expectation parse_expectation(const Ctx& c, const json& node) {
    const json& obj = as_object(c, node);
    Expectation e;
    bool kind_set = false;
    for (const auto& [key, value] : obj.items()) {
        const Ctx ck = c.at(key);
        if (key == "at_most") {
            e.kind = Expectation::Kind::at_most;
            e.bound = as_number(ck, value);
            kind_set = true;
        } else if (key == "at_least") {
            e.kind = Expectation::Kind::at_least;
            e.bound = as_number(ck, value);
            kind_set = true;
        } else if (key == "close_to") {
            e.kind = Expectation::Kind::close_to;
            e.bound = as_number(ck, value);
            kind_set = true;
        } else if (key == "tol") {
            e.tol = as_number(ck, value);
        } else if (key == "text") {
            e.kind = Expectation::Kind::text;
            e.text = as_string(ck, value);
            kind_set = true;
        } else {
            ck.fail("unknown expectation key (at_most, at_least, close_to, tol, text)");
        }
    }
    if (!kind_set) c.fail("expectation needs one of at_most, at_least, close_to, text");
    if (e.kind == Expectation::Kind::close_to && e.tol <= 0.0) {
        c.fail("close_to needs a positive 'tol'");
    }
    return e;
}

void parse_tol_overrides(const Ctx& c, const json& node, std::map<std::string, double>& out) {
    static const std::set<std::string> known = {"algebraic",    "lie_agreement", "exact",
                                                "curvature",    "fit",           "mixed_ricci",
                                                "soliton_reject", "steady_eps"};
    for (const auto& [key, value] : as_object(c, node).items()) {
        const Ctx ck = c.at(key);
        if (!known.count(key)) ck.fail("unknown tolerance name");
        out[key] = as_number(ck, value);
    }
}

const std::set<std::string> kOps = {
    "killing_residual", "conformal_fit",    "concurrent_residual",
    "gradient_potential_check", "soliton_fit", "einstein_fit",
    "gradient_soliton_residual", "zeta_of_f_residual", "classify_field",
};

Point parse_point(const Ctx& c, const json& node, int dim, const char* what) {
    const json& arr = as_array(c, node);
    if (static_cast<int>(arr.size()) != dim) {
        c.fail(std::string(what) + " has " + std::to_string(arr.size()) + " entries but needs " +
               std::to_string(dim));
    }
    Point p;
    for (std::size_t i = 0; i < arr.size(); ++i) p.push_back(as_number(c.at(i), arr[i]));
    return p;
}

void parse_check(const Ctx& c, const json& node, const Manifest& m, CheckSpec& spec) {
    const json& obj = as_object(c, node);
    spec.id = as_string(c.at("id"), member(c, obj, "id"));

    const bool has_suite = obj.contains("suite");
    const bool has_op = obj.contains("op");
    if (has_suite == has_op) c.fail("a check names exactly one of 'suite' or 'op'");

    spec.manifold = as_string(c.at("manifold"), member(c, obj, "manifold"));
    const ChartManifold& chart = need_manifold(c.at("manifold"), m, spec.manifold);

    if (has_suite) {
        const std::string raw = as_string(c.at("suite"), obj.at("suite"));
        spec.suite = suite_name(raw);
        if (spec.suite.empty()) c.at("suite").fail("unknown suite '" + raw + "' (S1..S9 or names)");
    } else {
        spec.op = as_string(c.at("op"), obj.at("op"));
        if (!kOps.count(spec.op)) c.at("op").fail("unknown operation '" + spec.op + "'");
    }

    const auto zeta_pair = [&](const Ctx& cz, const json& z, std::string& base_out,
                               std::string& fiber_out) {
        const json& zobj = as_object(cz, z);
        const std::string bname = warped_factor(cz, m, spec.manifold, true);
        const std::string fname = warped_factor(cz, m, spec.manifold, false);
        for (const auto& [key, value] : zobj.items()) {
            const Ctx ck = cz.at(key);
            if (key == "base") {
                base_out = as_string(ck, value);
                need_vector_field_on(ck, m, base_out, bname);
            } else if (key == "fiber") {
                fiber_out = as_string(ck, value);
                need_vector_field_on(ck, m, fiber_out, fname);
            } else {
                ck.fail("unknown key in a field pair (base, fiber)");
            }
        }
        if (base_out.empty() && fiber_out.empty()) cz.fail("a field pair names base or fiber");
    };

    if (spec.suite == "prop1-blocks" || spec.suite == "e2-blocks") {
        const json& pairs = as_array(c.at("pairs"), member(c, obj, "pairs"));
        if (pairs.empty()) c.at("pairs").fail("at least one field pair is needed");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            std::string b, f;
            zeta_pair(c.at("pairs").at(i), pairs[i], b, f);
            spec.pairs.emplace_back(b, f);
        }
    } else if (spec.suite == "concurrent-classify" || spec.suite == "concurrent-soliton" ||
               spec.suite == "einstein-conditions") {
        zeta_pair(c.at("zeta"), member(c, obj, "zeta"), spec.zeta_base, spec.zeta_fiber);
    }

    if (spec.suite == "concurrent-classify" || spec.suite == "grw-concurrent") {
        spec.branch = as_int(c.at("branch"), member(c, obj, "branch"));
    }
    if (spec.suite == "einstein-conditions") {
        const std::string part = as_string(c.at("part"), member(c, obj, "part"));
        if (part.size() != 1 || part[0] < 'a' || part[0] > 'd') {
            c.at("part").fail("part must be one of a, b, c, d");
        }
        spec.part = part[0];
        if (spec.part == 'b') {
            spec.condition = as_int(c.at("condition"), member(c, obj, "condition"));
        }
    }
    if (spec.suite == "gradient-factorization") {
        spec.scalar = as_string(c.at("scalar"), member(c, obj, "scalar"));
        need_scalar_field_on(c.at("scalar"), m, spec.scalar, spec.manifold);
        spec.lambda = as_number(c.at("lambda"), member(c, obj, "lambda"));
        const std::string bname = warped_factor(c, m, spec.manifold, true);
        const std::string fname = warped_factor(c, m, spec.manifold, false);
        if (const auto it = obj.find("fiber_point"); it != obj.end()) {
            spec.fiber_point = parse_point(c.at("fiber_point"), *it,
                                           m.manifolds.at(fname).dim(), "fiber_point");
        }
        if (const auto it = obj.find("base_point"); it != obj.end()) {
            spec.base_point = parse_point(c.at("base_point"), *it,
                                          m.manifolds.at(bname).dim(), "base_point");
        }
    }
    if (spec.suite == "grw-concurrent") {
        spec.a = as_number(c.at("a"), member(c, obj, "a"));
        if (spec.branch == 2) spec.b = as_number(c.at("b"), member(c, obj, "b"));
        if (const auto it = obj.find("zeta2"); it != obj.end()) {
            spec.zeta2 = as_string(c.at("zeta2"), *it);
            need_vector_field_on(c.at("zeta2"), m, spec.zeta2,
                                 warped_factor(c, m, spec.manifold, false));
        } else if (spec.branch == 1) {
            c.fail("branch 1 needs 'zeta2', a concurrent field on the fiber");
        }
    }
    if (spec.suite == "grw-gradient") {
        spec.scalar = as_string(c.at("scalar"), member(c, obj, "scalar"));
        need_scalar_field_on(c.at("scalar"), m, spec.scalar,
                             warped_factor(c, m, spec.manifold, true));
    }
    if (!spec.suite.empty()) {
        warped_factor(c, m, spec.manifold, true);  // every suite needs a warped product
    }

    if (!spec.op.empty()) {
        if (spec.op == "zeta_of_f_residual") {
            const std::string bname = warped_factor(c, m, spec.manifold, true);
            spec.field = as_string(c.at("field"), member(c, obj, "field"));
            need_vector_field_on(c.at("field"), m, spec.field, bname);
        } else if (spec.op == "einstein_fit") {
            // metric-only operation
        } else if (spec.op == "gradient_soliton_residual") {
            spec.scalar = as_string(c.at("scalar"), member(c, obj, "scalar"));
            need_scalar_field_on(c.at("scalar"), m, spec.scalar, spec.manifold);
            spec.lambda = as_number(c.at("lambda"), member(c, obj, "lambda"));
        } else {
            spec.field = as_string(c.at("field"), member(c, obj, "field"));
            need_vector_field_on(c.at("field"), m, spec.field, spec.manifold);
        }
        (void)chart;
    }

    if (const auto it = obj.find("plan"); it != obj.end()) {
        spec.plan = parse_plan(c.at("plan"), *it, m.plan);
    }
    if (const auto it = obj.find("tolerances"); it != obj.end()) {
        parse_tol_overrides(c.at("tolerances"), *it, spec.tol_overrides);
    }
    if (const auto it = obj.find("expect"); it != obj.end()) {
        for (const auto& [line, rule] : as_object(c.at("expect"), *it).items()) {
            spec.expect.emplace(line, parse_expectation(c.at("expect").at(line), rule));
        }
    }
    if (const auto it = obj.find("expect_discrepancy"); it != obj.end()) {
        spec.expect_discrepancy = as_bool(c.at("expect_discrepancy"), *it);
    }
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError(path.string() + ": cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError(path.string() + ": parse error at byte " + std::to_string(e.byte) +
                            ": " + e.what());
    }

    Manifest m;
    m.path = path;
    const Ctx root{m.path, "$"};
    const json& top = as_object(root, doc);

    for (const auto& [key, value] : top.items()) {
        if (key != "constants" && key != "manifolds" && key != "fields" && key != "plan" &&
            key != "checks") {
            root.at(key).fail("unknown top-level key (constants, manifolds, fields, plan, checks)");
        }
        (void)value;
    }

    if (const auto it = top.find("constants"); it != top.end()) {
        const Ctx c = root.at("constants");
        for (const auto& [name, value] : as_object(c, *it).items()) {
            m.constants.emplace(name, as_number(c.at(name), value));
        }
    }

    const Ctx cm = root.at("manifolds");
    const json empty_obj = json::object();
    const json& manifold_nodes = top.contains("manifolds") ? as_object(cm, top.at("manifolds")) : empty_obj;
    ManifoldResolver resolver{cm, manifold_nodes, m.constants, m, {}};
    for (const auto& [name, value] : manifold_nodes.items()) {
        (void)value;
        resolver.resolve(cm.at(name), name);
    }

    if (const auto it = top.find("fields"); it != top.end()) {
        const Ctx cf = root.at("fields");
        for (const auto& [name, node] : as_object(cf, *it).items()) {
            const Ctx c = cf.at(name);
            const json& obj = as_object(c, node);
            FieldEntry f;
            f.manifold = as_string(c.at("manifold"), member(c, obj, "manifold"));
            const ChartManifold& chart = need_manifold(c.at("manifold"), m, f.manifold);
            const bool has_components = obj.contains("components");
            const bool has_scalar = obj.contains("scalar");
            if (has_components == has_scalar) {
                c.fail("a field has exactly one of 'components' or 'scalar'");
            }
            if (has_scalar) {
                f.is_scalar = true;
                f.scalar.expr = parse_in(c.at("scalar"), as_string(c.at("scalar"), obj.at("scalar")),
                                         chart.coords(), m.constants);
            } else {
                const json& comps = as_array(c.at("components"), obj.at("components"));
                if (static_cast<int>(comps.size()) != chart.dim()) {
                    c.at("components")
                        .fail("field has " + std::to_string(comps.size()) + " components but '" +
                              f.manifold + "' has dimension " + std::to_string(chart.dim()));
                }
                for (std::size_t i = 0; i < comps.size(); ++i) {
                    const Ctx ci = c.at("components").at(i);
                    f.vec.components.push_back(
                        parse_in(ci, as_string(ci, comps[i]), chart.coords(), m.constants));
                }
            }
            m.fields.emplace(name, std::move(f));
        }
    }

    if (const auto it = top.find("plan"); it != top.end()) {
        m.plan = parse_plan(root.at("plan"), *it, SamplePlan{});
    }

    if (const auto it = top.find("checks"); it != top.end()) {
        const Ctx cc = root.at("checks");
        const json& arr = as_array(cc, *it);
        std::set<std::string> ids;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            CheckSpec spec;
            parse_check(cc.at(i), arr[i], m, spec);
            if (!ids.insert(spec.id).second) {
                cc.at(i).fail("duplicate check id '" + spec.id + "'");
            }
            m.checks.push_back(std::move(spec));
        }
    }
    return m;
}

namespace {

CoordVectorField field_or_zero(const Manifest& m, const std::string& name, int dim) {
    if (name.empty()) {
        CoordVectorField z;
        z.components.assign(static_cast<std::size_t>(dim), Expr::number(0.0));
        return z;
    }
    return m.fields.at(name).vec;
}

Point midpoint(const ChartManifold& M) {
    Point p;
    for (const auto& [lo, hi] : M.domain()) p.push_back(0.5 * (lo + hi));
    return p;
}

CheckLine value_line(std::string name, double value) {
    CheckLine l;
    l.name = std::move(name);
    l.value = value;
    return l;
}

CheckResult dispatch_op(const Manifest& m, const CheckSpec& c, const SuiteContext& ctx) {
    CheckResult r;
    r.kind = c.op;
    const ChartManifold& M = m.manifolds.at(c.manifold);
    const auto pts = M.sample_points(ctx.plan);
    r.samples = static_cast<int>(pts.size());

    if (c.op == "killing_residual") {
        r.lines.push_back(value_line(
            "value", killing_residual(M, m.fields.at(c.field).vec, pts, ctx.opt)));
    } else if (c.op == "concurrent_residual") {
        r.lines.push_back(value_line(
            "value", concurrent_residual(M, m.fields.at(c.field).vec, pts, ctx.opt)));
    } else if (c.op == "gradient_potential_check") {
        r.lines.push_back(value_line(
            "value", gradient_potential_check(M, m.fields.at(c.field).vec, pts, ctx.opt)));
    } else if (c.op == "conformal_fit") {
        const ConformalFit f = conformal_fit(M, m.fields.at(c.field).vec, pts, ctx.tol, ctx.opt);
        r.lines.push_back(value_line("rho", f.rho));
        r.lines.push_back(value_line("rho-spread", f.rho_spread));
        r.lines.push_back(value_line("residual", f.residual));
    } else if (c.op == "soliton_fit") {
        const SolitonFit f = soliton_fit(M, m.fields.at(c.field).vec, pts, ctx.tol, ctx.opt);
        r.lines.push_back(value_line("lambda", f.lambda));
        r.lines.push_back(value_line("residual-max", f.residual_max));
        r.lines.push_back(value_line("residual-mean", f.residual_mean));
        CheckLine v;
        v.name = "verdict";
        v.text = to_string(f.verdict);
        r.lines.push_back(std::move(v));
    } else if (c.op == "einstein_fit") {
        const EinsteinFit f = einstein_fit(M, pts, ctx.opt);
        r.lines.push_back(value_line("mu", f.mu));
        r.lines.push_back(value_line("residual-max", f.residual_max));
    } else if (c.op == "gradient_soliton_residual") {
        r.lines.push_back(value_line(
            "value",
            gradient_soliton_residual(M, m.fields.at(c.scalar).scalar, c.lambda, pts, ctx.opt)));
    } else if (c.op == "zeta_of_f_residual") {
        const WarpedProduct& W = m.products.at(c.manifold);
        const auto base_pts = W.base().sample_points(ctx.plan);
        r.samples = static_cast<int>(base_pts.size());
        r.lines.push_back(value_line(
            "value", zeta_of_f_residual(W, m.fields.at(c.field).vec, base_pts, ctx.opt)));
    } else if (c.op == "classify_field") {
        const FieldClassification f =
            classify_field(M, m.fields.at(c.field).vec, pts, ctx.tol, ctx.opt);
        r.lines.push_back(value_line("killing-residual", f.killing_residual));
        r.lines.push_back(value_line("conformal-residual", f.conformal.residual));
        r.lines.push_back(value_line("rho", f.conformal.rho));
        r.lines.push_back(value_line("rho-spread", f.conformal.rho_spread));
        r.lines.push_back(value_line("concurrent-residual", f.concurrent_residual));
        r.lines.push_back(value_line("gradient-potential-residual", f.gradient_potential_residual));
    }
    finalize_status(r);
    return r;
}

CheckResult dispatch(const Manifest& m, const CheckSpec& c, const RunOptions& opts) {
    SuiteContext ctx;
    ctx.plan = c.plan.value_or(m.plan);
    if (opts.samples) ctx.plan.count = *opts.samples;
    if (opts.seed) ctx.plan.seed = *opts.seed;
    if (opts.margin) ctx.plan.margin = *opts.margin;
    for (const auto& [name, value] : c.tol_overrides) {
        if (name == "algebraic") ctx.tol.algebraic = value;
        else if (name == "lie_agreement") ctx.tol.lie_agreement = value;
        else if (name == "exact") ctx.tol.exact = value;
        else if (name == "curvature") ctx.tol.curvature = value;
        else if (name == "fit") ctx.tol.fit = value;
        else if (name == "mixed_ricci") ctx.tol.mixed_ricci = value;
        else if (name == "soliton_reject") ctx.tol.soliton_reject = value;
        else if (name == "steady_eps") ctx.tol.steady_eps = value;
    }
    if (opts.tol_curvature) ctx.tol.curvature = *opts.tol_curvature;
    if (opts.tol_exact) ctx.tol.exact = *opts.tol_exact;
    ctx.opt.mode = opts.mode;
    ctx.opt.policy = opts.policy;

    if (!c.op.empty()) return dispatch_op(m, c, ctx);

    const WarpedProduct& W = m.products.at(c.manifold);
    const auto make_pair = [&](const std::string& base, const std::string& fiber) {
        LiftedPair z;
        z.base = field_or_zero(m, base, W.base_dim());
        z.fiber = field_or_zero(m, fiber, W.fiber_dim());
        return z;
    };

    if (c.suite == "prop1-blocks" || c.suite == "e2-blocks") {
        std::vector<LiftedPair> pairs;
        for (const auto& [b, f] : c.pairs) pairs.push_back(make_pair(b, f));
        return c.suite == "prop1-blocks" ? run_s1(W, pairs, ctx) : run_s3(W, pairs, ctx);
    }
    if (c.suite == "prop2-blocks") return run_s2(W, ctx);
    if (c.suite == "concurrent-classify") {
        return run_s4(W, make_pair(c.zeta_base, c.zeta_fiber), c.branch, ctx);
    }
    if (c.suite == "concurrent-soliton") {
        return run_s5(W, make_pair(c.zeta_base, c.zeta_fiber), ctx);
    }
    if (c.suite == "gradient-factorization") {
        const Point q0 = c.fiber_point.value_or(midpoint(W.fiber()));
        const Point p0 = c.base_point.value_or(midpoint(W.base()));
        return run_s6(W, m.fields.at(c.scalar).scalar, c.lambda, q0, p0, ctx);
    }
    if (c.suite == "grw-concurrent") {
        const CoordVectorField* z2 = nullptr;
        CoordVectorField z2_store;
        if (!c.zeta2.empty()) {
            z2_store = m.fields.at(c.zeta2).vec;
            z2 = &z2_store;
        }
        return run_s7(W, c.branch, c.a, c.b, z2, ctx);
    }
    if (c.suite == "grw-gradient") {
        return run_s8(W, m.fields.at(c.scalar).scalar, ctx);
    }
    return run_s9(W, c.part, make_pair(c.zeta_base, c.zeta_fiber), c.condition, ctx);
}

std::string target_of(const CheckSpec& c) {
    std::string t = c.manifold;
    const auto add = [&](const std::string& name) {
        if (!name.empty()) t += ", " + name;
    };
    for (const auto& [b, f] : c.pairs) {
        add(b);
        add(f);
    }
    add(c.zeta_base);
    add(c.zeta_fiber);
    add(c.field);
    add(c.scalar);
    add(c.zeta2);
    return t;
}

}  // namespace

std::vector<CheckResult> run_manifest(const Manifest& m, const RunOptions& opts) {
    std::vector<CheckResult> out;
    for (const CheckSpec& c : m.checks) {
        if (!opts.only_suite.empty() && c.suite != opts.only_suite) continue;
        CheckResult r;
        try {
            r = dispatch(m, c, opts);
            apply_expectations(r, c.expect, c.expect_discrepancy);
        } catch (const std::exception& e) {
            r.lines.clear();
            r.error = e.what();
            r.kind = c.suite.empty() ? c.op : c.suite;
            finalize_status(r);
        }
        r.id = c.id;
        r.target = target_of(c);
        out.push_back(std::move(r));
    }
    return out;
}

int exit_status(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results) {
        if (r.status == CheckStatus::fail || r.status == CheckStatus::error) return 1;
    }
    return 0;
}

}  // namespace warpcheck
