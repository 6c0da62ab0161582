#include "ensheat/config.hpp"

#include "ensheat/errors.hpp"
#include "ensheat/expression.hpp"
#include "ensheat/verification.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace ensheat {

namespace {

std::size_t line_of(const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line) + 1; }

[[noreturn]] void bad(const YAML::Node& n, const std::string& what)
{
    throw FormatError(what, line_of(n));
}

[[noreturn]] void invalid(const YAML::Node& n, const std::string& what)
{
    throw ValidationError("line " + std::to_string(line_of(n)) + ": " + what);
}

YAML::Node require(const YAML::Node& parent, const char* key)
{
    auto n = parent[key];
    if (!n)
        bad(parent, std::string("missing key '") + key + "'");
    return n;
}

template <class T>
T scalar(const YAML::Node& n, const char* what)
{
    if (!n.IsScalar())
        bad(n, std::string(what) + " must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        bad(n, std::string("cannot read ") + what + " from '" + n.Scalar() + "'");
    }
}

double number(const YAML::Node& parent, const char* key)
{
    return scalar<double>(require(parent, key), key);
}

void reject_unknown(const YAML::Node& map, std::initializer_list<std::string_view> known)
{
    if (!map.IsMap())
        bad(map, "expected a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (auto k : known)
            ok = ok || k == key;
        if (!ok)
            bad(kv.first, "unknown key '" + key + "'");
    }
}

Expression expression(const YAML::Node& n)
{
    const auto text = scalar<std::string>(n, "expression");
    try {
        return Expression::parse(text);
    } catch (const ExpressionError& e) {
        bad(n, "in expression '" + text + "': " + e.what());
    }
}

/// One expression shared by all members, or one per member.
MemberFn member_expressions(const YAML::Node& n, std::size_t members)
{
    std::vector<Expression> exprs;
    if (n.IsSequence()) {
        if (n.size() != members)
            invalid(n, "expected " + std::to_string(members) + " expressions (one per member), got " +
                           std::to_string(n.size()));
        for (const auto& item : n)
            exprs.push_back(expression(item));
    } else {
        exprs.push_back(expression(n));
    }
    auto shared = std::make_shared<const std::vector<Expression>>(std::move(exprs));
    return [shared](std::size_t j, double x, double y, double t) {
        const auto& e = shared->size() == 1 ? shared->front() : (*shared)[j];
        return e(x, y, t);
    };
}

std::shared_ptr<const Mesh> read_mesh(const YAML::Node& n, const std::filesystem::path& base)
{
    reject_unknown(n, {"structured", "file"});
    if (n["structured"] && n["file"])
        bad(n, "mesh takes either 'structured' or 'file', not both");
    if (const auto s = n["structured"]) {
        const int m = scalar<int>(s, "structured");
        if (m < 1)
            invalid(s, "structured mesh needs m >= 1");
        return std::make_shared<const Mesh>(build_structured_mesh(m));
    }
    const auto f = require(n, "file");
    auto path = std::filesystem::path(scalar<std::string>(f, "file"));
    if (path.is_relative())
        path = base / path;
    std::ifstream in(path);
    if (!in)
        invalid(f, "no such file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return std::make_shared<const Mesh>(import_mesh(buf.str()));
    } catch (const FormatError& e) {
        invalid(f, path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        invalid(f, path.string() + ": " + e.what());
    }
}

ConductivityModel read_conductivity(const YAML::Node& n)
{
    const auto kind = scalar<std::string>(require(n, "kind"), "kind");
    KappaLaw law;
    if (kind == "exponential") {
        reject_unknown(n, {"kind", "c", "kappa_min", "kappa_max", "c_kappa"});
        law = kappa::Exponential{number(n, "c")};
    } else if (kind == "heaviside_quadratic") {
        reject_unknown(n, {"kind", "a", "t_c", "base", "kappa_min", "kappa_max", "c_kappa"});
        law = kappa::HeavisideQuadratic{number(n, "a"), number(n, "t_c"), number(n, "base")};
    } else if (kind == "linear") {
        reject_unknown(n, {"kind", "slope", "kappa_min", "kappa_max", "c_kappa"});
        law = kappa::Linear{number(n, "slope")};
    } else if (kind == "constant") {
        reject_unknown(n, {"kind", "value", "kappa_min", "kappa_max", "c_kappa"});
        law = kappa::Constant{number(n, "value")};
    } else if (kind == "tabulated") {
        reject_unknown(n, {"kind", "points", "kappa_min", "kappa_max", "c_kappa"});
        const auto pts = require(n, "points");
        if (!pts.IsSequence())
            bad(pts, "points must be a list of [T, kappa] pairs");
        kappa::Tabulated tab;
        for (const auto& p : pts) {
            if (!p.IsSequence() || p.size() != 2)
                bad(p, "each point must be a [T, kappa] pair");
            tab.points.emplace_back(scalar<double>(p[0], "T"), scalar<double>(p[1], "kappa"));
        }
        law = std::move(tab);
    } else {
        bad(n["kind"], "unknown conductivity kind '" + kind + "'");
    }
    const double c_kappa = n["c_kappa"] ? number(n, "c_kappa") : 0.0;
    try {
        return ConductivityModel(std::move(law), number(n, "kappa_min"), number(n, "kappa_max"),
                                 c_kappa);
    } catch (const ValidationError& e) {
        invalid(n, e.what());
    }
}

} // namespace

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw FormatError(e.msg, static_cast<std::size_t>(e.mark.line) + 1);
    }
    if (!root.IsMap())
        throw FormatError("top level must be a mapping", 1);
    reject_unknown(root, {"mesh", "boundary", "conductivity", "source", "ensemble", "time",
                          "output"});

    ScenarioConfig cfg;
    Scenario& s = cfg.scenario;
    s.mesh = read_mesh(require(root, "mesh"), base_dir);
    s.conductivity = {read_conductivity(require(root, "conductivity"))};

    // Ensemble first: member counts size the per-member expression lists.
    const auto ens = require(root, "ensemble");
    reject_unknown(ens, {"initial", "members", "exponent", "bases"});
    const auto init = require(ens, "initial");
    if (init.IsSequence()) {
        if (ens["members"] || ens["exponent"] || ens["bases"])
            bad(ens, "a list of initial expressions fixes the members; drop members/exponent/bases");
        if (init.size() == 0)
            invalid(init, "ensemble needs at least one member");
        s.members = init.size();
        s.initial = member_expressions(init, s.members);
    } else {
        const auto members = ens["members"] ? scalar<long>(ens["members"], "members") : 1L;
        if (members < 1)
            invalid(ens["members"], "ensemble needs at least one member");
        s.members = static_cast<std::size_t>(members);
        // Without exponent/bases every member starts from the same field.
        std::vector<double> scale(s.members, 1.0);
        if (ens["exponent"] || ens["bases"]) {
            const int exponent = ens["exponent"] ? scalar<int>(ens["exponent"], "exponent") : 1;
            std::vector<double> bases;
            if (const auto b = ens["bases"]) {
                if (!b.IsSequence() || b.size() != s.members)
                    invalid(b, "bases must list one value per member");
                for (const auto& v : b)
                    bases.push_back(scalar<double>(v, "base"));
            } else {
                bases = perturbation_bases(s.members);
            }
            const double factor = std::pow(10.0, -exponent);
            for (std::size_t j = 0; j < s.members; ++j)
                scale[j] = 1.0 + bases[j] * factor;
        }
        auto base_fn = member_expressions(init, 1);
        s.initial = [base_fn, scale](std::size_t j, double x, double y, double t) {
            return scale[j] * base_fn(0, x, y, t);
        };
    }

    if (const auto src = root["source"])
        s.source = member_expressions(src, s.members);

    const auto bnd = require(root, "boundary");
    if (!bnd.IsSequence())
        bad(bnd, "boundary must be a list of {label, kind, value}");
    for (const auto& item : bnd) {
        reject_unknown(item, {"label", "kind", "value", "alpha"});
        const auto label = scalar<std::string>(require(item, "label"), "label");
        if (!s.mesh->has_label(label))
            invalid(item["label"], "boundary label '" + label + "' does not exist on the mesh");
        const auto kind = scalar<std::string>(require(item, "kind"), "kind");
        MemberFn data;
        if (const auto v = item["value"])
            data = member_expressions(v, s.members);
        if (kind == "dirichlet") {
            if (item["alpha"])
                bad(item["alpha"], "alpha only applies to robin conditions");
            s.boundary.push_back({label, BoundaryCondition::dirichlet(data)});
        } else if (kind == "neumann") {
            if (item["alpha"])
                bad(item["alpha"], "alpha only applies to robin conditions");
            s.boundary.push_back({label, BoundaryCondition::neumann(data)});
        } else if (kind == "robin") {
            s.boundary.push_back({label, BoundaryCondition::robin(number(item, "alpha"), data)});
        } else {
            bad(item["kind"], "unknown boundary kind '" + kind + "'");
        }
    }

    const auto time = require(root, "time");
    reject_unknown(time, {"dt", "t_star"});
    s.dt = number(time, "dt");
    s.t_star = number(time, "t_star");
    try {
        (void)s.num_steps();
    } catch (const std::invalid_argument& e) {
        invalid(time["dt"], e.what());
    }

    if (const auto out = root["output"]) {
        reject_unknown(out, {"dir", "norms", "prefix", "snapshot_every"});
        if (out["dir"])
            cfg.output_dir = scalar<std::string>(out["dir"], "dir");
        if (out["norms"])
            cfg.norms_file = scalar<std::string>(out["norms"], "norms");
        if (out["prefix"])
            cfg.snapshot_prefix = scalar<std::string>(out["prefix"], "prefix");
        if (out["snapshot_every"]) {
            const long every = scalar<long>(out["snapshot_every"], "snapshot_every");
            if (every < 0)
                invalid(out["snapshot_every"], "snapshot_every must be >= 0");
            s.snapshot_every = static_cast<std::size_t>(every);
        }
    }

    try {
        s.validate();
    } catch (const ValidationError& e) {
        invalid(root, e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("no such file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

} // namespace ensheat
