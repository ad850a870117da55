#include "hydrostate/report_io.hpp"

#include "hydrostate/errors.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace hydrostate::io {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

std::string escape_token(std::string_view key) {
    std::string out;
    for (const char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

std::string describe(const Json& j) {
    switch (j.type()) {
        case Json::value_t::null: return "null";
        case Json::value_t::boolean: return "boolean";
        case Json::value_t::string: return "string \"" + j.get<std::string>() + "\"";
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
        case Json::value_t::number_float: return "number " + j.dump();
        case Json::value_t::array: return "array";
        case Json::value_t::object: return "object";
        default: return "value";
    }
}

/// Read-only view of a JSON value that knows its own pointer and raises
/// located SchemaErrors.
class Cursor {
public:
    Cursor(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    [[nodiscard]] const Json& json() const { return *j_; }
    [[nodiscard]] const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& expected) const {
        throw SchemaError(path_, expected, describe(*j_));
    }
    [[noreturn]] void fail(const std::string& expected, const std::string& found) const {
        throw SchemaError(path_, expected, found);
    }

    const Cursor& object() const {
        if (!j_->is_object()) fail("object");
        return *this;
    }
    const Cursor& array() const {
        if (!j_->is_array()) fail("array");
        return *this;
    }

    [[nodiscard]] std::optional<Cursor> maybe(const std::string& key) const {
        object();
        const auto it = j_->find(key);
        if (it == j_->end()) return std::nullopt;
        return Cursor(*it, path_ + "/" + escape_token(key));
    }
    [[nodiscard]] Cursor at(const std::string& key) const {
        auto c = maybe(key);
        if (!c) throw SchemaError(path_ + "/" + escape_token(key), "member '" + key + "'", "nothing");
        return *c;
    }
    [[nodiscard]] Cursor at(std::size_t i) const {
        return Cursor((*j_)[i], path_ + "/" + std::to_string(i));
    }
    [[nodiscard]] std::size_t size() const {
        array();
        return j_->size();
    }

    [[nodiscard]] double number() const {
        if (!j_->is_number()) fail("number");
        const double v = j_->get<double>();
        if (!std::isfinite(v)) fail("finite number");
        return v;
    }
    [[nodiscard]] double positive() const {
        const double v = number();
        if (!(v > 0.0)) fail("number > 0");
        return v;
    }
    [[nodiscard]] double nonnegative() const {
        const double v = number();
        if (!(v >= 0.0)) fail("number >= 0");
        return v;
    }
    [[nodiscard]] std::int64_t integer() const {
        if (!j_->is_number_integer()) fail("integer");
        if (j_->is_number_unsigned() &&
            j_->get<std::uint64_t>() >
                static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            fail("integer within range");
        return j_->get<std::int64_t>();
    }
    [[nodiscard]] std::uint64_t unsigned_integer() const {
        if (!j_->is_number_unsigned()) fail("non-negative integer");
        return j_->get<std::uint64_t>();
    }
    [[nodiscard]] std::string string() const {
        if (!j_->is_string()) fail("string");
        return j_->get<std::string>();
    }
    [[nodiscard]] std::string identifier() const {
        std::string s = string();
        if (s.empty()) fail("non-empty string");
        return s;
    }

    [[nodiscard]] Eigen::VectorXd vector() const {
        const std::size_t n = size();
        Eigen::VectorXd v(idx(n));
        for (std::size_t i = 0; i < n; ++i) v(idx(i)) = at(i).number();
        return v;
    }
    [[nodiscard]] Eigen::VectorXd vector(std::size_t expected_size) const {
        if (size() != expected_size) fail("array of length " + std::to_string(expected_size),
                                          "array of length " + std::to_string(size()));
        return vector();
    }

private:
    const Json* j_;
    std::string path_;
};

void check_version(const Cursor& root) {
    if (const auto v = root.maybe("version")) {
        if (!v->json().is_number_integer() || v->integer() != kFormatVersion)
            v->fail("version " + std::to_string(kFormatVersion));
    }
}

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json normalization_json(const Normalization& ranges) {
    Json a = Json::array();
    for (const Range& r : ranges) a.push_back(Json::array({r.lo, r.hi}));
    return a;
}

Normalization decode_normalization(const Cursor& c) {
    Normalization ranges;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Cursor pair = c.at(i);
        if (pair.size() != 2) pair.fail("[lo, hi] pair");
        const double lo = pair.at(0).number();
        const double hi = pair.at(1).number();
        if (!(hi > lo)) pair.fail("range with hi > lo", "[" + format_number(lo) + ", " +
                                                             format_number(hi) + "]");
        ranges.push_back(Range{lo, hi});
    }
    return ranges;
}

std::string kind_name(MeasurementKind k) {
    return k == MeasurementKind::pipe_flow ? "pipe-flow" : "node-head";
}

MeasurementKind decode_kind(const Cursor& c) {
    const std::string s = c.string();
    if (s == "pipe-flow") return MeasurementKind::pipe_flow;
    if (s == "node-head") return MeasurementKind::node_head;
    c.fail("\"pipe-flow\" or \"node-head\"");
}

Json class_counts_json(const std::vector<ClassCount>& counts) {
    Json a = Json::array();
    for (const ClassCount& c : counts) a.push_back({{"label", c.label}, {"count", c.count}});
    return a;
}

std::vector<ClassCount> decode_class_counts(const Cursor& c, std::int64_t min_count) {
    std::vector<ClassCount> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Cursor entry = c.at(i).object();
        const Cursor label = entry.at("label");
        ClassCount cc{label.identifier(), 0};
        if (!seen.insert(cc.label).second) label.fail("unique class label");
        const Cursor count = entry.at("count");
        const std::int64_t n = count.integer();
        if (n < min_count || n > std::numeric_limits<int>::max())
            count.fail("integer >= " + std::to_string(min_count));
        cc.count = static_cast<int>(n);
        out.push_back(std::move(cc));
    }
    return out;
}

// Per-entity map keyed by id; every id must be present, no extras.
Eigen::VectorXd decode_keyed(const Cursor& c, const std::vector<std::string>& ids) {
    c.object();
    if (c.json().size() != ids.size())
        c.fail("object with " + std::to_string(ids.size()) + " members",
               "object with " + std::to_string(c.json().size()) + " members");
    Eigen::VectorXd v(idx(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) v(idx(i)) = c.at(ids[i]).number();
    return v;
}

std::vector<std::string> pipe_ids(const Network& net) {
    std::vector<std::string> ids;
    for (const Pipe& p : net.pipes()) ids.push_back(p.id);
    return ids;
}

std::vector<std::string> head_ids(const Network& net) {
    std::vector<std::string> ids;
    for (const std::size_t n : net.demand_nodes()) ids.push_back(net.nodes()[n].id);
    return ids;
}

Json stacked_json(const Eigen::VectorXd& x, const Network& net) {
    return encode(StateVector::from_stacked(net, x), net);
}

Pattern decode_pattern(const Cursor& c, std::optional<std::size_t>& dimension) {
    c.object();
    const Cursor inf = c.at("inf");
    const Cursor sup = c.at("sup");
    const Eigen::VectorXd lo = dimension ? inf.vector(*dimension) : inf.vector();
    if (!dimension) dimension = static_cast<std::size_t>(lo.size());
    const Eigen::VectorXd hi = sup.vector(*dimension);
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo(i) > hi(i))
            c.fail("inf <= sup", "inf[" + std::to_string(i) + "]=" + format_number(lo(i)) +
                                     " > sup[" + std::to_string(i) + "]=" +
                                     format_number(hi(i)));
    return Pattern{lo, hi};
}

}  // namespace

Json parse_text(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_number(double v) { return Json(v).dump(); }

// ---------------------------------------------------------------------------
// Network

Json encode(const Network& net) {
    Json nodes = Json::array();
    for (const Node& n : net.nodes()) {
        Json o = {{"id", n.id}};
        if (n.kind == NodeKind::fixed_head) {
            o["kind"] = "fixed-head";
            o["head"] = *n.head;
        } else {
            o["kind"] = "demand";
            o["demand"] = *n.demand;
        }
        nodes.push_back(std::move(o));
    }
    Json pipes = Json::array();
    for (const Pipe& p : net.pipes())
        pipes.push_back({{"id", p.id},
                         {"from", p.from},
                         {"to", p.to},
                         {"resistance", p.resistance},
                         {"exponent", p.exponent}});
    return {{"version", kFormatVersion}, {"nodes", nodes}, {"pipes", pipes}};
}

Network decode_network(const Json& j) {
    const Cursor root = Cursor(j, "").object();
    check_version(root);

    const Cursor nodes_c = root.at("nodes");
    std::vector<Node> nodes;
    std::unordered_set<std::string> node_ids;
    std::size_t fixed = 0;
    for (std::size_t i = 0; i < nodes_c.size(); ++i) {
        const Cursor c = nodes_c.at(i).object();
        const Cursor id_c = c.at("id");
        Node node;
        node.id = id_c.identifier();
        if (!node_ids.insert(node.id).second) id_c.fail("unique node id", "duplicate \"" + node.id + "\"");
        const Cursor kind_c = c.at("kind");
        const std::string kind = kind_c.string();
        const auto head = c.maybe("head");
        const auto demand = c.maybe("demand");
        if (kind == "fixed-head") {
            node.kind = NodeKind::fixed_head;
            if (!head) throw SchemaError(c.path() + "/head", "member 'head'", "nothing");
            if (demand) demand->fail("no demand on a fixed-head node");
            node.head = head->number();
            ++fixed;
        } else if (kind == "demand") {
            node.kind = NodeKind::demand;
            if (!demand) throw SchemaError(c.path() + "/demand", "member 'demand'", "nothing");
            if (head) head->fail("no head on a demand node");
            node.demand = demand->nonnegative();
        } else {
            kind_c.fail("\"demand\" or \"fixed-head\"");
        }
        nodes.push_back(std::move(node));
    }
    if (fixed == 0) nodes_c.fail("at least one fixed-head node", std::to_string(nodes.size()) + " nodes, none fixed-head");
    if (fixed == nodes.size()) nodes_c.fail("at least one demand node", "only fixed-head nodes");

    const Cursor pipes_c = root.at("pipes");
    if (pipes_c.size() == 0) pipes_c.fail("at least one pipe", "empty array");
    std::vector<Pipe> pipes;
    std::unordered_set<std::string> pipe_ids_seen;
    for (std::size_t i = 0; i < pipes_c.size(); ++i) {
        const Cursor c = pipes_c.at(i).object();
        const Cursor id_c = c.at("id");
        Pipe pipe;
        pipe.id = id_c.identifier();
        if (!pipe_ids_seen.insert(pipe.id).second) id_c.fail("unique pipe id", "duplicate \"" + pipe.id + "\"");
        const Cursor from_c = c.at("from");
        const Cursor to_c = c.at("to");
        pipe.from = from_c.string();
        pipe.to = to_c.string();
        if (!node_ids.count(pipe.from)) from_c.fail("known node id");
        if (!node_ids.count(pipe.to)) to_c.fail("known node id");
        if (pipe.from == pipe.to) to_c.fail("node other than 'from'");
        pipe.resistance = c.at("resistance").positive();
        if (const auto e = c.maybe("exponent")) {
            pipe.exponent = e->number();
            if (!(pipe.exponent > 1.0)) e->fail("number > 1");
        }
        pipes.push_back(std::move(pipe));
    }

    try {
        return Network(std::move(nodes), std::move(pipes));
    } catch (const ValidationError& e) {
        // Only whole-graph properties remain at this point (connectivity).
        throw SchemaError("/pipes", "connected network", e.what());
    }
}

// ---------------------------------------------------------------------------
// Measurements

Json encode(const MeasurementSet& meas) {
    Json list = Json::array();
    for (const Measurement& m : meas.measurements)
        list.push_back({{"kind", kind_name(m.kind)},
                        {"target", m.target},
                        {"value", m.value},
                        {"sigma", m.sigma},
                        {"delta", m.delta}});
    return {{"version", kFormatVersion},
            {"demand_sigma", meas.demand_sigma},
            {"demand_delta", vector_json(meas.demand_delta)},
            {"measurements", list}};
}

MeasurementSet decode_measurements(const Json& j, const Network& net) {
    const Cursor root = Cursor(j, "").object();
    check_version(root);
    MeasurementSet meas;
    meas.demand_sigma = root.at("demand_sigma").positive();
    if (const auto dd = root.maybe("demand_delta")) {
        if (dd->size() != 0) meas.demand_delta = dd->vector(net.demand_count());
        for (std::size_t i = 0; i < static_cast<std::size_t>(meas.demand_delta.size()); ++i)
            if (!(meas.demand_delta(idx(i)) >= 0.0)) dd->at(i).fail("number >= 0");
    }
    const Cursor list = root.at("measurements");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Cursor c = list.at(i).object();
        Measurement m;
        m.kind = decode_kind(c.at("kind"));
        const Cursor target = c.at("target");
        m.target = target.string();
        const bool resolves = m.kind == MeasurementKind::pipe_flow
                                  ? net.find_pipe(m.target).has_value()
                                  : net.head_index(m.target).has_value();
        if (!resolves)
            target.fail(m.kind == MeasurementKind::pipe_flow ? "known pipe id" : "known demand node id");
        m.value = c.at("value").number();
        m.sigma = c.at("sigma").positive();
        if (const auto d = c.maybe("delta")) m.delta = d->nonnegative();
        meas.measurements.push_back(std::move(m));
    }
    return meas;
}

// ---------------------------------------------------------------------------
// States

Json encode(const StateVector& x, const Network& net) {
    Json q = Json::object();
    for (std::size_t j = 0; j < net.pipe_count(); ++j) q[net.pipes()[j].id] = x.q(idx(j));
    Json h = Json::object();
    const auto& demand = net.demand_nodes();
    for (std::size_t k = 0; k < demand.size(); ++k) h[net.nodes()[demand[k]].id] = x.H(idx(k));
    return {{"q", q}, {"H", h}};
}

StateVector decode_state(const Json& j, const Network& net) {
    const Cursor root = Cursor(j, "").object();
    return {decode_keyed(root.at("q"), pipe_ids(net)), decode_keyed(root.at("H"), head_ids(net))};
}

Json encode(const IntervalState& s, const Network& net) {
    return {{"lower", stacked_json(s.lower(), net)},
            {"center", encode(s.center, net)},
            {"upper", stacked_json(s.upper(), net)},
            {"halfwidth", stacked_json(s.halfwidth, net)}};
}

IntervalState decode_interval_state(const Json& j, const Network& net) {
    const Cursor root = Cursor(j, "").object();
    const auto decode_at = [&](const Cursor& c) {
        return StateVector{decode_keyed(c.object().at("q"), pipe_ids(net)),
                           decode_keyed(c.at("H"), head_ids(net))};
    };
    const Cursor center_c = root.at("center");
    IntervalState s;
    s.center = decode_at(center_c);
    const Eigen::VectorXd center = s.center.stacked();
    if (const auto hw = root.maybe("halfwidth")) {
        s.halfwidth = decode_at(*hw).stacked();
        if (!((s.halfwidth.array() >= 0.0).all())) hw->fail("non-negative half-widths");
    } else {
        s.halfwidth = decode_at(root.at("upper")).stacked() - center;
    }
    const auto lower_c = root.maybe("lower");
    const auto upper_c = root.maybe("upper");
    auto near = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return ((a - b).array().abs() <= 1e-9 * (1.0 + b.array().abs())).all();
    };
    if (lower_c && !near(decode_at(*lower_c).stacked(), center - s.halfwidth))
        lower_c->fail("lower = center - halfwidth");
    if (upper_c && !near(decode_at(*upper_c).stacked(), center + s.halfwidth))
        upper_c->fail("upper = center + halfwidth");
    if (!((s.halfwidth.array() >= 0.0).all())) root.fail("upper >= center");
    return s;
}

// ---------------------------------------------------------------------------
// Patterns, manifest, scenario spec

namespace {
DatasetManifest manifest_from(const Cursor& cursor);
}  // namespace

Json encode_patterns(std::span<const LabeledPattern> patterns, const DatasetManifest* manifest) {
    Json list = Json::array();
    for (const LabeledPattern& lp : patterns) {
        Json o = {{"inf", vector_json(lp.pattern.inf)}, {"sup", vector_json(lp.pattern.sup)}};
        if (!lp.label.empty()) o["label"] = lp.label;
        list.push_back(std::move(o));
    }
    Json out = {{"version", kFormatVersion}, {"patterns", list}};
    if (manifest) out["manifest"] = encode(*manifest);
    return out;
}

PatternFile decode_patterns(const Json& j) {
    PatternFile file;
    const Cursor root(j, "");
    std::optional<Cursor> list;
    if (j.is_array()) {
        list = root;
    } else {
        root.object();
        check_version(root);
        list = root.at("patterns");
        if (const auto m = root.maybe("manifest")) {
            file.manifest = manifest_from(*m);
        }
    }
    std::optional<std::size_t> dimension;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const Cursor c = list->at(i);
        LabeledPattern lp{decode_pattern(c, dimension), {}};
        if (const auto label = c.maybe("label")) lp.label = label->identifier();
        file.patterns.push_back(std::move(lp));
    }
    if (file.manifest && dimension &&
        file.manifest->normalization.size() != *dimension)
        root.at("manifest").at("normalization").fail(
            std::to_string(*dimension) + " ranges (pattern dimension)");
    return file;
}

Json encode(const DatasetManifest& manifest) {
    return {{"counts", class_counts_json(manifest.counts)},
            {"failed", manifest.failed},
            {"failures", manifest.failures},
            {"features", manifest.features},
            {"normalization", normalization_json(manifest.normalization)},
            {"seed", manifest.seed}};
}

namespace {

DatasetManifest manifest_from(const Cursor& cursor) {
    const Cursor& root = cursor.object();
    DatasetManifest m;
    m.counts = decode_class_counts(root.at("counts"), 0);
    const Cursor failed = root.at("failed");
    const auto f = failed.integer();
    if (f < 0 || f > std::numeric_limits<int>::max()) failed.fail("integer >= 0");
    m.failed = static_cast<int>(f);
    if (const auto fl = root.maybe("failures"))
        for (std::size_t i = 0; i < fl->size(); ++i) m.failures.push_back(fl->at(i).string());
    const Cursor features = root.at("features");
    for (std::size_t i = 0; i < features.size(); ++i)
        m.features.push_back(features.at(i).identifier());
    const Cursor norm = root.at("normalization");
    m.normalization = decode_normalization(norm);
    if (m.normalization.size() != m.features.size())
        norm.fail(std::to_string(m.features.size()) + " ranges (one per feature)",
                  std::to_string(m.normalization.size()) + " ranges");
    m.seed = root.at("seed").unsigned_integer();
    return m;
}

}  // namespace

DatasetManifest decode_manifest(const Json& j) { return manifest_from(Cursor(j, "")); }

Json encode(const ScenarioSpec& spec) {
    Json meters = Json::array();
    for (const MeterSpec& m : spec.meters)
        meters.push_back({{"kind", kind_name(m.kind)},
                          {"target", m.target},
                          {"sigma", m.sigma},
                          {"delta", m.delta}});
    return {{"version", kFormatVersion},
            {"classes", class_counts_json(spec.classes)},
            {"leak_magnitude", Json::array({spec.leak_min, spec.leak_max})},
            {"demand_noise", spec.demand_noise},
            {"demand_sigma", spec.demand_sigma},
            {"demand_delta", spec.demand_delta},
            {"meters", meters},
            {"seed", spec.seed}};
}

ScenarioSpec decode_scenario_spec(const Json& j) {
    const Cursor root = Cursor(j, "").object();
    check_version(root);
    ScenarioSpec spec;
    const Cursor classes = root.at("classes");
    spec.classes = decode_class_counts(classes, 1);
    if (spec.classes.empty()) classes.fail("at least one class");
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
        const std::string& label = spec.classes[i].label;
        if (label != kNormalLabel && label.rfind(kLeakPrefix, 0) != 0)
            classes.at(i).at("label").fail("\"normal\" or \"leak@<node-id>\"");
    }
    if (const auto leak = root.maybe("leak_magnitude")) {
        if (leak->size() != 2) leak->fail("[lo, hi] pair");
        spec.leak_min = leak->at(0).nonnegative();
        spec.leak_max = leak->at(1).nonnegative();
        if (spec.leak_max < spec.leak_min) leak->fail("lo <= hi");
    }
    if (const auto c = root.maybe("demand_noise")) {
        spec.demand_noise = c->nonnegative();
        if (!(spec.demand_noise < 1.0)) c->fail("number in [0, 1)");
    }
    spec.demand_sigma = root.at("demand_sigma").positive();
    if (const auto c = root.maybe("demand_delta")) spec.demand_delta = c->nonnegative();
    const Cursor meters = root.at("meters");
    for (std::size_t i = 0; i < meters.size(); ++i) {
        const Cursor c = meters.at(i).object();
        MeterSpec m;
        m.kind = decode_kind(c.at("kind"));
        m.target = c.at("target").identifier();
        m.sigma = c.at("sigma").positive();
        if (const auto d = c.maybe("delta")) m.delta = d->nonnegative();
        spec.meters.push_back(std::move(m));
    }
    if (const auto s = root.maybe("seed")) spec.seed = s->unsigned_integer();
    return spec;
}

// ---------------------------------------------------------------------------
// Classifier model

Json encode(const ClassifierModel& model) {
    Json cells = Json::array();
    for (const Cell& c : model.cells)
        cells.push_back({{"m", vector_json(c.lo)}, {"M", vector_json(c.hi)}, {"label", c.label}});
    return {{"version", kFormatVersion},
            {"theta", model.theta},
            {"gamma", vector_json(model.gamma)},
            {"normalization", normalization_json(model.normalization)},
            {"labels", model.labels},
            {"cells", cells}};
}

ClassifierModel decode_model(const Json& j) {
    const Cursor root = Cursor(j, "").object();
    check_version(root);
    ClassifierModel model;
    const Cursor theta = root.at("theta");
    model.theta = theta.number();
    if (!(model.theta > 0.0 && model.theta <= 1.0)) theta.fail("number in (0, 1]");
    const Cursor gamma = root.at("gamma");
    model.gamma = gamma.vector();
    for (std::size_t i = 0; i < gamma.size(); ++i)
        if (!(model.gamma(idx(i)) > 0.0)) gamma.at(i).fail("number > 0");
    const auto n = static_cast<std::size_t>(model.gamma.size());
    const Cursor norm = root.at("normalization");
    model.normalization = decode_normalization(norm);
    if (model.normalization.size() != n)
        norm.fail(std::to_string(n) + " ranges (one per dimension)",
                  std::to_string(model.normalization.size()) + " ranges");
    const Cursor labels = root.at("labels");
    std::set<std::string> label_set;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string l = labels.at(i).identifier();
        if (!label_set.insert(l).second) labels.at(i).fail("unique label");
        model.labels.push_back(std::move(l));
    }
    const Cursor cells = root.at("cells");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const Cursor c = cells.at(k).object();
        Cell cell;
        cell.lo = c.at("m").vector(n);
        cell.hi = c.at("M").vector(n);
        for (std::size_t i = 0; i < n; ++i)
            if (cell.lo(idx(i)) > cell.hi(idx(i)))
                c.fail("m <= M", "m[" + std::to_string(i) + "]=" + format_number(cell.lo(idx(i))) +
                                     " > M[" + std::to_string(i) + "]=" +
                                     format_number(cell.hi(idx(i))));
        const Cursor label = c.at("label");
        cell.label = label.identifier();
        if (!label_set.count(cell.label)) label.fail("label listed in /labels");
        model.cells.push_back(std::move(cell));
    }
    return model;
}

// ---------------------------------------------------------------------------
// Reports

Json encode(const SolveReport& report, const Network& net) {
    Json out = encode(report.state, net);
    out["iterations"] = report.iterations;
    out["residual_norm"] = report.residual_norm;
    out["converged"] = report.converged;
    return out;
}

Json encode(const EstimateReport& report, const Network& net) {
    Json out = encode(report.state, net);
    out["iterations"] = report.iterations;
    out["weighted_residual_norm"] = report.weighted_residual_norm;
    out["step_norm"] = report.last_step_norm;
    out["converged"] = report.converged;
    return out;
}

Json encode(const ClassificationResult& result) {
    Json degrees = Json::object();
    for (const auto& [label, degree] : result.memberships) degrees[label] = degree;
    return {{"label", result.label},
            {"membership", result.membership},
            {"memberships", degrees},
            {"cell", result.cell}};
}

Json error_object(const std::exception& e) {
    Json out = Json::object();
    if (const auto* err = dynamic_cast<const Error*>(&e))
        out["error"] = err->kind();
    else
        out["error"] = "InternalError";
    out["detail"] = e.what();
    if (const auto* schema = dynamic_cast<const SchemaError*>(&e)) out["path"] = schema->path();
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_state(const StateVector& x, const Network& net) {
    std::ostringstream os;
    os << "quantity,id,value\n";
    for (std::size_t j = 0; j < net.pipe_count(); ++j)
        os << "q," << net.pipes()[j].id << ',' << format_number(x.q(idx(j))) << '\n';
    const auto& demand = net.demand_nodes();
    for (std::size_t k = 0; k < demand.size(); ++k)
        os << "H," << net.nodes()[demand[k]].id << ',' << format_number(x.H(idx(k))) << '\n';
    return os.str();
}

std::string csv_interval(const IntervalState& s, const Network& net) {
    const Eigen::VectorXd lower = s.lower();
    const Eigen::VectorXd center = s.center.stacked();
    const Eigen::VectorXd upper = s.upper();
    std::ostringstream os;
    os << "quantity,id,lower,center,upper\n";
    const auto row = [&](const char* quantity, const std::string& id, Eigen::Index i) {
        os << quantity << ',' << id << ',' << format_number(lower(i)) << ','
           << format_number(center(i)) << ',' << format_number(upper(i)) << '\n';
    };
    for (std::size_t j = 0; j < net.pipe_count(); ++j) row("q", net.pipes()[j].id, idx(j));
    const auto& demand = net.demand_nodes();
    for (std::size_t k = 0; k < demand.size(); ++k)
        row("H", net.nodes()[demand[k]].id, idx(net.pipe_count() + k));
    return os.str();
}

std::string csv_classification(std::span<const ClassificationResult> results,
                               const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "index,label,membership";
    for (const std::string& l : labels) os << ',' << l;
    os << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
        const ClassificationResult& r = results[i];
        os << i << ',' << r.label << ',' << format_number(r.membership);
        for (const std::string& l : labels) {
            os << ',';
            for (const auto& [name, degree] : r.memberships)
                if (name == l) os << format_number(degree);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace hydrostate::io
