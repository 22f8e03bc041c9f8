#include "assertgen/rtl/design.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <future>

#include "assertgen/error.hpp"
#include "assertgen/rtl/parser.hpp"
#include "assertgen/rtl/printer.hpp"

namespace assertgen::rtl {

namespace {

std::optional<long long> const_eval(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Number: {
            std::string digits;
            for (char c : e.text) {
                if (c == '_')
                    continue;
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    return std::nullopt;
                digits.push_back(c);
            }
            if (digits.empty() || digits.size() > 15)
                return std::nullopt;
            return std::stoll(digits);
        }
        case ExprKind::Binary: {
            auto a = const_eval(e.operands[0]);
            auto b = const_eval(e.operands[1]);
            if (!a || !b)
                return std::nullopt;
            if (e.text == "+") return *a + *b;
            if (e.text == "-") return *a - *b;
            if (e.text == "*") return *a * *b;
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

int range_width(const std::optional<RangeDecl>& r) {
    if (!r)
        return 1;
    auto l = const_eval(r->left);
    auto rr = const_eval(r->right);
    if (!l || !rr)
        return -1;
    return static_cast<int>((*l > *rr ? *l - *rr : *rr - *l) + 1);
}

std::string lower(std::string s) {
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

LineSpan lines(const std::string& file, const SourceLoc& loc) {
    return {file, loc.first_line, loc.last_line};
}

Direction direction_of(DeclKind k) {
    switch (k) {
        case DeclKind::Output: return Direction::Output;
        case DeclKind::Inout: return Direction::Inout;
        default: return Direction::Input;
    }
}

void collect_index_reads(const Expr& lhs, std::set<std::string>& out) {
    switch (lhs.kind) {
        case ExprKind::Index:
        case ExprKind::Range:
            collect_index_reads(lhs.operands[0], out);
            for (std::size_t i = 1; i < lhs.operands.size(); ++i) {
                auto ids = identifiers_in(lhs.operands[i]);
                out.insert(ids.begin(), ids.end());
            }
            break;
        case ExprKind::Concat:
            for (const auto& op : lhs.operands)
                collect_index_reads(op, out);
            break;
        default:
            break;
    }
}

// (target, select text) pairs for an assignment target.
void collect_targets(const Expr& lhs, std::vector<std::pair<std::string, std::string>>& out) {
    switch (lhs.kind) {
        case ExprKind::Identifier:
            out.emplace_back(lhs.text, "");
            break;
        case ExprKind::Index:
        case ExprKind::Range: {
            const Expr* base = &lhs;
            while (base->kind == ExprKind::Index || base->kind == ExprKind::Range)
                base = &base->operands[0];
            if (base->kind == ExprKind::Identifier) {
                std::string full = print_expr(lhs);
                out.emplace_back(base->text, full.substr(base->text.size()));
            }
            break;
        }
        case ExprKind::Concat:
            for (const auto& op : lhs.operands)
                collect_targets(op, out);
            break;
        default:
            break;
    }
}

class ModuleBuilder {
public:
    ModuleBuilder(const Module& m, const std::string& file, std::size_t file_index,
                  std::vector<std::string>& warnings)
        : m_(m), file_(file), warnings_(warnings) {
        def_.name = m.name;
        def_.ast = &m;
        def_.file_index = file_index;
        def_.source_span = lines(file, m.loc);
    }

    ModuleDef build() {
        collect_declarations();
        for (const auto& item : m_.items) {
            if (auto* ca = std::get_if<ContinuousAssign>(&item)) {
                for (const auto& [lhs, rhs] : ca->assignments)
                    add_assign(lhs, identifiers_in(rhs), EdgeKind::Continuous, lines(file_, ca->loc),
                               lines(file_, ca->loc), {});
            }
            else if (auto* pb = std::get_if<ProceduralBlock>(&item)) {
                std::vector<std::set<std::string>> control;
                walk(pb->body, control, lines(file_, pb->loc));
            }
            else if (auto* inst = std::get_if<Instantiation>(&item)) {
                for (const auto& d : inst->instances) {
                    Instance in;
                    in.name = d.name;
                    in.module_name = inst->module_name;
                    in.span = lines(file_, inst->instances.size() == 1 ? inst->loc : d.loc);
                    for (std::size_t i = 0; i < d.connections.size(); ++i) {
                        const auto& c = d.connections[i];
                        Connection conn;
                        conn.formal = c.formal.empty() ? "#" + std::to_string(i) : c.formal;
                        conn.open = !c.actual.has_value();
                        if (c.actual)
                            conn.actual_signals = declared_only(identifiers_in(*c.actual), c.loc);
                        in.connections.push_back(std::move(conn));
                    }
                    def_.instances.push_back(std::move(in));
                }
            }
        }
        return std::move(def_);
    }

private:
    void add_port(const Declaration& d, const Declarator& dn) {
        if (def_.find_port(dn.name))
            fail(ErrorCode::SyntaxError, file_ + ":" + std::to_string(dn.loc.first_line) + ": port '" + dn.name +
                                             "' declared twice in module " + m_.name);
        def_.ports.push_back({dn.name, direction_of(d.kind), range_width(d.range),
                              {file_, d.loc.first_line, dn.loc.last_line}});
    }

    void collect_declarations() {
        for (const auto& p : m_.header_params)
            for (const auto& dn : p.names)
                def_.parameters.insert(dn.name);
        if (m_.ansi) {
            for (const auto& d : m_.ansi_ports)
                for (const auto& dn : d.names)
                    add_port(d, dn);
        }
        // non-ANSI directions come from the body; order follows the header list
        std::map<std::string, PortDecl> body_ports;
        for (const auto& item : m_.items) {
            const auto* d = std::get_if<Declaration>(&item);
            if (!d)
                continue;
            for (const auto& dn : d->names) {
                LineSpan span{file_, d->loc.first_line, dn.loc.last_line};
                if (is_direction(d->kind)) {
                    if (m_.ansi) {
                        add_port(*d, dn);
                        continue;
                    }
                    if (body_ports.contains(dn.name))
                        fail(ErrorCode::SyntaxError, file_ + ":" + std::to_string(dn.loc.first_line) +
                                                         ": port '" + dn.name + "' declared twice");
                    body_ports[dn.name] = {dn.name, direction_of(d->kind), range_width(d->range), span};
                }
                else if (d->kind == DeclKind::Parameter || d->kind == DeclKind::Localparam ||
                         d->kind == DeclKind::Genvar) {
                    def_.parameters.insert(dn.name);
                }
            }
        }
        if (!m_.ansi) {
            for (const auto& name : m_.port_names) {
                auto it = body_ports.find(name);
                if (it == body_ports.end())
                    fail(ErrorCode::SyntaxError, file_ + ": port '" + name + "' of module " + m_.name +
                                                     " has no direction declaration");
                def_.ports.push_back(it->second);
                body_ports.erase(it);
            }
            for (const auto& [name, port] : body_ports)
                fail(ErrorCode::SyntaxError, file_ + ":" + std::to_string(port.span.first) + ": '" + name +
                                                 "' is declared as a port but missing from the port list of " +
                                                 m_.name);
        }
        for (const auto& item : m_.items) {
            const auto* d = std::get_if<Declaration>(&item);
            if (!d || is_direction(d->kind) || d->kind == DeclKind::Parameter ||
                d->kind == DeclKind::Localparam || d->kind == DeclKind::Genvar)
                continue;
            for (const auto& dn : d->names) {
                if (def_.find_port(dn.name))
                    continue; // "output q; reg q;" refines the port
                if (def_.find_net(dn.name))
                    fail(ErrorCode::SyntaxError, file_ + ":" + std::to_string(dn.loc.first_line) + ": '" +
                                                     dn.name + "' declared twice in module " + m_.name);
                int width = d->kind == DeclKind::Integer ? 32 : range_width(d->range);
                def_.nets.push_back({dn.name, std::string(to_string(d->kind)), width,
                                     {file_, d->loc.first_line, dn.loc.last_line}});
            }
        }
        // net declarations with initializers behave like continuous assigns
        for (const auto& item : m_.items) {
            const auto* d = std::get_if<Declaration>(&item);
            if (!d || is_direction(d->kind) || d->kind == DeclKind::Parameter ||
                d->kind == DeclKind::Localparam || d->kind == DeclKind::Genvar)
                continue;
            for (const auto& dn : d->names) {
                if (!dn.init)
                    continue;
                Expr target;
                target.kind = ExprKind::Identifier;
                target.text = dn.name;
                LineSpan span{file_, d->loc.first_line, dn.loc.last_line};
                add_assign(target, identifiers_in(*dn.init), EdgeKind::Continuous, span, span, {});
            }
        }
    }

    std::set<std::string> declared_only(const std::set<std::string>& ids, const SourceLoc& where) {
        std::set<std::string> out;
        for (const auto& id : ids) {
            if (def_.declares(id))
                out.insert(id);
            else if (!def_.parameters.contains(id) && id.find('.') == std::string::npos)
                warnings_.push_back(file_ + ":" + std::to_string(where.first_line) + ": undeclared identifier '" +
                                    id + "' in module " + m_.name + " ignored for connectivity");
        }
        return out;
    }

    void add_assign(const Expr& lhs, const std::set<std::string>& reads, EdgeKind kind, LineSpan span,
                    LineSpan block_span, const std::set<std::string>& extra_reads) {
        std::set<std::string> all = reads;
        all.insert(extra_reads.begin(), extra_reads.end());
        collect_index_reads(lhs, all);
        auto declared = declared_only(all, lhs.loc);
        std::vector<std::pair<std::string, std::string>> targets;
        collect_targets(lhs, targets);
        for (auto& [target, select] : targets) {
            if (!def_.declares(target)) {
                warnings_.push_back(file_ + ":" + std::to_string(span.first) + ": assignment to undeclared '" +
                                    target + "' in module " + m_.name + " ignored");
                continue;
            }
            def_.assigns.push_back({target, select, declared, kind, span, block_span});
        }
    }

    void walk(const Stmt& s, std::vector<std::set<std::string>>& control, const LineSpan& block) {
        auto control_reads = [&] {
            std::set<std::string> out;
            for (const auto& c : control)
                out.insert(c.begin(), c.end());
            return out;
        };
        switch (s.kind) {
            case StmtKind::Block:
            case StmtKind::Forever:
            case StmtKind::EventControl:
            case StmtKind::Delay:
                for (const auto& b : s.body)
                    walk(b, control, block);
                break;
            case StmtKind::If:
            case StmtKind::While:
            case StmtKind::Repeat:
                control.push_back(identifiers_in(s.exprs[0]));
                for (const auto& b : s.body)
                    walk(b, control, block);
                control.pop_back();
                break;
            case StmtKind::Case: {
                auto reads = identifiers_in(s.exprs[0]);
                for (const auto& item : s.items)
                    for (const auto& l : item.labels) {
                        auto ids = identifiers_in(l);
                        reads.insert(ids.begin(), ids.end());
                    }
                control.push_back(std::move(reads));
                for (const auto& item : s.items)
                    for (const auto& b : item.body)
                        walk(b, control, block);
                control.pop_back();
                break;
            }
            case StmtKind::For:
                walk(s.body[0], control, block);
                control.push_back(identifiers_in(s.exprs[0]));
                walk(s.body[1], control, block);
                walk(s.body[2], control, block);
                control.pop_back();
                break;
            case StmtKind::Blocking:
            case StmtKind::NonBlocking:
                add_assign(s.exprs[0], identifiers_in(s.exprs[1]), EdgeKind::Procedural, lines(file_, s.loc), block,
                           control_reads());
                break;
            case StmtKind::TaskCall:
            case StmtKind::Disable:
            case StmtKind::Null:
                break;
        }
    }

    const Module& m_;
    std::string file_;
    std::vector<std::string>& warnings_;
    ModuleDef def_;
};

std::vector<std::string> port_order(const ModuleDef& def) {
    std::vector<std::string> out;
    for (const auto& p : def.ports)
        out.push_back(p.name);
    return out;
}

} // namespace

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Input: return "input";
        case Direction::Output: return "output";
        case Direction::Inout: return "inout";
    }
    return "?";
}

std::string_view to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Continuous: return "continuous";
        case EdgeKind::Procedural: return "procedural";
        case EdgeKind::PortBinding: return "port_binding";
    }
    return "?";
}

const PortDecl* ModuleDef::find_port(const std::string& n) const {
    for (const auto& p : ports)
        if (p.name == n)
            return &p;
    return nullptr;
}

const NetDecl* ModuleDef::find_net(const std::string& n) const {
    for (const auto& x : nets)
        if (x.name == n)
            return &x;
    return nullptr;
}

std::vector<std::string> ModuleDef::signal_names() const {
    std::vector<std::string> out;
    for (const auto& p : ports)
        out.push_back(p.name);
    for (const auto& n : nets)
        out.push_back(n.name);
    return out;
}

std::optional<LineSpan> ModuleDef::declaration_span(const std::string& n) const {
    if (auto* p = find_port(n))
        return p->span;
    if (auto* x = find_net(n))
        return x->span;
    return std::nullopt;
}

int ModuleDef::width_of(const std::string& n) const {
    if (auto* p = find_port(n))
        return p->width;
    if (auto* x = find_net(n))
        return x->width;
    return -1;
}

const ModuleDef& RtlDesign::module(const std::string& name) const {
    auto it = modules_.find(name);
    if (it == modules_.end())
        fail(ErrorCode::UnresolvedInstance, "no module named '" + name + "'");
    return it->second;
}

const SourceFile& RtlDesign::file(const std::string& path) const {
    for (const auto& f : files_)
        if (f.path == path)
            return f;
    fail(ErrorCode::PreconditionViolation, "no design file '" + path + "'");
}

std::string RtlDesign::slice(const LineSpan& span) const {
    const auto& text = file(span.file).text;
    std::string out;
    int line = 1;
    std::size_t pos = 0;
    while (pos < text.size() && line <= span.last) {
        auto nl = text.find('\n', pos);
        std::size_t end = nl == std::string::npos ? text.size() : nl + 1;
        if (line >= span.first)
            out.append(text, pos, end - pos);
        pos = end;
        ++line;
    }
    return out;
}

std::set<std::string> identifiers_in(const Expr& e) {
    std::set<std::string> out;
    std::function<void(const Expr&)> rec = [&](const Expr& x) {
        if (x.kind == ExprKind::Identifier) {
            out.insert(x.text);
            return;
        }
        for (const auto& op : x.operands)
            rec(op);
    };
    rec(e);
    return out;
}

std::vector<std::string> lvalue_targets(const Expr& lhs) {
    std::vector<std::pair<std::string, std::string>> t;
    collect_targets(lhs, t);
    std::vector<std::string> out;
    for (auto& [name, sel] : t)
        out.push_back(name);
    return out;
}

std::vector<SourceFile> load_sources(const std::vector<std::filesystem::path>& paths) {
    std::vector<SourceFile> out;
    for (const auto& p : paths)
        out.push_back({p.string(), read_text_file(p)});
    return out;
}

RtlDesign parse_design(std::vector<SourceFile> files, const std::optional<std::string>& top) {
    if (files.empty())
        fail(ErrorCode::PreconditionViolation, "parse_design needs at least one file");
    RtlDesign d;
    d.files_ = std::move(files);

    std::vector<std::future<ParseResult>> parsed;
    for (const auto& f : d.files_)
        parsed.push_back(std::async(std::launch::async, [&f] { return parse_source(f.text, f.path); }));
    std::vector<ParseResult> results;
    for (auto& p : parsed)
        results.push_back(p.get());
    for (auto& r : results) {
        d.warnings_.insert(d.warnings_.end(), r.warnings.begin(), r.warnings.end());
        d.units_->push_back(std::move(r.unit));
    }

    for (std::size_t fi = 0; fi < d.units_->size(); ++fi) {
        for (const auto& m : (*d.units_)[fi].modules) {
            if (d.modules_.contains(m.name))
                fail(ErrorCode::DuplicateModule, "module '" + m.name + "' defined more than once");
            d.modules_.emplace(m.name, ModuleBuilder(m, d.files_[fi].path, fi, d.warnings_).build());
        }
    }

    // link instances
    std::set<std::string> instantiated;
    for (auto& [name, def] : d.modules_) {
        for (auto& inst : def.instances) {
            auto it = d.modules_.find(inst.module_name);
            if (it == d.modules_.end())
                fail(ErrorCode::UnresolvedInstance, "instance '" + inst.name + "' in module " + name +
                                                        " refers to undefined module '" + inst.module_name + "'");
            instantiated.insert(inst.module_name);
            const auto order = port_order(it->second);
            for (auto& c : inst.connections) {
                if (!c.formal.empty() && c.formal[0] == '#') {
                    auto idx = std::stoul(c.formal.substr(1));
                    if (idx >= order.size())
                        fail(ErrorCode::UnresolvedInstance, "instance '" + inst.name + "' has more positional "
                                                            "connections than module " + inst.module_name + " has ports");
                    c.formal = order[idx];
                }
                if (!it->second.find_port(c.formal))
                    fail(ErrorCode::UnresolvedInstance, "module " + inst.module_name + " has no port '" + c.formal +
                                                            "' (instance '" + inst.name + "' in " + name + ")");
            }
        }
    }

    if (top) {
        if (!d.modules_.contains(*top))
            fail(ErrorCode::AmbiguousTop, "requested top module '" + *top + "' is not defined");
        d.root_ = *top;
    }
    else {
        std::vector<std::string> candidates;
        for (const auto& [name, def] : d.modules_)
            if (!instantiated.contains(name))
                candidates.push_back(name);
        if (candidates.size() != 1) {
            std::string list;
            for (const auto& c : candidates)
                list += (list.empty() ? "" : ", ") + c;
            fail(ErrorCode::AmbiguousTop, candidates.empty()
                                              ? "every module is instantiated; pass --top"
                                              : "several top-level candidates (" + list + "); pass --top");
        }
        d.root_ = candidates.front();
    }

    // reject recursive instantiation below the root
    std::function<void(const std::string&, std::vector<std::string>&)> check =
        [&](const std::string& mod, std::vector<std::string>& stack) {
            if (std::find(stack.begin(), stack.end(), mod) != stack.end())
                fail(ErrorCode::UnresolvedInstance, "recursive instantiation of module '" + mod + "'");
            stack.push_back(mod);
            for (const auto& inst : d.modules_.at(mod).instances)
                check(inst.module_name, stack);
            stack.pop_back();
        };
    std::vector<std::string> stack;
    check(d.root_, stack);
    return d;
}

std::vector<InstanceNode> instance_tree(const RtlDesign& design) {
    std::vector<InstanceNode> out;
    std::function<void(const std::string&, std::vector<std::string>&)> rec =
        [&](const std::string& mod, std::vector<std::string>& path) {
            out.push_back({path, mod});
            for (const auto& inst : design.module(mod).instances) {
                path.push_back(inst.name);
                rec(inst.module_name, path);
                path.pop_back();
            }
        };
    std::vector<std::string> path;
    rec(design.root_module(), path);
    return out;
}

std::string SignalRef::hierarchical_name(const std::string& root) const {
    std::string out = root;
    for (const auto& p : module_path)
        out += "." + p;
    return out + "." + signal;
}

std::optional<std::size_t> SignalGraph::find(const SignalRef& ref) const {
    auto it = index_.find(ref);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t SignalGraph::add_node(const SignalRef& ref) {
    if (auto existing = find(ref))
        return *existing;
    std::size_t id = nodes_.size();
    nodes_.push_back(ref);
    index_.emplace(ref, id);
    succ_.emplace_back();
    return id;
}

void SignalGraph::add_edge(std::size_t from, std::size_t to, EdgeKind kind, LineSpan span) {
    witnesses_.push_back({from, to, kind, span});
    if (edges_.contains({from, to}))
        return;
    edges_.emplace(std::make_pair(from, to), kind);
    auto& s = succ_[from];
    auto pos = std::lower_bound(s.begin(), s.end(), to,
                                [&](std::size_t a, std::size_t b) { return nodes_[a] < nodes_[b]; });
    s.insert(pos, to);
}

bool SignalGraph::has_edge(std::size_t from, std::size_t to) const {
    return edges_.contains({from, to});
}

std::optional<EdgeKind> SignalGraph::edge_kind(std::size_t from, std::size_t to) const {
    auto it = edges_.find({from, to});
    if (it == edges_.end())
        return std::nullopt;
    return it->second;
}

std::vector<GraphEdge> SignalGraph::edges() const {
    std::vector<GraphEdge> out;
    for (const auto& [key, kind] : edges_)
        out.push_back({key.first, key.second, kind});
    return out;
}

SignalGraph SignalGraph::reversed() const {
    SignalGraph g;
    for (const auto& n : nodes_)
        g.add_node(n);
    for (const auto& w : witnesses_)
        g.add_edge(w.to, w.from, w.kind, w.span);
    return g;
}

Json SignalGraph::to_json(const std::string& root) const {
    Json nodes = Json::array();
    for (const auto& n : nodes_)
        nodes.push_back(n.hierarchical_name(root));
    Json edges = Json::array();
    for (const auto& e : this->edges())
        edges.push_back({{"from", nodes_[e.from].hierarchical_name(root)},
                         {"to", nodes_[e.to].hierarchical_name(root)},
                         {"kind", rtl::to_string(e.kind)}});
    return Json{{"nodes", nodes}, {"edges", edges}};
}

SignalGraph build_connectivity(const RtlDesign& design) {
    SignalGraph g;
    auto tree = instance_tree(design);
    for (const auto& node : tree) {
        const auto& def = design.module(node.module);
        for (const auto& name : def.signal_names())
            g.add_node({node.path, def.name, name, *def.declaration_span(name)});
    }
    auto id = [&](const std::vector<std::string>& path, const ModuleDef& def, const std::string& sig) {
        return *g.find({path, def.name, sig, {}});
    };
    for (const auto& node : tree) {
        const auto& def = design.module(node.module);
        for (const auto& a : def.assigns)
            for (const auto& r : a.rhs_signals)
                g.add_edge(id(node.path, def, r), id(node.path, def, a.lhs), a.kind, a.span);
        for (const auto& inst : def.instances) {
            const auto& child = design.module(inst.module_name);
            auto child_path = node.path;
            child_path.push_back(inst.name);
            for (const auto& c : inst.connections) {
                if (c.open)
                    continue;
                const auto* port = child.find_port(c.formal);
                auto child_id = id(child_path, child, c.formal);
                for (const auto& s : c.actual_signals) {
                    auto parent_id = id(node.path, def, s);
                    if (port->direction != Direction::Output)
                        g.add_edge(parent_id, child_id, EdgeKind::PortBinding, inst.span);
                    if (port->direction != Direction::Input)
                        g.add_edge(child_id, parent_id, EdgeKind::PortBinding, inst.span);
                }
            }
        }
    }
    return g;
}

SignalLocation locate_signal(const RtlDesign& design, const std::string& canonical_name) {
    const std::string want = lower(canonical_name);
    SignalLocation loc;
    for (const auto& node : instance_tree(design)) {
        const auto& def = design.module(node.module);
        for (const auto& name : def.signal_names())
            if (lower(name) == want)
                loc.refs.push_back({node.path, def.name, name, *def.declaration_span(name)});
    }
    if (loc.refs.empty())
        fail(ErrorCode::SignalNotFound, "signal '" + canonical_name + "' is not declared in the design");
    std::stable_sort(loc.refs.begin(), loc.refs.end(), [](const SignalRef& a, const SignalRef& b) {
        if (a.module_path.size() != b.module_path.size())
            return a.module_path.size() < b.module_path.size();
        if (a.module_path != b.module_path)
            return a.module_path < b.module_path;
        return a.signal < b.signal;
    });
    loc.module0 = loc.refs.front();
    return loc;
}

Json to_json(const LineSpan& span) {
    return Json{{"file", span.file}, {"first_line", span.first}, {"last_line", span.last}};
}

LineSpan line_span_from_json(const Json& j) {
    return {j.at("file").get<std::string>(), j.at("first_line").get<int>(), j.at("last_line").get<int>()};
}

Json to_json(const SignalRef& ref) {
    return Json{{"module_path", ref.module_path},
                {"module", ref.module},
                {"signal", ref.signal},
                {"decl_span", to_json(ref.decl_span)}};
}

SignalRef signal_ref_from_json(const Json& j) {
    return {j.at("module_path").get<std::vector<std::string>>(), j.at("module").get<std::string>(),
            j.at("signal").get<std::string>(), line_span_from_json(j.at("decl_span"))};
}

Json design_to_json(const RtlDesign& design) {
    Json mods = Json::object();
    for (const auto& [name, def] : design.modules()) {
        Json ports = Json::array();
        for (const auto& p : def.ports)
            ports.push_back({{"name", p.name}, {"direction", to_string(p.direction)}, {"width", p.width},
                             {"span", to_json(p.span)}});
        Json nets = Json::array();
        for (const auto& n : def.nets)
            nets.push_back({{"name", n.name}, {"kind", n.kind}, {"width", n.width}, {"span", to_json(n.span)}});
        Json insts = Json::array();
        for (const auto& i : def.instances) {
            Json conns = Json::array();
            for (const auto& c : i.connections)
                conns.push_back({{"formal", c.formal}, {"actual_signals", c.actual_signals}, {"open", c.open}});
            insts.push_back({{"name", i.name}, {"module", i.module_name}, {"connections", conns},
                             {"span", to_json(i.span)}});
        }
        Json assigns = Json::array();
        for (const auto& a : def.assigns)
            assigns.push_back({{"lhs", a.lhs}, {"lhs_select", a.lhs_select}, {"rhs_signals", a.rhs_signals},
                               {"kind", to_string(a.kind)}, {"span", to_json(a.span)},
                               {"block_span", to_json(a.block_span)}});
        mods[name] = {{"ports", ports}, {"nets", nets}, {"instances", insts}, {"assigns", assigns},
                      {"parameters", def.parameters}, {"source_span", to_json(def.source_span)}};
    }
    return Json{{"root_module", design.root_module()}, {"modules", mods}, {"warnings", design.warnings()}};
}

} // namespace assertgen::rtl
