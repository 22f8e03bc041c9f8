#include "assertgen/rtl/ast.hpp"

namespace assertgen::rtl {

namespace {

std::string_view expr_kind_name(ExprKind k) {
    switch (k) {
        case ExprKind::Identifier: return "Identifier";
        case ExprKind::Number: return "Number";
        case ExprKind::String: return "String";
        case ExprKind::Macro: return "Macro";
        case ExprKind::Unary: return "Unary";
        case ExprKind::Binary: return "Binary";
        case ExprKind::Ternary: return "Ternary";
        case ExprKind::Index: return "Index";
        case ExprKind::Range: return "Range";
        case ExprKind::Concat: return "Concat";
        case ExprKind::Replicate: return "Replicate";
        case ExprKind::Call: return "Call";
    }
    return "?";
}

std::string_view stmt_kind_name(StmtKind k) {
    switch (k) {
        case StmtKind::Block: return "Block";
        case StmtKind::If: return "If";
        case StmtKind::Case: return "Case";
        case StmtKind::Blocking: return "Blocking";
        case StmtKind::NonBlocking: return "NonBlocking";
        case StmtKind::For: return "For";
        case StmtKind::While: return "While";
        case StmtKind::Repeat: return "Repeat";
        case StmtKind::Forever: return "Forever";
        case StmtKind::EventControl: return "EventControl";
        case StmtKind::Delay: return "Delay";
        case StmtKind::TaskCall: return "TaskCall";
        case StmtKind::Disable: return "Disable";
        case StmtKind::Null: return "Null";
    }
    return "?";
}

GenericNode node(std::string label, SourceLoc loc = {}) {
    GenericNode n;
    n.label = std::move(label);
    n.loc = loc;
    return n;
}

GenericNode generic(const RangeDecl& r) {
    auto n = node("range");
    n.children.push_back(to_generic(r.left));
    n.children.push_back(to_generic(r.right));
    return n;
}

GenericNode generic(const Stmt& s) {
    auto n = node("stmt:" + std::string(stmt_kind_name(s.kind)) + ":" + s.text + (s.star ? ":*" : ""), s.loc);
    for (const auto& e : s.exprs)
        n.children.push_back(to_generic(e));
    for (const auto& ev : s.events) {
        auto en = node("event:" + ev.edge);
        en.children.push_back(to_generic(ev.expr));
        n.children.push_back(std::move(en));
    }
    for (const auto& b : s.body)
        n.children.push_back(generic(b));
    for (const auto& item : s.items) {
        auto in = node(item.is_default ? "case_item:default" : "case_item");
        for (const auto& l : item.labels)
            in.children.push_back(to_generic(l));
        for (const auto& b : item.body)
            in.children.push_back(generic(b));
        n.children.push_back(std::move(in));
    }
    return n;
}

GenericNode generic(const Declaration& d) {
    auto n = node("decl:" + std::string(to_string(d.kind)) + ":" + d.net_type + (d.is_signed ? ":signed" : ""),
                  d.loc);
    if (d.range)
        n.children.push_back(generic(*d.range));
    for (const auto& dn : d.names) {
        auto x = node("declarator:" + dn.name, dn.loc);
        for (const auto& r : dn.unpacked)
            x.children.push_back(generic(r));
        if (dn.init) {
            auto init = node("init");
            init.children.push_back(to_generic(*dn.init));
            x.children.push_back(std::move(init));
        }
        n.children.push_back(std::move(x));
    }
    return n;
}

GenericNode generic(const ModuleItem& item) {
    return std::visit(
        [](const auto& it) -> GenericNode {
            using T = std::decay_t<decltype(it)>;
            if constexpr (std::is_same_v<T, Declaration>) {
                return generic(it);
            }
            else if constexpr (std::is_same_v<T, ContinuousAssign>) {
                auto n = node("assign", it.loc);
                for (const auto& [lhs, rhs] : it.assignments) {
                    auto a = node("assignment");
                    a.children.push_back(to_generic(lhs));
                    a.children.push_back(to_generic(rhs));
                    n.children.push_back(std::move(a));
                }
                return n;
            }
            else if constexpr (std::is_same_v<T, ProceduralBlock>) {
                auto n = node("process:" + it.keyword, it.loc);
                n.children.push_back(generic(it.body));
                return n;
            }
            else if constexpr (std::is_same_v<T, Instantiation>) {
                auto n = node("instantiation:" + it.module_name + (it.has_param_list ? ":#" : ""), it.loc);
                for (const auto& p : it.params) {
                    auto pn = node("param:" + p.name);
                    if (p.value)
                        pn.children.push_back(to_generic(*p.value));
                    n.children.push_back(std::move(pn));
                }
                for (const auto& inst : it.instances) {
                    auto in = node("instance:" + inst.name, inst.loc);
                    for (const auto& c : inst.connections) {
                        auto cn = node("connection:" + c.formal + (c.actual ? "" : ":open"), c.loc);
                        if (c.actual)
                            cn.children.push_back(to_generic(*c.actual));
                        in.children.push_back(std::move(cn));
                    }
                    n.children.push_back(std::move(in));
                }
                return n;
            }
            else {
                return node("opaque:" + it.keyword + ":" + it.text, it.loc);
            }
        },
        item);
}

void diff_rec(const GenericNode& a, const GenericNode& b, std::size_t index,
              std::vector<std::size_t>& out) {
    if (a.label != b.label || a.children.size() != b.children.size()) {
        out.push_back(index);
        return;
    }
    std::vector<std::size_t> differing;
    std::vector<std::size_t> child_index;
    std::size_t next = index + 1;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        child_index.push_back(next);
        next += count_nodes(a.children[i]);
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        std::vector<std::size_t> sub;
        diff_rec(a.children[i], b.children[i], child_index[i], sub);
        if (!sub.empty())
            differing.push_back(i);
    }
    if (differing.empty())
        return;
    if (differing.size() > 1) {
        out.push_back(index);
        return;
    }
    diff_rec(a.children[differing[0]], b.children[differing[0]], child_index[differing[0]], out);
}

} // namespace

const SourceLoc& item_loc(const ModuleItem& item) {
    return std::visit([](const auto& it) -> const SourceLoc& { return it.loc; }, item);
}

std::string_view to_string(DeclKind kind) {
    switch (kind) {
        case DeclKind::Input: return "input";
        case DeclKind::Output: return "output";
        case DeclKind::Inout: return "inout";
        case DeclKind::Wire: return "wire";
        case DeclKind::Reg: return "reg";
        case DeclKind::Logic: return "logic";
        case DeclKind::Tri: return "tri";
        case DeclKind::Integer: return "integer";
        case DeclKind::Genvar: return "genvar";
        case DeclKind::Supply0: return "supply0";
        case DeclKind::Supply1: return "supply1";
        case DeclKind::Parameter: return "parameter";
        case DeclKind::Localparam: return "localparam";
    }
    return "?";
}

bool is_direction(DeclKind kind) {
    return kind == DeclKind::Input || kind == DeclKind::Output || kind == DeclKind::Inout;
}

GenericNode to_generic(const Expr& expr) {
    auto n = node("expr:" + std::string(expr_kind_name(expr.kind)) + ":" + expr.text, expr.loc);
    for (const auto& op : expr.operands)
        n.children.push_back(to_generic(op));
    return n;
}

GenericNode to_generic(const SourceUnit& unit) {
    auto root = node("unit");
    for (const auto& m : unit.modules) {
        auto mn = node("module:" + m.name + (m.ansi ? ":ansi" : "") + (m.has_port_list ? ":ports" : "") +
                           (m.has_header_params ? ":#" : ""),
                       m.loc);
        for (const auto& p : m.header_params)
            mn.children.push_back(generic(p));
        for (const auto& p : m.port_names)
            mn.children.push_back(node("port:" + p));
        for (const auto& p : m.ansi_ports)
            mn.children.push_back(generic(p));
        for (const auto& item : m.items)
            mn.children.push_back(generic(item));
        root.children.push_back(std::move(mn));
    }
    return root;
}

std::size_t count_nodes(const GenericNode& n) {
    std::size_t c = 1;
    for (const auto& ch : n.children)
        c += count_nodes(ch);
    return c;
}

std::vector<std::size_t> diff_nodes(const GenericNode& a, const GenericNode& b) {
    std::vector<std::size_t> out;
    diff_rec(a, b, 0, out);
    return out;
}

} // namespace assertgen::rtl
