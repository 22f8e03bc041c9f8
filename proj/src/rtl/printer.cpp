#include "assertgen/rtl/printer.hpp"

namespace assertgen::rtl {

namespace {

std::string pad(int indent) {
    return std::string(static_cast<std::size_t>(indent) * 2, ' ');
}

bool is_compound(const Expr& e) {
    return e.kind == ExprKind::Binary || e.kind == ExprKind::Ternary;
}

std::string wrapped(const Expr& e, bool wrap) {
    return wrap ? "(" + print_expr(e) + ")" : print_expr(e);
}

std::string join_exprs(const std::vector<Expr>& es) {
    std::string out;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (i)
            out += ", ";
        out += print_expr(es[i]);
    }
    return out;
}

std::string print_range(const RangeDecl& r) {
    return "[" + print_expr(r.left) + ":" + print_expr(r.right) + "]";
}

std::string print_declaration_body(const Declaration& d) {
    std::string out(to_string(d.kind));
    if (!d.net_type.empty())
        out += " " + d.net_type;
    if (d.is_signed)
        out += " signed";
    if (d.range)
        out += " " + print_range(*d.range);
    for (std::size_t i = 0; i < d.names.size(); ++i) {
        out += i ? ", " : " ";
        out += d.names[i].name;
        for (const auto& u : d.names[i].unpacked)
            out += " " + print_range(u);
        if (d.names[i].init)
            out += " = " + print_expr(*d.names[i].init);
    }
    return out;
}

std::string print_body_stmt(const Stmt& s, int indent) {
    // statement nested under if/for/event control goes on its own line
    return "\n" + print_stmt(s, indent + 1);
}

} // namespace

std::string print_expr(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Identifier:
        case ExprKind::Number:
        case ExprKind::String:
        case ExprKind::Macro:
            return e.text;
        case ExprKind::Unary: {
            const Expr& op = e.operands[0];
            bool wrap = is_compound(op) || op.kind == ExprKind::Unary;
            return e.text + wrapped(op, wrap);
        }
        case ExprKind::Binary:
            return wrapped(e.operands[0], is_compound(e.operands[0])) + " " + e.text + " " +
                   wrapped(e.operands[1], is_compound(e.operands[1]));
        case ExprKind::Ternary:
            return wrapped(e.operands[0], is_compound(e.operands[0])) + " ? " +
                   wrapped(e.operands[1], is_compound(e.operands[1])) + " : " +
                   wrapped(e.operands[2], is_compound(e.operands[2]));
        case ExprKind::Index: {
            const Expr& base = e.operands[0];
            return wrapped(base, is_compound(base) || base.kind == ExprKind::Unary) + "[" +
                   print_expr(e.operands[1]) + "]";
        }
        case ExprKind::Range: {
            const Expr& base = e.operands[0];
            return wrapped(base, is_compound(base) || base.kind == ExprKind::Unary) + "[" +
                   print_expr(e.operands[1]) + e.text + print_expr(e.operands[2]) + "]";
        }
        case ExprKind::Concat:
            return "{" + join_exprs(e.operands) + "}";
        case ExprKind::Replicate:
            return "{" + print_expr(e.operands[0]) + print_expr(e.operands[1]) + "}";
        case ExprKind::Call:
            if (e.operands.empty() && !e.text.empty() && e.text[0] == '$')
                return e.text;
            return e.text + "(" + join_exprs(e.operands) + ")";
    }
    return {};
}

std::string print_stmt(const Stmt& s, int indent) {
    std::string p = pad(indent);
    switch (s.kind) {
        case StmtKind::Block: {
            std::string out = p + "begin";
            if (!s.text.empty())
                out += " : " + s.text;
            out += "\n";
            for (const auto& b : s.body)
                out += print_stmt(b, indent + 1) + "\n";
            return out + p + "end";
        }
        case StmtKind::If: {
            std::string out = p + "if (" + print_expr(s.exprs[0]) + ")" + print_body_stmt(s.body[0], indent);
            if (s.body.size() > 1)
                out += "\n" + p + "else" + print_body_stmt(s.body[1], indent);
            return out;
        }
        case StmtKind::Case: {
            std::string out = p + s.text + " (" + print_expr(s.exprs[0]) + ")\n";
            for (const auto& item : s.items) {
                out += pad(indent + 1) + (item.is_default ? "default" : join_exprs(item.labels)) + ":" +
                       print_body_stmt(item.body[0], indent + 1) + "\n";
            }
            return out + p + "endcase";
        }
        case StmtKind::Blocking:
        case StmtKind::NonBlocking: {
            std::string out = p + print_expr(s.exprs[0]) + (s.kind == StmtKind::Blocking ? " = " : " <= ");
            if (s.exprs.size() > 2)
                out += "#" + wrapped(s.exprs[2], true) + " ";
            return out + print_expr(s.exprs[1]) + ";";
        }
        case StmtKind::For: {
            auto inline_assign = [](const Stmt& a) {
                return print_expr(a.exprs[0]) + " = " + print_expr(a.exprs[1]);
            };
            return p + "for (" + inline_assign(s.body[0]) + "; " + print_expr(s.exprs[0]) + "; " +
                   inline_assign(s.body[1]) + ")" + print_body_stmt(s.body[2], indent);
        }
        case StmtKind::While:
            return p + "while (" + print_expr(s.exprs[0]) + ")" + print_body_stmt(s.body[0], indent);
        case StmtKind::Repeat:
            return p + "repeat (" + print_expr(s.exprs[0]) + ")" + print_body_stmt(s.body[0], indent);
        case StmtKind::Forever:
            return p + "forever" + print_body_stmt(s.body[0], indent);
        case StmtKind::EventControl: {
            std::string out = p + "@(";
            if (s.star) {
                out += "*";
            }
            else {
                for (std::size_t i = 0; i < s.events.size(); ++i) {
                    if (i)
                        out += " or ";
                    if (!s.events[i].edge.empty())
                        out += s.events[i].edge + " ";
                    out += print_expr(s.events[i].expr);
                }
            }
            return out + ")" + print_body_stmt(s.body[0], indent);
        }
        case StmtKind::Delay:
            return p + "#" + wrapped(s.exprs[0], true) + print_body_stmt(s.body[0], indent);
        case StmtKind::TaskCall:
            if (s.exprs.empty() && !s.text.empty() && s.text[0] == '$')
                return p + s.text + ";";
            return p + s.text + "(" + join_exprs(s.exprs) + ");";
        case StmtKind::Disable:
            return p + "disable " + s.text + ";";
        case StmtKind::Null:
            return p + ";";
    }
    return {};
}

std::string print_item(const ModuleItem& item, int indent) {
    std::string p = pad(indent);
    return std::visit(
        [&](const auto& it) -> std::string {
            using T = std::decay_t<decltype(it)>;
            if constexpr (std::is_same_v<T, Declaration>) {
                return p + print_declaration_body(it) + ";";
            }
            else if constexpr (std::is_same_v<T, ContinuousAssign>) {
                std::string out = p + "assign ";
                for (std::size_t i = 0; i < it.assignments.size(); ++i) {
                    if (i)
                        out += ", ";
                    out += print_expr(it.assignments[i].first) + " = " + print_expr(it.assignments[i].second);
                }
                return out + ";";
            }
            else if constexpr (std::is_same_v<T, ProceduralBlock>) {
                std::string body = print_stmt(it.body, indent);
                return p + it.keyword + "\n" + body;
            }
            else if constexpr (std::is_same_v<T, Instantiation>) {
                std::string out = p + it.module_name;
                if (it.has_param_list) {
                    out += " #(";
                    for (std::size_t i = 0; i < it.params.size(); ++i) {
                        if (i)
                            out += ", ";
                        const auto& prm = it.params[i];
                        if (!prm.name.empty())
                            out += "." + prm.name + "(" + (prm.value ? print_expr(*prm.value) : "") + ")";
                        else
                            out += print_expr(*prm.value);
                    }
                    out += ")";
                }
                for (std::size_t i = 0; i < it.instances.size(); ++i) {
                    const auto& inst = it.instances[i];
                    out += i ? ",\n" + p + "  " : " ";
                    out += inst.name + " (";
                    for (std::size_t c = 0; c < inst.connections.size(); ++c) {
                        const auto& conn = inst.connections[c];
                        out += c ? ",\n" : "\n";
                        out += p + "    ";
                        if (!conn.formal.empty())
                            out += "." + conn.formal + "(" + (conn.actual ? print_expr(*conn.actual) : "") + ")";
                        else
                            out += print_expr(*conn.actual);
                    }
                    out += inst.connections.empty() ? ")" : "\n" + p + "  )";
                }
                return out + ";";
            }
            else {
                return p + it.text;
            }
        },
        item);
}

std::string print_module(const Module& m) {
    std::string out = "module " + m.name;
    if (m.has_header_params) {
        out += " #(";
        for (std::size_t i = 0; i < m.header_params.size(); ++i) {
            if (i)
                out += ", ";
            out += print_declaration_body(m.header_params[i]);
        }
        out += ")";
    }
    if (m.has_port_list) {
        out += " (";
        if (m.ansi) {
            for (std::size_t i = 0; i < m.ansi_ports.size(); ++i) {
                out += i ? ",\n  " : "\n  ";
                out += print_declaration_body(m.ansi_ports[i]);
            }
            if (!m.ansi_ports.empty())
                out += "\n";
        }
        else {
            for (std::size_t i = 0; i < m.port_names.size(); ++i) {
                if (i)
                    out += ", ";
                out += m.port_names[i];
            }
        }
        out += ")";
    }
    out += ";\n";
    for (const auto& item : m.items)
        out += print_item(item, 1) + "\n";
    return out + "endmodule\n";
}

std::string print_unit(const SourceUnit& unit) {
    std::string out;
    for (std::size_t i = 0; i < unit.modules.size(); ++i) {
        if (i)
            out += "\n";
        out += print_module(unit.modules[i]);
    }
    return out;
}

} // namespace assertgen::rtl
