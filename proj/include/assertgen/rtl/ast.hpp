// Syntax tree for the supported Verilog subset.
//
// Source locations never participate in equality: two trees compare equal when
// they have the same shape and text, wherever they came from.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace assertgen::rtl {

struct SourceLoc {
    std::size_t begin = 0; // byte offsets into the file text, half-open
    std::size_t end = 0;
    int first_line = 0;    // 1-based, inclusive
    int last_line = 0;
    std::size_t op_begin = 0; // operator token offset for unary and binary expressions

    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

enum class ExprKind {
    Identifier, // text = name, dotted when hierarchical
    Number,     // text = literal without embedded whitespace
    String,     // text = literal including quotes
    Macro,      // text = "`NAME"
    Unary,      // text = operator, operands = [operand]
    Binary,     // text = operator, operands = [lhs, rhs]
    Ternary,    // operands = [cond, then, else]
    Index,      // operands = [base, index]
    Range,      // text = ":" | "+:" | "-:", operands = [base, left, right]
    Concat,     // operands = elements
    Replicate,  // operands = [count, Concat]
    Call,       // text = function or system task name, operands = args
};

struct Expr {
    ExprKind kind = ExprKind::Identifier;
    std::string text;
    std::vector<Expr> operands;
    SourceLoc loc;

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct Event {
    std::string edge; // "", "posedge", "negedge"
    Expr expr;
    friend bool operator==(const Event&, const Event&) = default;
};

enum class StmtKind {
    Block,        // text = label, body = statements
    If,           // exprs = [cond], body = [then] or [then, else]; else may be Null
    Case,         // text = case|casez|casex, exprs = [selector], items
    Blocking,     // exprs = [lhs, rhs] (+ [delay])
    NonBlocking,  // exprs = [lhs, rhs] (+ [delay])
    For,          // exprs = [cond], body = [init, step, stmt]
    While,        // exprs = [cond], body = [stmt]
    Repeat,       // exprs = [count], body = [stmt]
    Forever,      // body = [stmt]
    EventControl, // events / star, body = [stmt]
    Delay,        // exprs = [delay], body = [stmt]
    TaskCall,     // text = name, exprs = args
    Disable,      // text = target
    Null,
};

struct Stmt;

struct CaseItem {
    bool is_default = false;
    std::vector<Expr> labels;
    std::vector<Stmt> body; // exactly one statement
    friend bool operator==(const CaseItem&, const CaseItem&) = default;
};

struct Stmt {
    StmtKind kind = StmtKind::Null;
    std::string text;
    std::vector<Expr> exprs;
    std::vector<Stmt> body;
    std::vector<CaseItem> items;
    bool star = false; // @* / @(*)
    std::vector<Event> events;
    SourceLoc loc;

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct RangeDecl {
    Expr left;
    Expr right;
    friend bool operator==(const RangeDecl&, const RangeDecl&) = default;
};

struct Declarator {
    std::string name;
    std::vector<RangeDecl> unpacked;
    std::optional<Expr> init;
    SourceLoc loc;
    friend bool operator==(const Declarator&, const Declarator&) = default;
};

enum class DeclKind {
    Input, Output, Inout,
    Wire, Reg, Logic, Tri, Integer, Genvar, Supply0, Supply1,
    Parameter, Localparam,
};

struct Declaration {
    DeclKind kind = DeclKind::Wire;
    std::string net_type; // for ports: "", "wire", "reg", "logic"; for parameters: "", "integer"
    bool is_signed = false;
    std::optional<RangeDecl> range;
    std::vector<Declarator> names;
    SourceLoc loc;
    friend bool operator==(const Declaration&, const Declaration&) = default;
};

struct ContinuousAssign {
    std::vector<std::pair<Expr, Expr>> assignments; // (lhs, rhs)
    SourceLoc loc;
    friend bool operator==(const ContinuousAssign&, const ContinuousAssign&) = default;
};

struct ProceduralBlock {
    std::string keyword; // always, always_ff, always_comb, always_latch, initial
    Stmt body;
    SourceLoc loc;
    friend bool operator==(const ProceduralBlock&, const ProceduralBlock&) = default;
};

struct PortConnection {
    std::string formal;          // empty for positional
    std::optional<Expr> actual;  // empty for ".p()"
    SourceLoc loc;
    friend bool operator==(const PortConnection&, const PortConnection&) = default;
};

struct ParamOverride {
    std::string name; // empty for positional
    std::optional<Expr> value;
    friend bool operator==(const ParamOverride&, const ParamOverride&) = default;
};

struct InstanceDecl {
    std::string name;
    std::vector<PortConnection> connections;
    SourceLoc loc;
    friend bool operator==(const InstanceDecl&, const InstanceDecl&) = default;
};

struct Instantiation {
    std::string module_name;
    std::vector<ParamOverride> params;
    bool has_param_list = false;
    std::vector<InstanceDecl> instances;
    SourceLoc loc;
    friend bool operator==(const Instantiation&, const Instantiation&) = default;
};

/// Unsupported region kept verbatim (generate, function, task, ...).
struct Opaque {
    std::string keyword;
    std::string text;
    SourceLoc loc;
    friend bool operator==(const Opaque&, const Opaque&) = default;
};

using ModuleItem = std::variant<Declaration, ContinuousAssign, ProceduralBlock, Instantiation, Opaque>;

struct Module {
    std::string name;
    std::vector<Declaration> header_params;
    bool has_header_params = false;
    bool ansi = false;
    bool has_port_list = false;
    std::vector<std::string> port_names;   // non-ANSI header
    std::vector<Declaration> ansi_ports;   // ANSI header
    std::vector<ModuleItem> items;
    SourceLoc loc;
    friend bool operator==(const Module&, const Module&) = default;
};

struct SourceUnit {
    std::vector<Module> modules;
    friend bool operator==(const SourceUnit&, const SourceUnit&) = default;
};

const SourceLoc& item_loc(const ModuleItem& item);

std::string_view to_string(DeclKind kind);
bool is_direction(DeclKind kind);

/// Shape-only view of a syntax tree used for node indexing and tree diffs.
struct GenericNode {
    std::string label;
    std::vector<GenericNode> children;
    SourceLoc loc;
};

GenericNode to_generic(const SourceUnit& unit);
GenericNode to_generic(const Expr& expr);

/// Preorder indices of the nodes at which two generic trees differ. A node is
/// reported when its label or arity differs, or when more than one of its
/// children differs; otherwise the diff descends into the single differing
/// child.
std::vector<std::size_t> diff_nodes(const GenericNode& a, const GenericNode& b);

std::size_t count_nodes(const GenericNode& node);

} // namespace assertgen::rtl
