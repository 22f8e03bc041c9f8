// Elaborated view of a parsed Verilog design: module table, instance tree,
// dataflow edges and the signal connectivity graph.
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "assertgen/io.hpp"
#include "assertgen/rtl/ast.hpp"

namespace assertgen::rtl {

struct SourceFile {
    std::string path;
    std::string text;
};

/// Inclusive 1-based line range within one file.
struct LineSpan {
    std::string file;
    int first = 0;
    int last = 0;

    friend bool operator==(const LineSpan&, const LineSpan&) = default;
    friend auto operator<=>(const LineSpan&, const LineSpan&) = default;
};

enum class Direction { Input, Output, Inout };
std::string_view to_string(Direction d);

struct PortDecl {
    std::string name;
    Direction direction = Direction::Input;
    int width = -1; // -1 when not a constant
    LineSpan span;
};

struct NetDecl {
    std::string name;
    std::string kind; // wire, reg, logic, integer, ...
    int width = -1;
    LineSpan span;
};

struct Connection {
    std::string formal;
    std::set<std::string> actual_signals; // declared signals read or driven by the actual
    bool open = false;
};

struct Instance {
    std::string name;
    std::string module_name;
    std::vector<Connection> connections; // positional connections resolved to formals
    LineSpan span;
};

enum class EdgeKind { Continuous, Procedural, PortBinding };
std::string_view to_string(EdgeKind k);

struct AssignEdge {
    std::string lhs;
    std::string lhs_select; // printed bit/part select, empty for whole signal
    std::set<std::string> rhs_signals;
    EdgeKind kind = EdgeKind::Continuous;
    LineSpan span;       // the assignment statement
    LineSpan block_span; // enclosing always/initial block for procedural edges, else == span
};

struct ModuleDef {
    std::string name;
    std::vector<PortDecl> ports;
    std::vector<NetDecl> nets;
    std::vector<Instance> instances;
    std::vector<AssignEdge> assigns;
    std::set<std::string> parameters;
    LineSpan source_span;
    std::size_t file_index = 0;
    const Module* ast = nullptr;

    const PortDecl* find_port(const std::string& name) const;
    const NetDecl* find_net(const std::string& name) const;
    bool declares(const std::string& name) const { return find_port(name) || find_net(name); }
    /// Declared signal names in declaration order, ports first.
    std::vector<std::string> signal_names() const;
    std::optional<LineSpan> declaration_span(const std::string& name) const;
    int width_of(const std::string& name) const;
};

/// Parsed, linked design. Immutable once built; moving it keeps AST pointers valid.
class RtlDesign {
public:
    const std::vector<SourceFile>& files() const { return files_; }
    const std::vector<SourceUnit>& units() const { return *units_; }
    const std::map<std::string, ModuleDef>& modules() const { return modules_; }
    const std::string& root_module() const { return root_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    const ModuleDef& module(const std::string& name) const;
    bool has_module(const std::string& name) const { return modules_.contains(name); }
    const SourceFile& file(const std::string& path) const;

    /// Text of the given inclusive line range.
    std::string slice(const LineSpan& span) const;

private:
    friend RtlDesign parse_design(std::vector<SourceFile> files, const std::optional<std::string>& top);

    std::vector<SourceFile> files_;
    std::shared_ptr<std::vector<SourceUnit>> units_ = std::make_shared<std::vector<SourceUnit>>();
    std::map<std::string, ModuleDef> modules_;
    std::string root_;
    std::vector<std::string> warnings_;
};

/// Throws SyntaxError, DuplicateModule, UnresolvedInstance or AmbiguousTop.
RtlDesign parse_design(std::vector<SourceFile> files, const std::optional<std::string>& top = std::nullopt);

std::vector<SourceFile> load_sources(const std::vector<std::filesystem::path>& paths);

/// One signal in the elaborated hierarchy.
struct SignalRef {
    std::vector<std::string> module_path; // instance names from the root; empty at the root
    std::string module;                   // module name of the terminal scope
    std::string signal;
    LineSpan decl_span;

    /// root.inst1.inst2.signal
    std::string hierarchical_name(const std::string& root) const;

    friend bool operator==(const SignalRef& a, const SignalRef& b) {
        return a.module_path == b.module_path && a.signal == b.signal;
    }
    friend bool operator<(const SignalRef& a, const SignalRef& b) {
        if (a.module_path != b.module_path)
            return a.module_path < b.module_path;
        return a.signal < b.signal;
    }
};

struct InstanceNode {
    std::vector<std::string> path;
    std::string module;
};

/// Depth-first, children in declaration order.
std::vector<InstanceNode> instance_tree(const RtlDesign& design);

struct GraphEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeKind kind = EdgeKind::Continuous;
};

/// What produced an edge: one assignment or one port binding.
struct EdgeWitness {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeKind kind = EdgeKind::Continuous;
    LineSpan span;
};

class SignalGraph {
public:
    const std::vector<SignalRef>& nodes() const { return nodes_; }
    std::optional<std::size_t> find(const SignalRef& ref) const;
    std::size_t add_node(const SignalRef& ref);
    /// Adds (or merges into) the edge from -> to.
    void add_edge(std::size_t from, std::size_t to, EdgeKind kind, LineSpan span);

    /// Successors sorted by node order.
    const std::vector<std::size_t>& successors(std::size_t node) const { return succ_[node]; }
    bool has_edge(std::size_t from, std::size_t to) const;
    std::optional<EdgeKind> edge_kind(std::size_t from, std::size_t to) const;
    std::vector<GraphEdge> edges() const;
    const std::vector<EdgeWitness>& witnesses() const { return witnesses_; }

    /// Same nodes with every edge reversed.
    SignalGraph reversed() const;

    Json to_json(const std::string& root) const;

private:
    std::vector<SignalRef> nodes_;
    std::map<SignalRef, std::size_t> index_;
    std::vector<std::vector<std::size_t>> succ_;
    std::map<std::pair<std::size_t, std::size_t>, EdgeKind> edges_;
    std::vector<EdgeWitness> witnesses_;
};

/// Graph over every declared signal of every instance reachable from the root.
SignalGraph build_connectivity(const RtlDesign& design);

struct SignalLocation {
    std::vector<SignalRef> refs;
    SignalRef module0; // occurrence with the shortest module path
};

/// Case-insensitive match on the declared name. Throws SignalNotFound.
SignalLocation locate_signal(const RtlDesign& design, const std::string& canonical_name);

/// Identifiers read by an expression (selects included, function names excluded).
std::set<std::string> identifiers_in(const Expr& e);
/// Base signals written by an assignment target, e.g. {a, b[2]} -> {a, b}.
std::vector<std::string> lvalue_targets(const Expr& lhs);

Json to_json(const LineSpan& span);
LineSpan line_span_from_json(const Json& j);
Json to_json(const SignalRef& ref);
SignalRef signal_ref_from_json(const Json& j);
Json design_to_json(const RtlDesign& design);

} // namespace assertgen::rtl
