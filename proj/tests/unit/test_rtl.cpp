#include <doctest.h>

#include <filesystem>

#include "assertgen/error.hpp"
#include "assertgen/io.hpp"
#include "assertgen/rtl/design.hpp"
#include "assertgen/rtl/parser.hpp"
#include "assertgen/rtl/printer.hpp"

namespace fs = std::filesystem;
using namespace assertgen;
using namespace assertgen::rtl;

namespace {

const fs::path kData = ASSERTGEN_TEST_DATA;

std::vector<fs::path> round_trip_corpus() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(kData / "rtl_suite"))
        out.push_back(e.path());
    for (const auto& e : fs::directory_iterator(kData / "desk" / "rtl"))
        out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

ErrorCode code_of(auto fn) {
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

const char* kTop = R"(module top(input clk, input en, output done);
  wire busy;
  sub u_sub(.clk(clk), .go(en), .busy(busy));
  assign done = ~busy;
endmodule
)";

const char* kSub = R"(module sub(input clk, input go, output reg busy);
  reg [3:0] cnt;
  always @(posedge clk) begin
    cnt <= go ? 4'd0 : cnt + 1;
    busy <= cnt != 4'd15;
  end
endmodule
)";

using NamedEdge = std::tuple<std::string, std::string, EdgeKind>;

std::set<NamedEdge> named_edges(const SignalGraph& g, const std::string& root) {
    std::set<NamedEdge> out;
    for (const auto& e : g.edges())
        out.insert({g.nodes()[e.from].hierarchical_name(root), g.nodes()[e.to].hierarchical_name(root), e.kind});
    return out;
}

RtlDesign desk_design() {
    return parse_design(load_sources({kData / "desk/rtl/i2c_top.v", kData / "desk/rtl/i2c_byte_ctrl.v",
                                      kData / "desk/rtl/i2c_bit_ctrl.v"}));
}

std::set<std::string> predecessors(const SignalGraph& g, const std::string& root, const std::string& hier) {
    std::set<std::string> out;
    for (const auto& e : g.edges())
        if (g.nodes()[e.to].hierarchical_name(root) == hier)
            out.insert(g.nodes()[e.from].hierarchical_name(root));
    return out;
}

} // namespace

TEST_CASE("parse, print, parse gives the same tree on every corpus file") {
    auto files = round_trip_corpus();
    REQUIRE(files.size() >= 10);
    for (const auto& path : files) {
        CAPTURE(path.filename().string());
        auto text = read_text_file(path);
        auto first = parse_source(text, path.string());
        auto printed = print_unit(first.unit);
        auto second = parse_source(printed, "printed");
        CHECK(first.unit == second.unit);
        CHECK(print_unit(second.unit) == printed);
    }
}

TEST_CASE("opaque regions are kept with warnings and survive printing") {
    auto text = read_text_file(kData / "rtl_suite/09_opaque.v");
    auto r = parse_source(text, "09_opaque.v");
    CHECK(r.warnings.size() == 4);
    for (const auto& w : r.warnings)
        CHECK(w.find("unsupported") != std::string::npos);
    auto printed = print_unit(r.unit);
    CHECK(printed.find("endgenerate") != std::string::npos);
    CHECK(printed.find("endfunction") != std::string::npos);
}

TEST_CASE("syntax errors carry a file and line") {
    try {
        parse_source("module m(input a);\n  assign = a;\nendmodule\n", "bad.v");
        FAIL("expected SyntaxError");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(std::string(e.what()).find("bad.v:2") != std::string::npos);
    }
    CHECK(code_of([] { parse_source("module m(input a)\nendmodule\n"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse_source("module m; always @(posedge clk) begin a <= 1; endmodule"); }) ==
          ErrorCode::SyntaxError);
}

TEST_CASE("expression precedence survives printing") {
    for (auto src : {"a + b * c", "(a + b) * c", "a & b | c ^ d", "~(a | b)", "a ? b : c ? d : e",
                     "{a, {2{b}}, c[3:0]}", "a << 2 >> 1", "!a && b || c", "-(a - b)", "a == b != c"}) {
        CAPTURE(src);
        auto e = parse_expression(src);
        auto again = parse_expression(print_expr(e));
        CHECK(e == again);
        CHECK(print_expr(again) == print_expr(e));
    }
    CHECK(print_expr(parse_expression("(a + b) * c")) != print_expr(parse_expression("a + b * c")));
}

TEST_CASE("identifier helpers") {
    CHECK(identifiers_in(parse_expression("f(a) + b[c] + d[3:0] + 4'd2")) == std::set<std::string>{"a", "b", "c", "d"});
    CHECK(lvalue_targets(parse_expression("{a, b[2], c[3:1]}")) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("small design graph matches the hand-derived edge list") {
    auto d = parse_design({{"top.v", kTop}, {"sub.v", kSub}});
    CHECK(d.root_module() == "top");
    auto tree = instance_tree(d);
    REQUIRE(tree.size() == 2);
    CHECK(tree[1].path == std::vector<std::string>{"u_sub"});
    CHECK(tree[1].module == "sub");

    auto g = build_connectivity(d);
    CHECK(g.nodes().size() == 8);
    const std::set<NamedEdge> hand{
        {"top.busy", "top.done", EdgeKind::Continuous},
        {"top.clk", "top.u_sub.clk", EdgeKind::PortBinding},
        {"top.en", "top.u_sub.go", EdgeKind::PortBinding},
        {"top.u_sub.busy", "top.busy", EdgeKind::PortBinding},
        {"top.u_sub.go", "top.u_sub.cnt", EdgeKind::Procedural},
        {"top.u_sub.cnt", "top.u_sub.cnt", EdgeKind::Procedural},
        {"top.u_sub.cnt", "top.u_sub.busy", EdgeKind::Procedural},
    };
    CHECK(named_edges(g, "top") == hand);

    auto rev = g.reversed();
    CHECK(rev.nodes().size() == g.nodes().size());
    CHECK(rev.edges().size() == g.edges().size());
    for (const auto& e : g.edges())
        CHECK(rev.has_edge(e.to, e.from));

    const auto& sub = d.module("sub");
    CHECK(sub.width_of("cnt") == 4);
    CHECK(sub.find_port("busy")->direction == Direction::Output);
    CHECK(d.slice(*sub.declaration_span("cnt")) == "  reg [3:0] cnt;\n");
}

TEST_CASE("desk design facts") {
    auto d = desk_design();
    CHECK(d.root_module() == "i2c_top");
    auto tree = instance_tree(d);
    REQUIRE(tree.size() == 3);
    CHECK(tree[1].path == std::vector<std::string>{"byte_controller"});
    CHECK(tree[2].path == std::vector<std::string>{"byte_controller", "bit_controller"});
    CHECK(tree[2].module == "i2c_bit_ctrl");

    auto g = build_connectivity(d);
    // the interrupt flag: its reset guard, the three set sources and the acknowledge
    CHECK(predecessors(g, "i2c_top", "i2c_top.irq_flag") ==
          std::set<std::string>{"i2c_top.wb_rst_i", "i2c_top.done", "i2c_top.i2c_al", "i2c_top.irq_flag",
                                "i2c_top.iack"});
    CHECK(predecessors(g, "i2c_top", "i2c_top.wb_inta_o") ==
          std::set<std::string>{"i2c_top.irq_flag", "i2c_top.ien"});

    auto loc = locate_signal(d, "CLK_EN");
    CHECK(loc.module0.module == "i2c_bit_ctrl");
    CHECK(loc.module0.hierarchical_name("i2c_top") == "i2c_top.byte_controller.bit_controller.clk_en");
    CHECK(code_of([&] { locate_signal(d, "no_such_signal"); }) == ErrorCode::SignalNotFound);

    for (const auto& w : g.witnesses()) {
        CHECK(w.span.first >= 1);
        CHECK(w.span.first <= w.span.last);
        CHECK_FALSE(d.slice(w.span).empty());
    }
}

TEST_CASE("design linking errors") {
    const std::string leaf = "module leaf(input a, output b);\n  assign b = a;\nendmodule\n";
    CHECK(code_of([&] { parse_design({{"x.v", leaf}, {"y.v", leaf}}); }) == ErrorCode::DuplicateModule);
    CHECK(code_of([] { parse_design({{"x.v", "module t; ghost g(.a(1'b0));\nendmodule\n"}}); }) ==
          ErrorCode::UnresolvedInstance);
    CHECK(code_of([&] {
              parse_design({{"x.v", "module t(input a); wire b; leaf l(.a(a), .c(b));\nendmodule\n" + leaf}});
          }) == ErrorCode::UnresolvedInstance);
    CHECK(code_of([&] {
              parse_design({{"x.v", "module t(input a); wire b; leaf l(a, b, a);\nendmodule\n" + leaf}});
          }) == ErrorCode::UnresolvedInstance);
    CHECK(code_of([] {
              parse_design({{"x.v", "module p; endmodule\nmodule q; endmodule\n"}});
          }) == ErrorCode::AmbiguousTop);
    auto chosen = parse_design({{"x.v", "module p; endmodule\nmodule q; endmodule\n"}}, std::string("q"));
    CHECK(chosen.root_module() == "q");
    CHECK(code_of([] { parse_design({{"x.v", "module p; endmodule\n"}}, std::string("r")); }) ==
          ErrorCode::AmbiguousTop);
}

TEST_CASE("tree diff locates a single changed node") {
    auto a = parse_source("module m(input a, input b, output y);\n  assign y = a & b;\nendmodule\n");
    auto b = parse_source("module m(input a, input b, output y);\n  assign y = a | b;\nendmodule\n");
    auto ga = to_generic(a.unit), gb = to_generic(b.unit);
    CHECK(diff_nodes(ga, ga).empty());
    auto d = diff_nodes(ga, gb);
    REQUIRE(d.size() == 1);
    CHECK(count_nodes(ga) == count_nodes(gb));
}
