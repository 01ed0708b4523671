#include "doctest.h"

#include "cspfolio/csp.hpp"
#include "cspfolio/native.hpp"
#include "cspfolio/xcsp.hpp"

using namespace cspfolio;

namespace {

const char* kConflictsXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<instance>
  <presentation name="tiny" format="XCSP 2.1"/>
  <domains nbDomains="1">
    <domain name="D0" nbValues="2">1..2</domain>
  </domains>
  <variables nbVariables="2">
    <variable name="X" domain="D0"/>
    <variable name="Y" domain="D0"/>
  </variables>
  <relations nbRelations="1">
    <relation name="R0" arity="2" nbTuples="1" semantics="conflicts">1 2</relation>
  </relations>
  <constraints nbConstraints="1">
    <constraint name="C0" arity="2" scope="X Y" reference="R0"/>
  </constraints>
</instance>
)";

const char* kSupportsXml = R"(<instance>
  <domains nbDomains="1">
    <domain name="D0" nbValues="2">1 2</domain>
  </domains>
  <variables nbVariables="2">
    <variable name="X" domain="D0"/>
    <variable name="Y" domain="D0"/>
  </variables>
  <relations nbRelations="1">
    <relation name="R0" arity="2" nbTuples="3" semantics="supports">1 1|2 1|2 2</relation>
  </relations>
  <constraints nbConstraints="1">
    <constraint name="C0" arity="2" scope="X Y" reference="R0"/>
  </constraints>
</instance>
)";

const char* kPredicateXml = R"(<instance>
  <domains nbDomains="1">
    <domain name="D0" nbValues="3">1..3</domain>
  </domains>
  <variables nbVariables="2">
    <variable name="A" domain="D0"/>
    <variable name="B" domain="D0"/>
  </variables>
  <predicates nbPredicates="2">
    <predicate name="P0">
      <parameters>int X0 int X1</parameters>
      <expression><functional>ne(X0,X1)</functional></expression>
    </predicate>
    <predicate name="P1">
      <parameters>int X0</parameters>
      <expression><functional>le(X0,2)</functional></expression>
    </predicate>
  </predicates>
  <constraints nbConstraints="2">
    <constraint name="C0" arity="2" scope="A B" reference="P0">
      <parameters>A B</parameters>
    </constraint>
    <constraint name="C1" arity="1" scope="B" reference="P1">
      <parameters>B</parameters>
    </constraint>
  </constraints>
</instance>
)";

} // namespace

TEST_CASE("conflicts relation matches the native example") {
    const CspInstance xml = parse_xcsp(kConflictsXml);
    const CspInstance native = parse_native("var X 1 2\nvar Y 1 2\nforbid X Y : 1 2\n");
    CHECK(structurally_equal(xml, native));
    CHECK(xml.name == "tiny");
}

TEST_CASE("supports relation is complemented over the domain product") {
    const CspInstance inst = parse_xcsp(kSupportsXml);
    REQUIRE(inst.constraints.size() == 1);
    CHECK(inst.constraints[0].kind == Constraint::Kind::Forbidden);
    CHECK(inst.constraints[0].tuples == std::vector<std::pair<int, int>>{{1, 2}});
}

TEST_CASE("inequality predicates map to relations and bounds") {
    const CspInstance inst = parse_xcsp(kPredicateXml);
    REQUIRE(inst.constraints.size() == 2);
    CHECK(inst.constraints[0].kind == Constraint::Kind::Relation);
    CHECK(inst.constraints[0].op == RelOp::Ne);
    CHECK(inst.constraints[1].kind == Constraint::Kind::UnaryBound);
    CHECK(inst.constraints[1].op == RelOp::Le);
    CHECK(inst.constraints[1].bound == 2);
    CHECK(count_solutions(normalize(inst), 100) == 4); // 3*2 pairs minus 2 equal ones
}

TEST_CASE("constant-on-the-left predicates flip the operator") {
    const std::string xml = R"(<instance>
      <domains><domain name="D" nbValues="3">1..3</domain></domains>
      <variables><variable name="A" domain="D"/></variables>
      <predicates><predicate name="P">
        <parameters>int X0</parameters>
        <expression><functional>lt(2,X0)</functional></expression>
      </predicate></predicates>
      <constraints><constraint name="C" arity="1" scope="A" reference="P">
        <parameters>A</parameters>
      </constraint></constraints>
    </instance>)";
    const CspInstance inst = parse_xcsp(xml);
    REQUIRE(inst.constraints.size() == 1);
    CHECK(inst.constraints[0].op == RelOp::Gt); // 2 < A becomes A > 2
    CHECK(count_solutions(normalize(inst), 100) == 1);
}

TEST_CASE("unsupported constructs are rejected by name") {
    const std::string global_xml = R"(<instance>
      <domains><domain name="D" nbValues="2">1..2</domain></domains>
      <variables>
        <variable name="A" domain="D"/><variable name="B" domain="D"/>
      </variables>
      <constraints>
        <constraint name="C" arity="2" scope="A B" reference="global:allDifferent"/>
      </constraints>
    </instance>)";
    CHECK_THROWS_WITH_AS(parse_xcsp(global_xml),
                         doctest::Contains("unsupported constraint type: global:allDifferent"),
                         CspError);

    const std::string ternary_xml = R"(<instance>
      <domains><domain name="D" nbValues="2">1..2</domain></domains>
      <variables>
        <variable name="A" domain="D"/><variable name="B" domain="D"/><variable name="C" domain="D"/>
      </variables>
      <relations>
        <relation name="R" arity="3" nbTuples="1" semantics="conflicts">1 1 1</relation>
      </relations>
      <constraints>
        <constraint name="C0" arity="3" scope="A B C" reference="R"/>
      </constraints>
    </instance>)";
    CHECK_THROWS_WITH_AS(parse_xcsp(ternary_xml), doctest::Contains("arity 3"), CspError);

    const std::string arithmetic_xml = R"(<instance>
      <domains><domain name="D" nbValues="2">1..2</domain></domains>
      <variables>
        <variable name="A" domain="D"/><variable name="B" domain="D"/>
      </variables>
      <predicates><predicate name="P">
        <parameters>int X0 int X1</parameters>
        <expression><functional>lt(add(X0,1),X1)</functional></expression>
      </predicate></predicates>
      <constraints><constraint name="C" arity="2" scope="A B" reference="P">
        <parameters>A B</parameters>
      </constraint></constraints>
    </instance>)";
    CHECK_THROWS_WITH_AS(parse_xcsp(arithmetic_xml), doctest::Contains("unsupported"), CspError);
}

TEST_CASE("malformed XML is reported as such") {
    CHECK_THROWS_WITH_AS(parse_xcsp("<instance><domains>"), doctest::Contains("malformed XML"),
                         CspError);
    CHECK_THROWS_WITH_AS(parse_xcsp("<foo/>"), doctest::Contains("missing <instance>"), CspError);
}

TEST_CASE("non-contiguous domain lists parse") {
    const std::string xml = R"(<instance>
      <domains><domain name="D" nbValues="4">1..2 5 9</domain></domains>
      <variables><variable name="A" domain="D"/></variables>
    </instance>)";
    const CspInstance inst = parse_xcsp(xml);
    CHECK(inst.variables[0].domain == std::vector<int>{1, 2, 5, 9});
}
