#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cryptsim/sbml.hpp"
#include "support/oracles.hpp"

using namespace cryptsim;
using namespace cryptsim::sbml;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpatialDocument canonical_document() {
    const auto g = make_geometry(4, 10, 4);
    return model_to_document(build_default_network(), g, preset_occupancy(g, "seeded"));
}

const char* kMinimal = R"(<?xml version="1.0" encoding="UTF-8"?>
<sbml xmlns="http://www.sbml.org/sbml/level3/version1/core" xmlns:spatial="urn:test:spatial" level="3" version="1">
  <model id="m">
    <spatial:geometry spatial:id="g">
      <spatial:ListOfCoordinateCompartments/>
      <spatial:ListOfDomainTypes/>
      <spatial:ListOfDomains/>
      <spatial:ListOfAdjacentDomains/>
      <spatial:ListOfGeometryDefinitions/>
    </spatial:geometry>
  </model>
</sbml>
)";

} // namespace

TEST(Xml, SyntaxErrorCarriesPosition) {
    try {
        xml::parse("<a>\n  <b>\n</a>");
        FAIL() << "expected XmlSyntaxError";
    } catch (const xml::XmlSyntaxError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_GT(e.column(), 0);
        EXPECT_EQ(e.code(), "xml_syntax");
    }
}

TEST(Xml, TextAndTailAreKept) {
    const auto root = xml::parse("<cn type=\"rational\"> 1 <sep/> 2 </cn>");
    EXPECT_EQ(root.text, "1");
    ASSERT_EQ(root.children.size(), 1u);
    EXPECT_EQ(root.children[0].tail, "2");
    EXPECT_EQ(xml::parse(xml::serialize(root)), root);
}

TEST(MathML, RationalAndEvaluation) {
    const auto e = mathml::from_xml(xml::parse(
        "<math><apply><lt/><ci>x</ci><cn type=\"rational\">3<sep/>2</cn></apply></math>"));
    EXPECT_TRUE(mathml::holds(e, {1.0, 0, 0}));
    EXPECT_FALSE(mathml::holds(e, {1.5, 0, 0}));
    EXPECT_TRUE(mathml::is_axis_comparison_formula(e));
}

TEST(MathML, SphereIsNotAxisComparison) {
    using namespace mathml;
    const auto sphere = cmp("leq",
                            call("plus", {call("power", {call("minus", {var("x"), num(2)}), num(2)}),
                                           call("power", {call("minus", {var("z"), num(2)}), num(2)})}),
                            num(4));
    EXPECT_FALSE(is_axis_comparison_formula(sphere));
    EXPECT_TRUE(holds(sphere, {2, 0, 2}));
    EXPECT_EQ(from_xml(to_xml(sphere)), sphere);
}

TEST(MathML, EmitsHandWrittenFragment) {
    using namespace mathml;
    const auto formula = any_of({cmp("eq", var("x"), num(0)), cmp("eq", var("x"), num(3)),
                                 cmp("eq", var("z"), num(0)), cmp("eq", var("z"), num(3))});
    const std::string expected = R"(<?xml version="1.0" encoding="UTF-8"?>
<math xmlns="http://www.w3.org/1998/Math/MathML">
  <apply>
    <or/>
    <apply>
      <eq/>
      <ci>x</ci>
      <cn>0</cn>
    </apply>
    <apply>
      <eq/>
      <ci>x</ci>
      <cn>3</cn>
    </apply>
    <apply>
      <eq/>
      <ci>z</ci>
      <cn>0</cn>
    </apply>
    <apply>
      <eq/>
      <ci>z</ci>
      <cn>3</cn>
    </apply>
  </apply>
</math>
)";
    EXPECT_EQ(xml::serialize(to_xml(formula)), expected);
}

TEST(ParseDocument, MinimalDocumentHasEmptyLists) {
    const auto doc = parse_document(kMinimal);
    EXPECT_EQ(doc.spatial_namespace, "urn:test:spatial");
    EXPECT_TRUE(doc.coordinate_components.empty());
    EXPECT_TRUE(doc.domain_types.empty());
    EXPECT_TRUE(doc.domains.empty());
    EXPECT_TRUE(doc.adjacent_domains.empty());
    EXPECT_TRUE(doc.geometry_definitions.empty());
    EXPECT_TRUE(validate_document(doc).ok());
}

TEST(ParseDocument, AcceptsLaterCoordinateComponentsSpelling) {
    std::string text = R"(<sbml xmlns:spatial="urn:s"><model><spatial:geometry>
      <spatial:listOfCoordinateComponents>
        <spatial:coordinateComponent spatial:id="x" spatial:type="cartesianX">
          <spatial:boundaryMin spatial:id="a" spatial:value="0"/><spatial:boundaryMax spatial:id="b" spatial:value="4"/>
        </spatial:coordinateComponent>
      </spatial:listOfCoordinateComponents></spatial:geometry></model></sbml>)";
    const auto doc = parse_document(text);
    ASSERT_EQ(doc.coordinate_components.size(), 1u);
    EXPECT_EQ(doc.coordinate_components[0].max, 4);
    EXPECT_NE(emit_document(doc).find("listOfCoordinateCompartments"), std::string::npos);
}

TEST(ParseDocument, DanglingDomainTypeIsReported) {
    auto doc = canonical_document();
    doc.domains[0].domain_type = "dtX";
    doc.domains[1].domain_type = "dtY";
    // Emission refuses invalid documents, so serialize the tree by hand.
    auto valid = canonical_document();
    std::string text = emit_document(valid);
    const std::string from = "spatial:domainType=\"" + valid.domains[0].domain_type + "\" spatial:initialSpecies";
    text.replace(text.find(from), from.size(), "spatial:domainType=\"dtX\" spatial:initialSpecies");
    try {
        parse_document(text);
        FAIL() << "expected DanglingReference";
    } catch (const DanglingReference& e) {
        ASSERT_EQ(e.ids().size(), 1u);
        EXPECT_EQ(e.ids()[0], "dtX");
    }
    const auto lenient = parse_document(text, {.check_references = false});
    EXPECT_TRUE(validate_document(lenient).has("dangling_reference"));

    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has("dangling_reference"));
    EXPECT_NE(report.to_string().find("dtX"), std::string::npos);
    EXPECT_NE(report.to_string().find("dtY"), std::string::npos);
}

TEST(ParseDocument, MissingRequiredAttributeIsSchemaError) {
    const std::string text = R"(<sbml xmlns:spatial="urn:s"><model><spatial:geometry><spatial:listOfDomains>
      <spatial:domain spatial:id="d"><spatial:listOfInteriorPoints><spatial:interiorPoint spatial:coord1="0"/>
      </spatial:listOfInteriorPoints></spatial:domain></spatial:listOfDomains></spatial:geometry></model></sbml>)";
    EXPECT_THROW(parse_document(text), SchemaError);
    EXPECT_THROW(parse_document("<notsbml/>"), SchemaError);
    EXPECT_THROW(parse_document("<sbml><model>"), xml::XmlSyntaxError);
}

TEST(ParseDocument, ForeignElementsSurviveRoundTrip) {
    const std::string text = R"(<sbml xmlns:spatial="urn:s" xmlns:extra="urn:extra"><model id="m">
      <notes><p>keep me</p></notes>
      <spatial:geometry spatial:id="g"><extra:thing a="1"/>
      <spatial:listOfGeometryDefinitions><spatial:sampledFieldGeometry spatial:id="sf"/></spatial:listOfGeometryDefinitions>
      </spatial:geometry></model><annotation>top</annotation></sbml>)";
    const auto doc = parse_document(text);
    ASSERT_EQ(doc.foreign.size(), 4u);
    const auto again = parse_document(emit_document(doc));
    EXPECT_EQ(again, doc);
}

TEST(ValidateDocument, CanonicalIsOk) { EXPECT_TRUE(validate_document(canonical_document()).ok()); }

TEST(ValidateDocument, SelfAdjacency) {
    auto doc = canonical_document();
    doc.adjacent_domains[0].domain_b = doc.adjacent_domains[0].domain_a;
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has("self_adjacency"));
    EXPECT_NE(report.to_string().find("self-adjacency"), std::string::npos);
}

TEST(ValidateDocument, DuplicatePairAndDuplicateSpecies) {
    auto doc = canonical_document();
    auto dup = doc.adjacent_domains[0];
    std::swap(dup.domain_a, dup.domain_b);
    dup.id = "adj_extra";
    doc.adjacent_domains.push_back(dup);
    doc.species.push_back(doc.species[0]);
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has("duplicate_adjacency"));
    EXPECT_TRUE(report.has("duplicate_species_id"));
}

TEST(ValidateDocument, InteriorPointOutsideVolume) {
    auto doc = canonical_document();
    doc.domains[0].interior_point.x += 1.0;
    const auto report = validate_document(doc);
    EXPECT_TRUE(report.has("interior_point_outside"));
    EXPECT_NE(report.to_string().find("interior point fails membership formula"), std::string::npos);
}

TEST(ValidateDocument, InitialSpeciesMustBeCellType) {
    auto doc = canonical_document();
    doc.species.push_back({"glucose", "Glucose", "crypt"});
    doc.domains[0].initial_species = "glucose";
    EXPECT_TRUE(validate_document(doc).has("unknown_cell_type"));
}

TEST(EmitDocument, RefusesInvalidAndIsDeterministic) {
    auto doc = canonical_document();
    const auto a = emit_document(doc);
    const auto b = emit_document(canonical_document());
    EXPECT_EQ(a, b);
    EXPECT_EQ(parse_document(a), doc);
    doc.adjacent_domains[0].domain_b = doc.adjacent_domains[0].domain_a;
    EXPECT_THROW(emit_document(doc), InvalidDocument);
}

TEST(ModelToDocument, CountsOnDefaultGeometry) {
    const auto g = make_geometry(4, 10, 4);
    const auto doc = model_to_document(build_default_network(), g, uniform_occupancy(g, CellType::Empty));
    EXPECT_EQ(doc.domains.size(), 120u);
    EXPECT_EQ(doc.species.size(), 9u);
    EXPECT_EQ(doc.reactions.size(), 12u);
    EXPECT_EQ(doc.coordinate_components.size(), 3u);
    EXPECT_EQ(static_cast<long>(doc.adjacent_domains.size()), oracle::count_neighbor_edges(g));
    ASSERT_EQ(doc.geometry_definitions.size(), 1u);
    for (const auto& d : doc.domains) {
        EXPECT_EQ(d.initial_species, "empty");
        EXPECT_EQ(d.interior_point.x - std::floor(d.interior_point.x), 0.5);
    }
}

TEST(ModelToDocument, SingleStemDomain) {
    const auto g = make_geometry(4, 10, 4);
    auto init = uniform_occupancy(g, CellType::Empty);
    init[{0, 3, 0}] = CellType::Stem;
    const auto doc = model_to_document(build_default_network(), g, init);
    int stems = 0;
    for (const auto& d : doc.domains)
        if (d.initial_species == "stem") {
            ++stems;
            EXPECT_EQ(d.interior_point, (InteriorPoint{0.5, 3.5, 0.5}));
        }
    EXPECT_EQ(stems, 1);
}

TEST(ModelToDocument, IncompleteInit) {
    const auto g = make_geometry(4, 10, 4);
    auto init = uniform_occupancy(g, CellType::Empty);
    init.erase(init.begin());
    EXPECT_THROW(model_to_document(build_default_network(), g, init), IncompleteInit);
}

TEST(DocumentToModel, RoundTripsCanonicalModel) {
    const auto g = make_geometry(4, 10, 4);
    const CryptModel m{build_default_network({{"deg_goblet", 0.3}}), g, preset_occupancy(g, "seeded")};
    const auto text = emit_document(model_to_document(m.network, m.geometry, m.occupancy));
    EXPECT_EQ(document_to_model(parse_document(text)), m);
}

TEST(DocumentToModel, SphereIsUnsupported) {
    using namespace mathml;
    auto doc = canonical_document();
    doc.geometry_definitions[0].volumes[0].formula =
        cmp("leq", call("plus", {call("power", {call("minus", {var("x"), num(2)}), num(2)}),
                                  call("power", {call("minus", {var("z"), num(2)}), num(2)})}),
            num(4));
    EXPECT_THROW(document_to_model(doc), UnsupportedGeometry);
}

TEST(DocumentToModel, AxisFormulaThatIsNotAShellIsUnsupported) {
    using namespace mathml;
    auto doc = canonical_document();
    doc.geometry_definitions[0].volumes[0].formula = cmp("lt", var("x"), num(1));
    EXPECT_THROW(document_to_model(doc), UnsupportedGeometry);
}

TEST(DocumentToModel, ElevenReactionsIsInvalidNetwork) {
    auto doc = canonical_document();
    doc.reactions.pop_back();
    try {
        document_to_model(doc);
        FAIL() << "expected InvalidNetwork";
    } catch (const InvalidNetwork& e) {
        EXPECT_NE(std::string(e.what()).find("12 expected"), std::string::npos);
        EXPECT_TRUE(e.report().has("reaction_count"));
    }
}

TEST(DocumentToModel, PropertyRoundTripRandomModels) {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<int> wd(3, 8), hd(4, 12), cell(0, 8);
    std::uniform_real_distribution<double> rate(0.0, 5.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int h = hd(gen);
        const auto g = make_geometry(wd(gen), h, wd(gen), 1 + static_cast<int>(gen() % static_cast<unsigned>((h - 1) / 2)));
        std::map<std::string, double> rates;
        for (const auto& r : canonical_reactions()) rates[r.name] = rate(gen);
        Occupancy init;
        for (const auto& s : enumerate_shell_sites(g)) init[s] = kAllCellTypes[static_cast<std::size_t>(cell(gen))];
        const CryptModel m{build_default_network(rates), g, init};
        const auto doc = model_to_document(m.network, m.geometry, m.occupancy);
        const auto bytes = emit_document(doc);
        const auto parsed = parse_document(bytes);
        ASSERT_EQ(parsed, doc);
        ASSERT_EQ(emit_document(parsed), bytes);
        ASSERT_EQ(document_to_model(parsed), m);
    }
}

TEST(Fixtures, CorpusMatchesSidecars) {
    const std::filesystem::path root = CRYPT_FIXTURE_DIR;
    int valid = 0, invalid = 0;
    for (const auto& entry : std::filesystem::directory_iterator(root / "valid")) {
        if (entry.path().extension() != ".xml") continue;
        const auto doc = parse_document(slurp(entry.path()));
        EXPECT_TRUE(validate_document(doc).ok()) << entry.path();
        EXPECT_NO_THROW(document_to_model(doc)) << entry.path();
        ++valid;
    }
    for (const auto& entry : std::filesystem::directory_iterator(root / "invalid")) {
        if (entry.path().extension() != ".xml") continue;
        auto sidecar = entry.path();
        sidecar.replace_extension(".expected");
        std::istringstream expected(slurp(sidecar));
        const auto report = validate_document(parse_document(slurp(entry.path()), {.check_references = false}));
        std::string code;
        int codes = 0;
        while (expected >> code) {
            EXPECT_TRUE(report.has(code)) << entry.path() << " lacks " << code << "\n" << report.to_string();
            ++codes;
        }
        EXPECT_GT(codes, 0) << sidecar;
        ++invalid;
    }
    EXPECT_GE(valid, 1);
    EXPECT_GE(invalid, 3);
}

TEST(Fixtures, BundledCanonicalDocument) {
    const auto doc = parse_document(slurp(std::filesystem::path(CRYPT_FIXTURE_DIR) / "valid" / "canonical_seeded.xml"));
    EXPECT_EQ(doc.species.size(), 9u);
    EXPECT_EQ(doc.reactions.size(), 12u);
    EXPECT_EQ(doc.coordinate_components.size(), 3u);
    EXPECT_EQ(doc, canonical_document());
}
