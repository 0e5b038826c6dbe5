#pragma once

// SBML Level 3 Core + Spatial Processes document model for the crypt.
//
// Spatial list elements use the 0.81 vocabulary (listOfCoordinateCompartments,
// listOfDomainTypes, listOfDomains, listOfAdjacentDomains,
// listOfGeometryDefinitions). On input the list names are matched with either
// initial-letter case, and listOfCoordinateComponents is accepted as well.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cell_type.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "mathml.hpp"
#include "network.hpp"
#include "number_format.hpp"
#include "occupancy.hpp"
#include "xml.hpp"

namespace cryptsim::sbml {

inline constexpr std::string_view kCoreNamespace = "http://www.sbml.org/sbml/level3/version1/core";
inline constexpr std::string_view kDefaultSpatialNamespace = "http://www.sbml.org/sbml/level3/version1/spatial/version1";
inline constexpr std::string_view kSourceLayerParameter = "source_layer_y";
inline constexpr std::string_view kShellDomainType = "crypt_shell";

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error("schema", what) {}
};

class DanglingReference : public Error {
public:
    explicit DanglingReference(std::vector<std::string> ids)
        : Error("dangling_reference", "unresolved ids: " + join(ids)), ids_(std::move(ids)) {}

    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    static std::string join(const std::vector<std::string>& ids) {
        std::string out;
        for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
        return out;
    }
    std::vector<std::string> ids_;
};

class InvalidDocument : public ReportError {
public:
    explicit InvalidDocument(ValidationReport r) : ReportError("invalid_document", "document failed validation", std::move(r)) {}
};

class InvalidNetwork : public ReportError {
public:
    InvalidNetwork(const std::string& what, ValidationReport r) : ReportError("invalid_network", what, std::move(r)) {}
};

class UnsupportedGeometry : public Error {
public:
    explicit UnsupportedGeometry(const std::string& what) : Error("unsupported_geometry", what) {}
};

enum class Axis { X, Y, Z };

struct Compartment {
    std::string id;
    int spatial_dimensions = 3;
    friend bool operator==(const Compartment&, const Compartment&) = default;
};

struct Species {
    std::string id;
    std::string name;
    std::string compartment;
    friend bool operator==(const Species&, const Species&) = default;
};

struct Parameter {
    std::string id;
    double value = 0;
    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct SpeciesRef {
    std::string species;
    double stoichiometry = 1;
    friend bool operator==(const SpeciesRef&, const SpeciesRef&) = default;
};

/// Mass-action reaction with a single reactant; the rate is the kinetic-law
/// local parameter "k".
struct ReactionEntry {
    std::string id;
    std::string reactant;
    std::vector<SpeciesRef> products;
    double rate = 0;
    friend bool operator==(const ReactionEntry&, const ReactionEntry&) = default;
};

struct CoordinateComponent {
    std::string id;
    Axis axis = Axis::X;
    double min = 0;
    double max = 0;
    friend bool operator==(const CoordinateComponent&, const CoordinateComponent&) = default;
};

struct DomainType {
    std::string id;
    int spatial_dimensions = 3;
    friend bool operator==(const DomainType&, const DomainType&) = default;
};

struct InteriorPoint {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const InteriorPoint&, const InteriorPoint&) = default;
};

struct Domain {
    std::string id;
    std::string domain_type;
    InteriorPoint interior_point;
    std::string initial_species; // empty when unassigned
    friend bool operator==(const Domain&, const Domain&) = default;
};

struct AdjacentDomains {
    std::string id;
    std::string domain_a;
    std::string domain_b;
    friend bool operator==(const AdjacentDomains&, const AdjacentDomains&) = default;
};

struct AnalyticVolume {
    std::string id;
    std::string domain_type;
    int ordinal = 0;
    mathml::Expr formula;
    friend bool operator==(const AnalyticVolume&, const AnalyticVolume&) = default;
};

/// Only analytic definitions are modelled; other kinds pass through as
/// foreign elements.
struct GeometryDefinition {
    std::string id;
    std::vector<AnalyticVolume> volumes;
    friend bool operator==(const GeometryDefinition&, const GeometryDefinition&) = default;
};

/// An element the model does not interpret, kept verbatim with the name of
/// the element it was found under ("sbml", "model", "geometry" or
/// "listOfGeometryDefinitions").
struct ForeignElement {
    std::string parent;
    xml::Element element;
    friend bool operator==(const ForeignElement&, const ForeignElement&) = default;
};

struct SpatialDocument {
    std::string spatial_namespace = std::string(kDefaultSpatialNamespace);
    std::string model_id = "colonic_crypt";
    std::string geometry_id = "geometry";
    std::vector<std::pair<std::string, std::string>> extra_root_attributes;

    std::vector<Compartment> compartments;
    std::vector<Species> species;
    std::vector<Parameter> parameters;
    std::vector<ReactionEntry> reactions;

    std::vector<CoordinateComponent> coordinate_components;
    std::vector<DomainType> domain_types;
    std::vector<Domain> domains;
    std::vector<AdjacentDomains> adjacent_domains;
    std::vector<GeometryDefinition> geometry_definitions;

    std::vector<ForeignElement> foreign;

    friend bool operator==(const SpatialDocument&, const SpatialDocument&) = default;
};

/// The (network, geometry, initial occupancy) triple a document encodes.
struct CryptModel {
    ReactionNetwork network;
    CryptGeometry geometry;
    Occupancy occupancy;
    friend bool operator==(const CryptModel&, const CryptModel&) = default;
};

namespace detail {

inline std::string_view axis_type(Axis a) {
    switch (a) {
    case Axis::X: return "cartesianX";
    case Axis::Y: return "cartesianY";
    case Axis::Z: return "cartesianZ";
    }
    return "?";
}

inline std::optional<Axis> axis_from_type(std::string_view s) {
    if (s == "cartesianX" || s == "x") return Axis::X;
    if (s == "cartesianY" || s == "y") return Axis::Y;
    if (s == "cartesianZ" || s == "z") return Axis::Z;
    return std::nullopt;
}

/// Compares element local names, ignoring the case of the first letter.
inline bool name_is(const xml::Element& e, std::string_view expected) {
    auto local = xml::local_name(e.name);
    if (local.size() != expected.size() || local.empty()) return false;
    return std::tolower(static_cast<unsigned char>(local[0])) == std::tolower(static_cast<unsigned char>(expected[0])) &&
           local.substr(1) == expected.substr(1);
}

inline bool is_coordinate_list(const xml::Element& e) {
    return name_is(e, "listOfCoordinateCompartments") || name_is(e, "listOfCoordinateComponents");
}

inline const std::string& required(const xml::Element& e, std::string_view attr) {
    const auto* v = e.attribute_local(attr);
    if (!v) throw SchemaError("missing attribute '" + std::string(attr) + "' on <" + e.name + ">");
    return *v;
}

inline std::string optional_attr(const xml::Element& e, std::string_view attr) {
    const auto* v = e.attribute_local(attr);
    return v ? *v : std::string{};
}

inline double required_number(const xml::Element& e, std::string_view attr) {
    const auto& text = required(e, attr);
    auto v = parse_number(text);
    if (!v) throw SchemaError("attribute '" + std::string(attr) + "' on <" + e.name + "> is not a number: " + text);
    return *v;
}

inline double number_or(const xml::Element& e, std::string_view attr, double fallback) {
    return e.attribute_local(attr) ? required_number(e, attr) : fallback;
}

inline int required_int(const xml::Element& e, std::string_view attr) {
    const double v = required_number(e, attr);
    if (v != std::floor(v)) throw SchemaError("attribute '" + std::string(attr) + "' on <" + e.name + "> must be integral");
    return static_cast<int>(v);
}

inline const xml::Element* child(const xml::Element& e, std::string_view name) {
    for (const auto& c : e.children)
        if (name_is(c, name)) return &c;
    return nullptr;
}

inline ReactionEntry parse_reaction(const xml::Element& e) {
    ReactionEntry r;
    r.id = required(e, "id");
    const auto* reactants = child(e, "listOfReactants");
    if (!reactants || reactants->children.size() != 1)
        throw SchemaError("reaction '" + r.id + "' must have exactly one reactant");
    const auto& ref = reactants->children.front();
    r.reactant = required(ref, "species");
    if (number_or(ref, "stoichiometry", 1) != 1)
        throw SchemaError("reaction '" + r.id + "' reactant stoichiometry must be 1");
    if (const auto* products = child(e, "listOfProducts"))
        for (const auto& p : products->children)
            r.products.push_back({required(p, "species"), number_or(p, "stoichiometry", 1)});

    const auto* law = child(e, "kineticLaw");
    if (!law) throw SchemaError("reaction '" + r.id + "' has no kineticLaw");
    std::optional<double> k;
    for (const auto& list : law->children)
        if (name_is(list, "listOfLocalParameters") || name_is(list, "listOfParameters"))
            for (const auto& p : list.children)
                if (optional_attr(p, "id") == "k") k = required_number(p, "value");
    if (!k) throw SchemaError("reaction '" + r.id + "' has no rate parameter 'k'");
    r.rate = *k;
    return r;
}

inline CoordinateComponent parse_coordinate(const xml::Element& e) {
    CoordinateComponent c;
    c.id = required(e, "id");
    std::string type = optional_attr(e, "type");
    if (type.empty()) type = optional_attr(e, "componentType");
    auto axis = axis_from_type(type);
    if (!axis) throw SchemaError("coordinate component '" + c.id + "' has unknown type '" + type + "'");
    c.axis = *axis;
    const auto* lo = child(e, "boundaryMin");
    const auto* hi = child(e, "boundaryMax");
    if (!lo || !hi) throw SchemaError("coordinate component '" + c.id + "' needs boundaryMin and boundaryMax");
    c.min = required_number(*lo, "value");
    c.max = required_number(*hi, "value");
    return c;
}

inline Domain parse_domain(const xml::Element& e) {
    Domain d;
    d.id = required(e, "id");
    d.domain_type = required(e, "domainType");
    d.initial_species = optional_attr(e, "initialSpecies");
    const xml::Element* point = nullptr;
    if (const auto* list = child(e, "listOfInteriorPoints"); list && !list->children.empty())
        point = &list->children.front();
    if (!point) throw SchemaError("domain '" + d.id + "' has no interior point");
    d.interior_point = {required_number(*point, "coord1"), number_or(*point, "coord2", 0),
                        number_or(*point, "coord3", 0)};
    return d;
}

inline void parse_geometry_definitions(const xml::Element& list, SpatialDocument& doc) {
    for (const auto& def : list.children) {
        if (!name_is(def, "analyticGeometry")) {
            doc.foreign.push_back({"listOfGeometryDefinitions", def});
            continue;
        }
        GeometryDefinition g;
        g.id = required(def, "id");
        if (const auto* vols = child(def, "listOfAnalyticVolumes"))
            for (const auto& v : vols->children) {
                AnalyticVolume av;
                av.id = required(v, "id");
                av.domain_type = required(v, "domainType");
                av.ordinal = v.attribute_local("ordinal") ? required_int(v, "ordinal") : 0;
                const auto* math = child(v, "math");
                if (!math) throw SchemaError("analytic volume '" + av.id + "' has no <math>");
                av.formula = mathml::from_xml(*math);
                g.volumes.push_back(std::move(av));
            }
        doc.geometry_definitions.push_back(std::move(g));
    }
}

inline void parse_geometry(const xml::Element& geo, SpatialDocument& doc) {
    doc.geometry_id = optional_attr(geo, "id");
    for (const auto& list : geo.children) {
        if (is_coordinate_list(list)) {
            for (const auto& c : list.children) doc.coordinate_components.push_back(parse_coordinate(c));
        } else if (name_is(list, "listOfDomainTypes")) {
            for (const auto& t : list.children)
                doc.domain_types.push_back({required(t, "id"), t.attribute_local("spatialDimensions")
                                                                   ? required_int(t, "spatialDimensions")
                                                                   : 3});
        } else if (name_is(list, "listOfDomains")) {
            for (const auto& d : list.children) doc.domains.push_back(parse_domain(d));
        } else if (name_is(list, "listOfAdjacentDomains")) {
            for (const auto& a : list.children)
                doc.adjacent_domains.push_back({required(a, "id"), required(a, "domain1"), required(a, "domain2")});
        } else if (name_is(list, "listOfGeometryDefinitions")) {
            parse_geometry_definitions(list, doc);
        } else {
            doc.foreign.push_back({"geometry", list});
        }
    }
}

inline void parse_model(const xml::Element& model, SpatialDocument& doc) {
    doc.model_id = optional_attr(model, "id");
    for (const auto& part : model.children) {
        if (name_is(part, "listOfCompartments")) {
            for (const auto& c : part.children)
                doc.compartments.push_back({required(c, "id"), c.attribute_local("spatialDimensions")
                                                                   ? required_int(c, "spatialDimensions")
                                                                   : 3});
        } else if (name_is(part, "listOfSpecies")) {
            for (const auto& s : part.children)
                doc.species.push_back({required(s, "id"), optional_attr(s, "name"), optional_attr(s, "compartment")});
        } else if (name_is(part, "listOfParameters")) {
            for (const auto& p : part.children) doc.parameters.push_back({required(p, "id"), required_number(p, "value")});
        } else if (name_is(part, "listOfReactions")) {
            for (const auto& r : part.children) doc.reactions.push_back(parse_reaction(r));
        } else if (name_is(part, "geometry")) {
            parse_geometry(part, doc);
        } else {
            doc.foreign.push_back({"model", part});
        }
    }
}

template <typename T>
std::set<std::string> ids_of(const std::vector<T>& items) {
    std::set<std::string> out;
    for (const auto& i : items) out.insert(i.id);
    return out;
}

/// Every reference to a missing id, in document order, without repeats.
inline std::vector<std::string> dangling_ids(const SpatialDocument& doc) {
    const auto species = ids_of(doc.species);
    const auto types = ids_of(doc.domain_types);
    const auto domains = ids_of(doc.domains);
    std::vector<std::string> out;
    auto check = [&](const std::set<std::string>& known, const std::string& id) {
        if (!known.contains(id) && std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    for (const auto& r : doc.reactions) {
        check(species, r.reactant);
        for (const auto& p : r.products) check(species, p.species);
    }
    for (const auto& d : doc.domains) {
        check(types, d.domain_type);
        if (!d.initial_species.empty()) check(species, d.initial_species);
    }
    for (const auto& a : doc.adjacent_domains) {
        check(domains, a.domain_a);
        check(domains, a.domain_b);
    }
    for (const auto& g : doc.geometry_definitions)
        for (const auto& v : g.volumes) check(types, v.domain_type);
    return out;
}

inline xml::Element spatial(std::string_view local) { return xml::make_element("spatial:" + std::string(local)); }

} // namespace detail

struct ParseOptions {
    /// When false, unresolved references are left for validate_document.
    bool check_references = true;
};

/// Parses SBML text. Throws XmlSyntaxError, SchemaError or DanglingReference.
inline SpatialDocument parse_document(std::string_view text, const ParseOptions& options = {}) {
    const xml::Element root = xml::parse(text);
    if (xml::local_name(root.name) != "sbml") throw SchemaError("root element must be <sbml>, found <" + root.name + ">");

    SpatialDocument doc;
    // The package prefix wins; otherwise the first namespace mentioning "spatial".
    const std::pair<std::string, std::string>* spatial_decl = nullptr;
    for (const auto& attr : root.attributes)
        if (attr.first == "xmlns:spatial") spatial_decl = &attr;
    if (!spatial_decl)
        for (const auto& attr : root.attributes)
            if (xml::prefix_of(attr.first) == "xmlns" && attr.second.find("spatial") != std::string::npos) {
                spatial_decl = &attr;
                break;
            }
    if (spatial_decl) doc.spatial_namespace = spatial_decl->second;
    for (const auto& attr : root.attributes) {
        const auto& [key, value] = attr;
        if (&attr == spatial_decl || key == "xmlns:spatial") continue;
        if (key == "xmlns" || key == "level" || key == "version" || xml::local_name(key) == "required") continue;
        doc.extra_root_attributes.emplace_back(key, value);
    }

    bool saw_model = false;
    for (const auto& part : root.children) {
        if (detail::name_is(part, "model") && !saw_model) {
            detail::parse_model(part, doc);
            saw_model = true;
        } else {
            doc.foreign.push_back({"sbml", part});
        }
    }
    if (!saw_model) throw SchemaError("document has no <model>");

    // Keep foreign elements in the order emit_document writes them back.
    auto rank = [](const std::string& parent) {
        if (parent == "model") return 0;
        if (parent == "listOfGeometryDefinitions") return 1;
        if (parent == "geometry") return 2;
        return 3;
    };
    std::stable_sort(doc.foreign.begin(), doc.foreign.end(),
                     [&](const ForeignElement& a, const ForeignElement& b) { return rank(a.parent) < rank(b.parent); });

    if (options.check_references)
        if (auto missing = detail::dangling_ids(doc); !missing.empty()) throw DanglingReference(std::move(missing));
    return doc;
}

/// Checks cross references, uniqueness, adjacency pairing, interior points
/// against their analytic volumes, and that initial species are cell types.
inline ValidationReport validate_document(const SpatialDocument& doc) {
    ValidationReport report;

    auto check_unique = [&](const auto& items, const std::string& what) {
        std::set<std::string> seen;
        for (const auto& i : items)
            if (!seen.insert(i.id).second) report.add("duplicate_id", what + " id '" + i.id + "' is not unique");
    };
    {
        std::set<std::string> seen;
        for (const auto& s : doc.species)
            if (!seen.insert(s.id).second) report.add("duplicate_species_id", "species id '" + s.id + "' is not unique");
    }
    check_unique(doc.reactions, "reaction");
    check_unique(doc.domain_types, "domain type");
    check_unique(doc.domains, "domain");
    check_unique(doc.adjacent_domains, "adjacency");

    for (const auto& id : detail::dangling_ids(doc)) report.add("dangling_reference", "unresolved reference '" + id + "'");

    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& a : doc.adjacent_domains) {
        if (a.domain_a == a.domain_b) {
            report.add("self_adjacency", "self-adjacency '" + a.id + "' pairs domain '" + a.domain_a + "' with itself");
            continue;
        }
        auto key = std::minmax(a.domain_a, a.domain_b);
        if (!pairs.insert({key.first, key.second}).second)
            report.add("duplicate_adjacency", "domains '" + key.first + "' and '" + key.second + "' paired twice");
    }

    std::map<std::string, const AnalyticVolume*> volume_of;
    for (const auto& g : doc.geometry_definitions)
        for (const auto& v : g.volumes) volume_of.emplace(v.domain_type, &v);
    for (const auto& d : doc.domains) {
        auto it = volume_of.find(d.domain_type);
        if (it == volume_of.end()) continue;
        const auto& p = d.interior_point;
        try {
            if (!mathml::holds(it->second->formula, {p.x, p.y, p.z}))
                report.add("interior_point_outside",
                           "domain '" + d.id + "': interior point fails membership formula of '" + it->second->id + "'");
        } catch (const Error& e) {
            report.add("formula_error", "volume '" + it->second->id + "': " + e.what());
        }
    }

    std::set<std::string> species_ids = detail::ids_of(doc.species);
    for (const auto& d : doc.domains)
        if (!d.initial_species.empty() && species_ids.contains(d.initial_species) &&
            !cell_type_from_id(d.initial_species))
            report.add("unknown_cell_type",
                       "domain '" + d.id + "' initial species '" + d.initial_species + "' is not a cell type");
    return report;
}

/// Deterministic serialization. Throws InvalidDocument if validation fails.
inline std::string emit_document(const SpatialDocument& doc) {
    if (auto report = validate_document(doc); !report.ok()) throw InvalidDocument(std::move(report));
    using detail::spatial;
    using xml::make_element;

    auto root = make_element("sbml");
    root.set("xmlns", std::string(kCoreNamespace));
    root.set("xmlns:spatial", doc.spatial_namespace);
    root.set("level", "3").set("version", "1").set("spatial:required", "true");
    for (const auto& kv : doc.extra_root_attributes) root.attributes.push_back(kv);

    auto& model = root.add(make_element("model"));
    model.set("id", doc.model_id);

    if (!doc.compartments.empty()) {
        auto& list = model.add(make_element("listOfCompartments"));
        for (const auto& c : doc.compartments)
            list.add(make_element("compartment"))
                .set("id", c.id)
                .set("spatialDimensions", std::to_string(c.spatial_dimensions))
                .set("constant", "true");
    }
    if (!doc.species.empty()) {
        auto& list = model.add(make_element("listOfSpecies"));
        for (const auto& s : doc.species) {
            auto& e = list.add(make_element("species"));
            e.set("id", s.id);
            if (!s.name.empty()) e.set("name", s.name);
            if (!s.compartment.empty()) e.set("compartment", s.compartment);
            e.set("initialAmount", "0")
                .set("hasOnlySubstanceUnits", "true")
                .set("boundaryCondition", "false")
                .set("constant", "false");
        }
    }
    if (!doc.parameters.empty()) {
        auto& list = model.add(make_element("listOfParameters"));
        for (const auto& p : doc.parameters)
            list.add(make_element("parameter")).set("id", p.id).set("value", format_number(p.value)).set("constant", "true");
    }
    if (!doc.reactions.empty()) {
        auto& list = model.add(make_element("listOfReactions"));
        for (const auto& r : doc.reactions) {
            auto& e = list.add(make_element("reaction"));
            e.set("id", r.id).set("reversible", "false");
            e.add(make_element("listOfReactants"))
                .add(make_element("speciesReference"))
                .set("species", r.reactant)
                .set("stoichiometry", "1")
                .set("constant", "true");
            if (!r.products.empty()) {
                auto& products = e.add(make_element("listOfProducts"));
                for (const auto& p : r.products)
                    products.add(make_element("speciesReference"))
                        .set("species", p.species)
                        .set("stoichiometry", format_number(p.stoichiometry))
                        .set("constant", "true");
            }
            auto& law = e.add(make_element("kineticLaw"));
            law.add(mathml::to_xml(mathml::call("times", {mathml::var("k"), mathml::var(r.reactant)})));
            law.add(make_element("listOfLocalParameters"))
                .add(make_element("localParameter"))
                .set("id", "k")
                .set("value", format_number(r.rate));
        }
    }
    for (const auto& f : doc.foreign)
        if (f.parent == "model") model.add(f.element);

    auto& geo = model.add(spatial("geometry"));
    geo.set("spatial:id", doc.geometry_id).set("spatial:coordinateSystem", "cartesian");

    auto& coords = geo.add(spatial("listOfCoordinateCompartments"));
    for (const auto& c : doc.coordinate_components) {
        auto& e = coords.add(spatial("coordinateComponent"));
        e.set("spatial:id", c.id).set("spatial:type", std::string(detail::axis_type(c.axis)));
        e.add(spatial("boundaryMin")).set("spatial:id", c.id + "_min").set("spatial:value", format_number(c.min));
        e.add(spatial("boundaryMax")).set("spatial:id", c.id + "_max").set("spatial:value", format_number(c.max));
    }
    auto& types = geo.add(spatial("listOfDomainTypes"));
    for (const auto& t : doc.domain_types)
        types.add(spatial("domainType"))
            .set("spatial:id", t.id)
            .set("spatial:spatialDimensions", std::to_string(t.spatial_dimensions));
    auto& domains = geo.add(spatial("listOfDomains"));
    for (const auto& d : doc.domains) {
        auto& e = domains.add(spatial("domain"));
        e.set("spatial:id", d.id).set("spatial:domainType", d.domain_type);
        if (!d.initial_species.empty()) e.set("spatial:initialSpecies", d.initial_species);
        e.add(spatial("listOfInteriorPoints"))
            .add(spatial("interiorPoint"))
            .set("spatial:coord1", format_number(d.interior_point.x))
            .set("spatial:coord2", format_number(d.interior_point.y))
            .set("spatial:coord3", format_number(d.interior_point.z));
    }
    auto& adjacency = geo.add(spatial("listOfAdjacentDomains"));
    for (const auto& a : doc.adjacent_domains)
        adjacency.add(spatial("adjacentDomains"))
            .set("spatial:id", a.id)
            .set("spatial:domain1", a.domain_a)
            .set("spatial:domain2", a.domain_b);
    auto& defs = geo.add(spatial("listOfGeometryDefinitions"));
    for (const auto& g : doc.geometry_definitions) {
        auto& def = defs.add(spatial("analyticGeometry"));
        def.set("spatial:id", g.id);
        auto& vols = def.add(spatial("listOfAnalyticVolumes"));
        for (const auto& v : g.volumes) {
            auto& e = vols.add(spatial("analyticVolume"));
            e.set("spatial:id", v.id)
                .set("spatial:domainType", v.domain_type)
                .set("spatial:functionType", "layered")
                .set("spatial:ordinal", std::to_string(v.ordinal));
            e.add(mathml::to_xml(v.formula));
        }
    }
    for (const auto& f : doc.foreign)
        if (f.parent == "listOfGeometryDefinitions") defs.add(f.element);
    for (const auto& f : doc.foreign)
        if (f.parent == "geometry") geo.add(f.element);
    for (const auto& f : doc.foreign)
        if (f.parent == "sbml") root.add(f.element);

    return xml::serialize(root);
}

/// Membership formula of the hollow shell in continuous coordinates:
/// (x < 1) or (x >= W-1) or (z < 1) or (z >= D-1).
inline mathml::Expr shell_formula(const CryptGeometry& g) {
    using namespace mathml;
    return any_of({cmp("lt", var("x"), num(1)), cmp("geq", var("x"), num(g.width - 1)),
                   cmp("lt", var("z"), num(1)), cmp("geq", var("z"), num(g.depth - 1))});
}

/// Unit cube [x, x+1) x [y, y+1) x [z, z+1) of one lattice site.
inline mathml::Expr voxel_formula(const SiteCoord& s) {
    using namespace mathml;
    return all_of({cmp("geq", var("x"), num(s.x)), cmp("lt", var("x"), num(s.x + 1)), cmp("geq", var("y"), num(s.y)),
                   cmp("lt", var("y"), num(s.y + 1)), cmp("geq", var("z"), num(s.z)), cmp("lt", var("z"), num(s.z + 1))});
}

inline std::string site_suffix(const SiteCoord& s) {
    return std::to_string(s.x) + "_" + std::to_string(s.y) + "_" + std::to_string(s.z);
}

/// Encodes a model. Each lattice position gets its own domain type holding a
/// single domain; a separate `crypt_shell` domain type carries the
/// hollow-parallelepiped formula.
inline SpatialDocument model_to_document(const ReactionNetwork& net, const CryptGeometry& g, const Occupancy& init) {
    if (auto report = validate_network(net); !report.ok()) throw InvalidNetwork("network failed validation", report);
    if (auto problem = geometry_problem(g); !problem.empty()) throw InvalidGeometry(problem);
    check_occupancy(g, init);

    SpatialDocument doc;
    doc.compartments.push_back({"crypt", 3});
    for (CellType t : kAllCellTypes) doc.species.push_back({std::string(to_id(t)), std::string(display_name(t)), "crypt"});
    doc.parameters.push_back({std::string(kSourceLayerParameter), static_cast<double>(g.source_layer_y)});

    for (const auto& r : net.reactions()) {
        ReactionEntry e{r.name, std::string(to_id(r.reactant)), {}, r.rate};
        switch (r.kind) {
        case ReactionKind::Differentiation: e.products.push_back({std::string(to_id(*r.product)), 1}); break;
        case ReactionKind::Duplication: e.products.push_back({std::string(to_id(CellType::Stem)), 2}); break;
        case ReactionKind::Degradation: break;
        }
        doc.reactions.push_back(std::move(e));
    }

    doc.coordinate_components = {{"x", Axis::X, 0, static_cast<double>(g.width)},
                                 {"y", Axis::Y, 0, static_cast<double>(g.height)},
                                 {"z", Axis::Z, 0, static_cast<double>(g.depth)}};

    const auto sites = enumerate_shell_sites(g);
    GeometryDefinition def{"crypt_analytic", {}};
    doc.domain_types.push_back({std::string(kShellDomainType), 3});
    def.volumes.push_back({"av_shell", std::string(kShellDomainType), 0, shell_formula(g)});

    std::map<SiteCoord, std::size_t> index;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& s = sites[i];
        index.emplace(s, i);
        const auto suffix = site_suffix(s);
        doc.domain_types.push_back({"dt_" + suffix, 3});
        doc.domains.push_back({"d_" + suffix, "dt_" + suffix, {s.x + 0.5, s.y + 0.5, s.z + 0.5},
                               std::string(to_id(init.at(s)))});
        def.volumes.push_back({"av_" + suffix, "dt_" + suffix, static_cast<int>(i + 1), voxel_formula(s)});
    }
    doc.geometry_definitions.push_back(std::move(def));

    std::size_t n = 0;
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (const auto& nb : lateral_neighbors(g, sites[i]))
            if (index.at(nb) > i)
                doc.adjacent_domains.push_back({"adj_" + std::to_string(n++), "d_" + site_suffix(sites[i]),
                                                "d_" + site_suffix(nb)});
    return doc;
}

namespace detail {

inline CryptGeometry geometry_from_document(const SpatialDocument& doc) {
    std::optional<int> extent[3];
    for (const auto& c : doc.coordinate_components) {
        if (c.min != 0 || c.max != std::floor(c.max) || c.max < 1)
            throw UnsupportedGeometry("coordinate component '" + c.id + "' must span [0, n] for an integer n");
        auto& slot = extent[static_cast<int>(c.axis)];
        if (slot) throw UnsupportedGeometry("axis of '" + c.id + "' defined twice");
        slot = static_cast<int>(c.max);
    }
    if (!extent[0] || !extent[1] || !extent[2])
        throw UnsupportedGeometry("x, y and z coordinate components are all required");

    std::optional<int> source;
    for (const auto& p : doc.parameters)
        if (p.id == kSourceLayerParameter) {
            if (p.value != std::floor(p.value)) throw UnsupportedGeometry("source_layer_y must be integral");
            source = static_cast<int>(p.value);
        }
    return make_geometry(*extent[0], *extent[1], *extent[2], source);
}

/// True when the formula selects exactly the shell voxels of `g`, judged at
/// every voxel center of the bounding box.
inline bool selects_shell(const mathml::Expr& f, const CryptGeometry& g) {
    for (int y = 0; y < g.height; ++y)
        for (int z = 0; z < g.depth; ++z)
            for (int x = 0; x < g.width; ++x)
                if (mathml::holds(f, {x + 0.5, y + 0.5, z + 0.5}) != on_perimeter(g, x, z)) return false;
    return true;
}

inline void check_recognized_shape(const SpatialDocument& doc, const CryptGeometry& g) {
    bool found = false;
    for (const auto& def : doc.geometry_definitions)
        for (const auto& v : def.volumes) {
            if (!mathml::is_axis_comparison_formula(v.formula))
                throw UnsupportedGeometry("volume '" + v.id + "' is not built from axis comparisons: " +
                                          mathml::to_infix(v.formula));
            if (selects_shell(v.formula, g)) found = true;
        }
    if (!found) throw UnsupportedGeometry("no analytic volume describes an axis-aligned hollow parallelepiped");
}

inline Reaction reaction_from_entry(const ReactionEntry& e, ValidationReport& problems) {
    Reaction r;
    r.name = e.id;
    r.rate = e.rate;
    auto reactant = cell_type_from_id(e.reactant);
    if (!reactant) {
        problems.add("unknown_cell_type", "reaction '" + e.id + "' reactant '" + e.reactant + "' is not a cell type");
        return r;
    }
    r.reactant = *reactant;
    if (e.products.empty()) {
        r.kind = ReactionKind::Degradation;
    } else if (e.products.size() == 1 && e.products[0].species == e.reactant && e.products[0].stoichiometry == 2) {
        r.kind = ReactionKind::Duplication;
        r.product = r.reactant;
    } else if (e.products.size() == 1 && e.products[0].stoichiometry == 1) {
        auto product = cell_type_from_id(e.products[0].species);
        if (!product) {
            problems.add("unknown_cell_type",
                         "reaction '" + e.id + "' product '" + e.products[0].species + "' is not a cell type");
            return r;
        }
        r.kind = ReactionKind::Differentiation;
        r.product = *product;
    } else {
        problems.add("unsupported_reaction", "reaction '" + e.id + "' is not a differentiation, duplication or degradation");
    }
    return r;
}

} // namespace detail

/// Inverse of model_to_document.
inline CryptModel document_to_model(const SpatialDocument& doc) {
    if (auto report = validate_document(doc); !report.ok()) throw InvalidDocument(std::move(report));

    CryptModel m;
    m.geometry = detail::geometry_from_document(doc);
    detail::check_recognized_shape(doc, m.geometry);

    ValidationReport problems;
    std::vector<Reaction> reactions;
    for (const auto& e : doc.reactions) reactions.push_back(detail::reaction_from_entry(e, problems));
    m.network = ReactionNetwork(std::move(reactions));
    if (!problems.ok()) throw InvalidNetwork("reactions do not form a cell network", problems);
    if (auto report = validate_network(m.network); !report.ok()) {
        const std::string what = report.has("reaction_count") ? std::to_string(m.network.size()) +
                                                                     " reactions, 12 expected"
                                                               : "network failed validation";
        throw InvalidNetwork(what, report);
    }

    for (const auto& d : doc.domains) {
        if (d.initial_species.empty()) continue;
        const SiteCoord site{static_cast<int>(std::floor(d.interior_point.x)),
                             static_cast<int>(std::floor(d.interior_point.y)),
                             static_cast<int>(std::floor(d.interior_point.z))};
        if (!shell_membership(m.geometry, site))
            throw IncompleteInit("domain '" + d.id + "' lies outside the shell at " + to_string(site));
        if (!m.occupancy.emplace(site, *cell_type_from_id(d.initial_species)).second)
            throw IncompleteInit("site " + to_string(site) + " is assigned by more than one domain");
    }
    check_occupancy(m.geometry, m.occupancy);
    return m;
}

} // namespace cryptsim::sbml
