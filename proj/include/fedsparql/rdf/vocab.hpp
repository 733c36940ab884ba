#pragma once

#include <string_view>

// Well-known vocabulary IRIs used across the toolkit.
namespace fedsparql::vocab {

inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdf_langString = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view rdf_first = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
inline constexpr std::string_view rdf_rest = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
inline constexpr std::string_view rdf_nil = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";

inline constexpr std::string_view rdfs_domain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline constexpr std::string_view rdfs_range = "http://www.w3.org/2000/01/rdf-schema#range";

inline constexpr std::string_view xsd_string = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view xsd_integer = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view xsd_decimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view xsd_double = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view xsd_float = "http://www.w3.org/2001/XMLSchema#float";
inline constexpr std::string_view xsd_boolean = "http://www.w3.org/2001/XMLSchema#boolean";

inline constexpr std::string_view void_Dataset = "http://rdfs.org/ns/void#Dataset";
inline constexpr std::string_view void_Linkset = "http://rdfs.org/ns/void#Linkset";
inline constexpr std::string_view void_triples = "http://rdfs.org/ns/void#triples";
inline constexpr std::string_view void_classPartition = "http://rdfs.org/ns/void#classPartition";
inline constexpr std::string_view void_class = "http://rdfs.org/ns/void#class";
inline constexpr std::string_view void_entities = "http://rdfs.org/ns/void#entities";
inline constexpr std::string_view void_propertyPartition = "http://rdfs.org/ns/void#propertyPartition";
inline constexpr std::string_view void_property = "http://rdfs.org/ns/void#property";
inline constexpr std::string_view void_distinctSubjects = "http://rdfs.org/ns/void#distinctSubjects";
inline constexpr std::string_view void_distinctObjects = "http://rdfs.org/ns/void#distinctObjects";
inline constexpr std::string_view void_linkPredicate = "http://rdfs.org/ns/void#linkPredicate";
inline constexpr std::string_view void_objectsTarget = "http://rdfs.org/ns/void#objectsTarget";
inline constexpr std::string_view void_subjectsTarget = "http://rdfs.org/ns/void#subjectsTarget";
inline constexpr std::string_view void_subset = "http://rdfs.org/ns/void#subset";
inline constexpr std::string_view void_sparqlEndpoint = "http://rdfs.org/ns/void#sparqlEndpoint";

inline constexpr std::string_view sd_Service = "http://www.w3.org/ns/sparql-service-description#Service";
inline constexpr std::string_view sd_endpoint = "http://www.w3.org/ns/sparql-service-description#endpoint";
inline constexpr std::string_view sd_defaultDataset = "http://www.w3.org/ns/sparql-service-description#defaultDataset";

} // namespace fedsparql::vocab
