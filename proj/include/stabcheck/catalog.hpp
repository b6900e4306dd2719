#ifndef STABCHECK_CATALOG_HPP
#define STABCHECK_CATALOG_HPP

#include <map>
#include <string>
#include <vector>

#include "stabcheck/conditions.hpp"

namespace stabcheck {

/// Built-in benchmark instance with its documented expected verdicts.
struct CatalogEntry {
    std::string name;
    std::string description;
    AuditInstance instance;
    std::map<std::string, std::string> expected;  // checker -> documented verdict
};

/// The built-in instance corpus, in stable order.
std::vector<CatalogEntry> catalog_list(unsigned seed = 1);

/// Lookup by stable name; throws ConditionError when absent.
CatalogEntry catalog_entry(const std::string& name, unsigned seed = 1);

/// Seeded random control sections over a sphere around the origin for a
/// 3-D system; sections depend on x3 only and are bounded away from zero,
/// so every lift stays in the nonzero locus.
std::vector<CycleSpec> random_sphere_cycles(unsigned seed, int count, double radius);

/// Seeded random linear trivial-bundle system x' = B u + 0.1 x with a
/// unimodular control matrix B, packaged as a full audit instance (point
/// target, inward reference field, exact feedback cycle).
AuditInstance random_linear_instance(unsigned seed);

} // namespace stabcheck

#endif
