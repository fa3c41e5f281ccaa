#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "predecessor_set.hpp"

namespace pred {

/// Structure parameters as key=value pairs.
using Params = std::map<std::string, std::string>;

/// Renders parameters as "k1=v1;k2=v2" in key order.
std::string format_params(const Params& params);

/// Parses "k1=v1;k2=v2". \throws std::invalid_argument on a malformed entry
Params parse_params(const std::string& text);

/// \brief Type-erased predecessor set.
class AnySet {
public:
    virtual ~AnySet() = default;
    virtual bool insert(Key x) = 0;
    virtual bool erase(Key x) = 0;
    virtual PredResult predecessor(Key x) const = 0;
    virtual size_t size() const = 0;
    /// Runs the structure's own invariant audit, if it has one. \throws std::logic_error
    virtual void audit() const = 0;
};

/// A structure id with fully resolved parameters.
struct StructureSpec {
    std::string name;
    Params params;
    unsigned width;
};

/// Names accepted by make_structure.
const std::vector<std::string>& structure_names();

/// \brief Fills in defaults and validates a structure's parameters.
///
/// Structures and their parameters:
///   us-array, us-hash   bucket=bv|ul|hybrid, b (bucket size, power of two), theta_min, theta_max
///   yfast-ul, yfast-sl  t, c, gamma
///   fusion, fusion-wide search=packed|linear
///   btree-ls, btree-bs  B in {8, 16, 64, 128, 256}
///   oracle
/// \throws std::invalid_argument for unknown names, parameters or values, or
///   an unsupported width
StructureSpec resolve_structure(const std::string& name, const Params& params, unsigned width);

std::unique_ptr<AnySet> make_structure(const StructureSpec& spec);

/// Every structure and parameter combination that the soak test covers at the given width.
std::vector<StructureSpec> all_configurations(unsigned width);

} // namespace pred
