#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace plgz {

enum class Color { White, Black };

struct DiagramVertex {
    int id = 0;
    Color color = Color::White;
};

/**
 * Edge of a Dynkin diagram. For a double bond `shorter` is the id of the
 * short-root end; for a simple bond it is 0.
 */
struct DiagramBond {
    int a = 0, b = 0;
    int mult = 1;
    int shorter = 0;
};

/**
 * Satake-Tits diagram with one circled white vertex. `type`/`n` hold the
 * declared underlying type when the diagram came from input; diagrams produced
 * by descent carry the shape name computed from their Cartan matrix.
 */
struct WeightedSatakeDiagram {
    std::string type;
    int n = 0;
    std::vector<DiagramVertex> vertices;
    std::vector<DiagramBond> bonds;
    std::vector<std::pair<int, int>> arrows;
    int circled = 0;

    int size() const { return static_cast<int>(vertices.size()); }
    bool has(int id) const;
    Color color(int id) const;
    std::vector<int> neighbors(int id) const;
    // Galois partner of a vertex (itself if no arrow)
    int partner(int id) const;
    const DiagramBond* bond(int a, int b) const;
};

/**
 * Finite root system of a connected diagram, simple roots indexed by position
 * in `ids`.
 */
struct RootData {
    std::vector<int> ids;
    // cartan[i][j] = <alpha_j, alpha_i^vee>
    std::vector<std::vector<int>> cartan;
    // squared lengths, short roots have length 1
    std::vector<int> len2;
    std::vector<std::vector<int>> positive;
    int index_of(int id) const;
    // 2 (x, y) for x, y in simple-root coordinates
    mpq_class form2(const std::vector<mpq_class>& x, const std::vector<mpq_class>& y) const;
    std::vector<int> highest_root() const;
};

RootData root_data(const WeightedSatakeDiagram& D);

// "A5", "B3", "C4", "D6", "E7", ... ; B2 and C2 are both reported as "B2"
std::string shape_name(const WeightedSatakeDiagram& D);

/**
 * Accepts the documented diagram JSON, including the shorthand
 * `[3,4,2,"toward":3]` for a directed double bond.
 */
WeightedSatakeDiagram parse_diagram(const std::string& json_text);
std::string diagram_to_json(const WeightedSatakeDiagram& D);

// Structural checks shared by input diagrams and every descent step.
void validate_structure(const WeightedSatakeDiagram& D);

// Bourbaki-numbered diagram of the given type with the listed black vertices.
WeightedSatakeDiagram standard_diagram(const std::string& type, int n, const std::vector<int>& black,
                                       const std::vector<std::pair<int, int>>& arrows, int circled);

// Diagrams are isomorphic as colored, circled, directed graphs with arrows.
bool diagrams_isomorphic(const WeightedSatakeDiagram& x, const WeightedSatakeDiagram& y);

std::optional<WeightedSatakeDiagram> descend_once(const WeightedSatakeDiagram& D);
// D, then each nonempty descendant
std::vector<WeightedSatakeDiagram> descent_sequence(const WeightedSatakeDiagram& D);

/**
 * Constants read off the relative root system: lambda_0..lambda_k chosen
 * greedily as highest restricted roots in V+ strongly orthogonal to the
 * previous ones; ell, d, e as multiplicities.
 */
struct RootConstants {
    int rank = 0;
    int dim_vplus = 0;
    int ell = 0;
    int d = -1;  // -1 when rank 1
    int e = -1;
    int d_plus = -1;  // dim E_{0,1}(1,1), must equal d
};
RootConstants root_constants(const WeightedSatakeDiagram& D);

struct Table1Entry {
    int row = 0;
    int param = 0;
    std::string param_name;  // "n" or "m"
    int rank = 0;
    int ell = 0;
    int d = -1;
    int e = -1;
    std::string type;      // I, II, III
    std::string one_type;  // (A,1) or B
    bool realization_scope = true;
};

// Golden table, indexed by row (1..13); nullopt when the parameter is out of range.
std::optional<Table1Entry> table1_entry(int row, int param);
std::optional<WeightedSatakeDiagram> table1_diagram(int row, int param);
// rows with a supported matrix-free classification and the parameters used by the checks
std::vector<std::pair<int, std::vector<int>>> table1_sample_parameters();

int open_G_orbits(const std::string& type, int e, int k);
int open_P_orbits(const std::string& type, int e, int k);

struct GradedProfile {
    int row = 0;
    int param = 0;
    std::string param_name;
    int rank = 0;
    int ell = 0;
    int d = -1;
    int e = -1;
    int kappa = 1;
    mpq_class m_const;
    int dim_vplus = 0;
    std::string type;
    std::string one_type;
    int open_G = 0;
    int open_P = 0;
    int descent_rank = 0;
    std::vector<std::string> descent_shapes;
};

GradedProfile classify_profile(const WeightedSatakeDiagram& D);
std::string profile_to_json(const GradedProfile& P);

}  // namespace plgz
