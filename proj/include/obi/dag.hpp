#pragma once

// Labeled DAGs with observable/latent nodes, the node-splitting construction
// that trades interventions for exogenous inputs, and the induced map from
// distributions on the split graph to observational/interventional pairs.

#include <obi/errors.hpp>

#include <string>
#include <utility>
#include <vector>

namespace obi {

struct DagNode {
    std::string name;
    bool latent = false;
};

struct Dag {
    std::vector<DagNode> nodes;
    std::vector<std::pair<int, int>> edges;

    int add_node(const std::string& name, bool latent = false) {
        nodes.push_back({name, latent});
        return static_cast<int>(nodes.size()) - 1;
    }
    void add_edge(int from, int to);
    int index_of(const std::string& name) const;
    std::vector<int> children(int i) const;
    std::vector<int> parents(int i) const;
    std::vector<int> observable_nodes() const;
    bool has_edge(int from, int to) const;
    bool acyclic() const;
    void check() const; // endpoints exist, acyclic
};

Dag instrumental_dag(); // X -> A -> B with a latent common cause of A and B
Dag bell_dag();         // X -> A, Y -> B, latent common cause of A and B

struct InterventionalScenario {
    Dag base;
    std::vector<std::vector<int>> targets; // the type stores a list of target
                                           // sets; operations act on one set
};

// Split every target node i into i (keeps the incoming edges) and an
// exogenous copy i_bar that takes over the outgoing edges.
Dag exogenize(const Dag& g, const std::vector<int>& targets);
inline Dag exogenize(const InterventionalScenario& s, const std::vector<int>& targets) {
    return exogenize(s.base, targets);
}

struct Exogenized {
    Dag dag;
    std::vector<int> bar_of; // base node id -> id of its exogenous copy, -1 otherwise
};
Exogenized exogenize_full(const Dag& g, const std::vector<int>& targets);

bool isomorphic(const Dag& a, const Dag& b); // respects the latent flag

std::string dag_to_json(const Dag& g);
Dag dag_from_json(const std::string& text);

// --- distributions on graphs ---------------------------------------------------

struct JointTable {
    std::vector<int> card;  // per-variable cardinality
    std::vector<double> p;  // dense, first variable is the slowest index

    JointTable() = default;
    explicit JointTable(std::vector<int> cards);
    size_t cells() const { return p.size(); }
    size_t offset(const std::vector<int>& idx) const;
    double& at(const std::vector<int>& idx) { return p[offset(idx)]; }
    double at(const std::vector<int>& idx) const { return p[offset(idx)]; }
};

struct DoEntry {
    std::vector<int> assignment; // values forced on the targets
    bool defined = true;         // false when the conditioning event has zero mass
    JointTable table;            // over the non-target observables
};

struct ExoMapResult {
    bool obs_defined = true;
    JointTable obs;            // over the base observables, base order
    std::vector<DoEntry> do_;  // one entry per intervention assignment
};

// q is a distribution over the observables of exogenize(base, targets): the
// base observables in base order followed by one exogenous copy per target.
ExoMapResult exo_map_g(const Dag& base, const std::vector<int>& targets, const JointTable& q);

} // namespace obi
