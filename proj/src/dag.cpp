#include <obi/dag.hpp>

#include <json.hpp>

#include <algorithm>
#include <numeric>

namespace obi {

void Dag::add_edge(int from, int to) {
    const int n = static_cast<int>(nodes.size());
    if (from < 0 || from >= n || to < 0 || to >= n) throw StructuralError("dag: edge endpoint does not exist");
    if (from == to) throw StructuralError("dag: self loop");
    if (!has_edge(from, to)) edges.emplace_back(from, to);
}

int Dag::index_of(const std::string& name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> Dag::children(int i) const {
    std::vector<int> out;
    for (const auto& [f, t] : edges)
        if (f == i) out.push_back(t);
    return out;
}

std::vector<int> Dag::parents(int i) const {
    std::vector<int> out;
    for (const auto& [f, t] : edges)
        if (t == i) out.push_back(f);
    return out;
}

std::vector<int> Dag::observable_nodes() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (!nodes[i].latent) out.push_back(static_cast<int>(i));
    return out;
}

bool Dag::has_edge(int from, int to) const {
    for (const auto& [f, t] : edges)
        if (f == from && t == to) return true;
    return false;
}

bool Dag::acyclic() const {
    const int n = static_cast<int>(nodes.size());
    std::vector<int> indeg(n, 0);
    for (const auto& [f, t] : edges) {
        (void)f;
        indeg[t]++;
    }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    int seen = 0;
    while (!queue.empty()) {
        const int u = queue.back();
        queue.pop_back();
        ++seen;
        for (int v : children(u))
            if (--indeg[v] == 0) queue.push_back(v);
    }
    return seen == n;
}

void Dag::check() const {
    const int n = static_cast<int>(nodes.size());
    for (const auto& [f, t] : edges)
        if (f < 0 || f >= n || t < 0 || t >= n) throw StructuralError("dag: dangling edge");
    if (!acyclic()) throw StructuralError("dag: cycle detected");
}

Dag instrumental_dag() {
    Dag g;
    const int x = g.add_node("X");
    const int a = g.add_node("A");
    const int b = g.add_node("B");
    const int lam = g.add_node("Lambda", true);
    g.add_edge(x, a);
    g.add_edge(a, b);
    g.add_edge(lam, a);
    g.add_edge(lam, b);
    return g;
}

Dag bell_dag() {
    Dag g;
    const int x = g.add_node("X");
    const int a = g.add_node("A");
    const int b = g.add_node("B");
    const int lam = g.add_node("Lambda", true);
    const int y = g.add_node("Y");
    g.add_edge(x, a);
    g.add_edge(y, b);
    g.add_edge(lam, a);
    g.add_edge(lam, b);
    return g;
}

Exogenized exogenize_full(const Dag& g, const std::vector<int>& targets) {
    g.check();
    Exogenized out;
    out.dag = g;
    out.bar_of.assign(g.nodes.size(), -1);
    for (int i : targets) {
        if (i < 0 || i >= static_cast<int>(g.nodes.size())) throw DomainError("exogenize: unknown node");
        if (g.nodes[static_cast<size_t>(i)].latent) throw DomainError("exogenize: target node is latent");
        if (out.bar_of[static_cast<size_t>(i)] >= 0) throw DomainError("exogenize: duplicate target");
        const int bar = out.dag.add_node(g.nodes[static_cast<size_t>(i)].name + "_bar", false);
        out.bar_of[static_cast<size_t>(i)] = bar;
        const auto kids = g.children(i);
        // Move the outgoing edges: the original keeps its mechanism (incoming
        // edges), the copy feeds the children.
        out.dag.edges.erase(std::remove_if(out.dag.edges.begin(), out.dag.edges.end(),
                                           [i](const std::pair<int, int>& e) { return e.first == i; }),
                            out.dag.edges.end());
        for (int c : kids) out.dag.add_edge(bar, c);
    }
    out.dag.check();
    return out;
}

Dag exogenize(const Dag& g, const std::vector<int>& targets) { return exogenize_full(g, targets).dag; }

bool isomorphic(const Dag& a, const Dag& b) {
    const int n = static_cast<int>(a.nodes.size());
    if (n != static_cast<int>(b.nodes.size()) || a.edges.size() != b.edges.size()) return false;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            if (a.nodes[static_cast<size_t>(i)].latent != b.nodes[static_cast<size_t>(perm[static_cast<size_t>(i)])].latent) ok = false;
        for (const auto& [f, t] : a.edges) {
            if (!ok) break;
            if (!b.has_edge(perm[static_cast<size_t>(f)], perm[static_cast<size_t>(t)])) ok = false;
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

std::string dag_to_json(const Dag& g) {
    nlohmann::json j;
    for (const auto& n : g.nodes) j["nodes"].push_back({{"name", n.name}, {"latent", n.latent}});
    j["edges"] = nlohmann::json::array();
    for (const auto& [f, t] : g.edges)
        j["edges"].push_back({g.nodes[static_cast<size_t>(f)].name, g.nodes[static_cast<size_t>(t)].name});
    return j.dump(2);
}

Dag dag_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Dag g;
    for (const auto& n : j.at("nodes")) g.add_node(n.at("name").get<std::string>(), n.value("latent", false));
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) {
            const int f = g.index_of(e.at(0).get<std::string>());
            const int t = g.index_of(e.at(1).get<std::string>());
            if (f < 0 || t < 0) throw StructuralError("dag json: edge endpoint not declared");
            g.add_edge(f, t);
        }
    g.check();
    return g;
}

// --- joint tables ---------------------------------------------------------------

JointTable::JointTable(std::vector<int> cards) : card(std::move(cards)) {
    size_t n = 1;
    for (int c : card) {
        if (c < 1) throw StructuralError("joint table: bad cardinality");
        n *= static_cast<size_t>(c);
    }
    if (n > (size_t(1) << 20)) throw CapacityError("joint table: support above 2^20 cells");
    p.assign(n, 0.0);
}

size_t JointTable::offset(const std::vector<int>& idx) const {
    if (idx.size() != card.size()) throw StructuralError("joint table: wrong index arity");
    size_t off = 0;
    for (size_t i = 0; i < card.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= card[i]) throw StructuralError("joint table: index out of range");
        off = off * static_cast<size_t>(card[i]) + static_cast<size_t>(idx[i]);
    }
    return off;
}

ExoMapResult exo_map_g(const Dag& base, const std::vector<int>& targets, const JointTable& q) {
    const auto obs = base.observable_nodes();
    const size_t nobs = obs.size(), nt = targets.size();
    if (q.card.size() != nobs + nt) throw StructuralError("exo_map_g: table arity mismatch");
    std::vector<size_t> tpos(nt); // position of each target among the base observables
    for (size_t k = 0; k < nt; ++k) {
        auto it = std::find(obs.begin(), obs.end(), targets[k]);
        if (it == obs.end()) throw DomainError("exo_map_g: target not an observable node");
        tpos[k] = static_cast<size_t>(it - obs.begin());
        if (q.card[nobs + k] != q.card[tpos[k]])
            throw StructuralError("exo_map_g: exogenous copy cardinality mismatch");
    }

    ExoMapResult res;
    std::vector<int> base_card(q.card.begin(), q.card.begin() + static_cast<long>(nobs));
    res.obs = JointTable(base_card);

    // Observational part: condition on every exogenous copy matching its node.
    double z = 0;
    std::vector<int> idx(nobs + nt);
    std::vector<int> bidx(nobs);
    const size_t ncells = res.obs.cells();
    for (size_t cell = 0; cell < ncells; ++cell) {
        size_t rem = cell;
        for (size_t i = nobs; i-- > 0;) {
            bidx[i] = static_cast<int>(rem % static_cast<size_t>(base_card[i]));
            rem /= static_cast<size_t>(base_card[i]);
        }
        for (size_t i = 0; i < nobs; ++i) idx[i] = bidx[i];
        for (size_t k = 0; k < nt; ++k) idx[nobs + k] = bidx[tpos[k]];
        const double v = q.at(idx);
        res.obs.p[cell] = v;
        z += v;
    }
    if (z <= 0) {
        res.obs_defined = false;
    } else {
        for (auto& v : res.obs.p) v /= z;
    }

    // Interventional part: for each forced assignment, marginalize the
    // original target values out of the conditional distribution.
    std::vector<int> rest; // positions of non-target observables
    for (size_t i = 0; i < nobs; ++i)
        if (std::find(tpos.begin(), tpos.end(), i) == tpos.end()) rest.push_back(static_cast<int>(i));
    std::vector<int> rest_card;
    for (int i : rest) rest_card.push_back(base_card[static_cast<size_t>(i)]);

    size_t nassign = 1;
    for (size_t k = 0; k < nt; ++k) nassign *= static_cast<size_t>(q.card[nobs + k]);
    for (size_t am = 0; am < nassign; ++am) {
        DoEntry entry;
        entry.assignment.resize(nt);
        size_t rem = am;
        for (size_t k = nt; k-- > 0;) {
            entry.assignment[k] = static_cast<int>(rem % static_cast<size_t>(q.card[nobs + k]));
            rem /= static_cast<size_t>(q.card[nobs + k]);
        }
        entry.table = JointTable(rest_card.empty() ? std::vector<int>{1} : rest_card);
        double denom = 0;
        const size_t total = q.cells();
        for (size_t cell = 0; cell < total; ++cell) {
            size_t r2 = cell;
            for (size_t i = nobs + nt; i-- > 0;) {
                idx[i] = static_cast<int>(r2 % static_cast<size_t>(q.card[i]));
                r2 /= static_cast<size_t>(q.card[i]);
            }
            bool match = true;
            for (size_t k = 0; k < nt; ++k)
                if (idx[nobs + k] != entry.assignment[k]) { match = false; break; }
            if (!match) continue;
            denom += q.p[cell];
            if (!rest.empty()) {
                std::vector<int> ridx;
                ridx.reserve(rest.size());
                for (int i : rest) ridx.push_back(idx[static_cast<size_t>(i)]);
                entry.table.at(ridx) += q.p[cell];
            } else {
                entry.table.p[0] += q.p[cell];
            }
        }
        if (denom <= 0) {
            entry.defined = false;
        } else {
            for (auto& v : entry.table.p) v /= denom;
        }
        res.do_.push_back(std::move(entry));
    }
    return res;
}

} // namespace obi
