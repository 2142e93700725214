#include "rwre/embedding.hpp"

#include <stdexcept>

namespace rwre {

TreePath embed_R(const EnvironmentWindow& window, const LabelAlphabet& alphabet, LabeledTree& tree) {
    if (!window.covers(0)) throw std::invalid_argument("environment window must contain site 0");
    if (alphabet.label_of(window.at(0)) != tree.label(tree.root()))
        throw std::invalid_argument("omega(0) must carry the root label");

    TreePath r;
    r.role = TreePath::Role::r_path;
    r.first_index = window.first_site;
    r.vertices.resize(window.values.size());
    const auto origin = static_cast<std::size_t>(-window.first_site);
    r.vertices[origin] = tree.root();
    for (std::size_t i = origin + 1; i < window.values.size(); ++i)
        r.vertices[i] = tree.neighbor(r.vertices[i - 1], alphabet.label_of(window.values[i]));
    for (std::size_t i = origin; i-- > 0;)
        r.vertices[i] = tree.neighbor(r.vertices[i + 1], alphabet.label_of(window.values[i]));
    return r;
}

TreePath compose_T(const TreePath& r_path, const Trajectory& x) {
    TreePath t;
    t.role = TreePath::Role::t_path;
    t.vertices.reserve(x.positions.size());
    for (Site z : x.positions) {
        if (!r_path.covers(z)) throw std::out_of_range("trajectory leaves the embedded window");
        t.vertices.push_back(r_path.at(z));
    }
    return t;
}

} // namespace rwre
