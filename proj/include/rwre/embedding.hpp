#pragma once

#include <vector>

#include "rwre/environment.hpp"
#include "rwre/tree.hpp"

namespace rwre {

/// A path on the labeled tree. An R-path is indexed by sites starting at
/// `first_index`; a T-path is indexed by time and starts at 0.
struct TreePath {
    enum class Role { r_path, t_path };

    Role role = Role::t_path;
    Site first_index = 0;
    std::vector<VertexId> vertices;

    bool covers(Site i) const {
        return i >= first_index && i < first_index + static_cast<Site>(vertices.size());
    }
    VertexId at(Site i) const { return vertices.at(static_cast<std::size_t>(i - first_index)); }
};

/// The embedding R of an environment window into `tree`: R(0) is the root and
/// the label of R(z) is omega(z). Throws SupportDriftError for values missing
/// from `alphabet` and std::invalid_argument if omega(0) is not the root label.
TreePath embed_R(const EnvironmentWindow& window, const LabelAlphabet& alphabet, LabeledTree& tree);

/// T(n) = R(X(n)). Throws std::out_of_range if the trajectory leaves the R window.
TreePath compose_T(const TreePath& r_path, const Trajectory& x);

} // namespace rwre
