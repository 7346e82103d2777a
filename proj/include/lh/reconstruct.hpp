#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lh/geometry.hpp"
#include "lh/validate.hpp"

namespace lh {

// Role of a node in a Dirichlet-constrained solve.
enum class NodeState : std::uint8_t {
    absent = 0,   // outside the problem; must not be referenced by any equation
    known = 1,    // Dirichlet value
    unknown = 2,  // solved for
};

class NodeStates {
public:
    explicit NodeStates(const ParamGrid& grid, NodeState fill = NodeState::absent)
        : grid_(grid), states_(grid.size(), fill) {}

    // margin < begin: absent; begin <= margin < begin + width: known; deeper: unknown.
    static NodeStates rings(const ParamGrid& grid, std::size_t begin, std::size_t width);

    // `unknown` nodes are unknown; every other node with margin >= valid_margin is known.
    static NodeStates around(const HoleMask& unknown, std::size_t valid_margin);

    [[nodiscard]] const ParamGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] NodeState operator()(std::size_t i, std::size_t j) const noexcept {
        return states_[grid_.index(i, j)];
    }
    void set(std::size_t i, std::size_t j, NodeState s) noexcept { states_[grid_.index(i, j)] = s; }
    [[nodiscard]] std::size_t count(NodeState s) const noexcept;
    // Smallest grid margin of a non-absent node.
    [[nodiscard]] std::size_t present_margin() const noexcept;

private:
    ParamGrid grid_;
    std::vector<NodeState> states_;
};

// (phi_z, phi_zbar, n) per node. v is kept equal to conj(u).
struct NaturalFrame {
    CVec3Field u;
    CVec3Field v;
    Vec3Field w;

    NaturalFrame(CVec3Field u_field, Vec3Field w_field);
    [[nodiscard]] const ParamGrid& grid() const noexcept { return u.grid(); }
};

// Forward frame of a patch: u = d_z(phi), w = unit normal. Valid at margin >= 1.
NaturalFrame extract_frame(const SurfacePatch& s);

struct FrameInvariants {
    double isotropy = 0.0;   // max |<u,u>| / lambda^2
    double metric = 0.0;     // max |2<u,conj u> - lambda^2| / lambda^2
    double conjugate = 0.0;  // max |v - conj u| / |u|
    double unit = 0.0;       // max | |w| - 1 |
};

// Invariants over frame nodes that are valid for both frame and lambda; when
// `only` is given, restricted to nodes in that state.
FrameInvariants frame_invariants(const NaturalFrame& frame, const ScalarField& lambda,
                                 const NodeStates* states = nullptr,
                                 std::optional<NodeState> only = std::nullopt);

struct PositionBoundary {
    Vec3Field phi;
    NodeStates states;
};

struct FrameBoundary {
    NaturalFrame frame;
    NodeStates states;
};

struct MuBoundary {
    ComplexField mu;
    NodeStates states;
};

// Boundary neighbourhood that pins down a surface from (lambda, H).
struct BoundaryData {
    // Ring layout (in nodes from the grid edge) of rectangle-type data.
    struct Rings {
        std::size_t phi_width = 2;
        std::size_t frame_begin = 1;
        std::size_t frame_width = 2;
        std::size_t mu_begin = 2;
        std::size_t mu_width = 1;
    };

    PositionBoundary position;
    FrameBoundary frame;
    MuBoundary mu;
    std::optional<Rings> rings;  // set for rectangle-ring data (serializable)

    [[nodiscard]] const ParamGrid& grid() const noexcept { return position.phi.grid(); }

    // Outer rings of a patch: positions on margins 0-1, frame on 1-2, mu on 2.
    static BoundaryData from_rings(const SurfacePatch& s, const Rings& rings);
    static BoundaryData from_rings(const SurfacePatch& s);

    // Everything outside a hole: positions off the hole, frame off its
    // 1-dilation, mu off its 2-dilation. The hole must sit >= 5 nodes inside.
    static BoundaryData around_hole(const SurfacePatch& s, const HoleMask& hole);

    // Applies a rigid motion to positions and frame vectors; mu is invariant.
    [[nodiscard]] BoundaryData moved(const RigidMotion& motion) const;
};

// "LHB1" | u64 n | u64 m | f64 k | u8 phi_width | u8 frame_begin | u8 frame_width
//        | u8 mu_begin | u8 mu_width | phi ring (x,y,z) | frame ring (u re/im x3, w x3)
//        | mu ring (re, im); rings in row-major node order.
void write_boundary(std::ostream& out, const BoundaryData& bd);
BoundaryData read_boundary(std::istream& in);
void save_boundary(const std::string& path, const BoundaryData& bd);
BoundaryData load_boundary(const std::string& path);

// lambda (2 lambda_z H_z + lambda H_zz) / 2, i.e. the target of
// d_z d_zbar mu = Lap(mu) / 4 obtained by differentiating Codazzi.
ComplexField codazzi_rhs(const ScalarField& lambda, const ScalarField& h_mean);

struct MuSolution {
    ComplexField mu;
    double residual = 0.0;  // max |Lap(mu)/4 - rhs| / max|rhs| over unknown nodes
};

// Dirichlet Poisson solve of Lap(mu) = 4 rhs on the unknown nodes.
MuSolution solve_mu(const ComplexField& rhs, const MuBoundary& boundary);

struct FrameSolution {
    NaturalFrame frame;
    double residual = 0.0;        // normal-equation residual, relative
    double misfit = 0.0;          // least-squares misfit |Ax-b| / |b|
    FrameInvariants invariants;   // over solved nodes, before normalization of w
    std::vector<std::string> warnings;
};

// Least-squares solve of the central-difference natural-frame system
//   d_z u    = (2/lambda) lambda_z u + mu w
//   d_zbar u = (lambda^2/2) H w
//   d_z w    = -H u - (2 mu / lambda^2) conj(u)
// with v = conj(u) eliminated; one factorization serves all three coordinates.
FrameSolution solve_frame(const ScalarField& lambda, const ScalarField& h_mean, const ComplexField& mu,
                          const FrameBoundary& boundary);

struct PositionSolution {
    SurfacePatch patch;
    double residual = 0.0;  // normal-equation residual, relative
    double curl = 0.0;      // max discrete curl of the target gradient, relative
    std::vector<std::string> warnings;
};

// Least-squares integration of phi_u = u + v, phi_v = i (u - v).
PositionSolution integrate_position(const NaturalFrame& frame, const PositionBoundary& boundary);

struct Reconstruction {
    SurfacePatch patch;
    ComplexField mu;
    NaturalFrame frame;
    std::vector<std::string> warnings;
};

// codazzi_rhs -> solve_mu -> solve_frame -> integrate_position. Errors carry
// the failing stage name.
Reconstruction reconstruct_surface(const LambdaH& lh, const BoundaryData& bd);

}  // namespace lh
