#include "lh/reconstruct.hpp"

#include <cmath>
#include <sstream>

#include "linear_solve.hpp"

namespace lh {

using detail::least_squares;
using detail::spd_solve;
using detail::SparseMatrix;
using Triplet = Eigen::Triplet<double>;

// ---------------------------------------------------------------------------
// NodeStates
// ---------------------------------------------------------------------------

NodeStates NodeStates::rings(const ParamGrid& grid, std::size_t begin, std::size_t width) {
    NodeStates s(grid);
    for (std::size_t j = 0; j < grid.nv(); ++j)
        for (std::size_t i = 0; i < grid.nu(); ++i) {
            std::size_t m = grid.margin(i, j);
            s.set(i, j, m < begin ? NodeState::absent : m < begin + width ? NodeState::known : NodeState::unknown);
        }
    return s;
}

NodeStates NodeStates::around(const HoleMask& unknown, std::size_t valid_margin) {
    const ParamGrid& grid = unknown.grid();
    NodeStates s(grid);
    for (std::size_t j = 0; j < grid.nv(); ++j)
        for (std::size_t i = 0; i < grid.nu(); ++i) {
            if (unknown.occluded(i, j)) {
                s.set(i, j, NodeState::unknown);
            } else if (grid.margin(i, j) >= valid_margin) {
                s.set(i, j, NodeState::known);
            }
        }
    return s;
}

std::size_t NodeStates::count(NodeState st) const noexcept {
    std::size_t c = 0;
    for (auto x : states_) c += (x == st);
    return c;
}

std::size_t NodeStates::present_margin() const noexcept {
    std::size_t best = std::max(grid_.n(), grid_.m());
    for (std::size_t j = 0; j < grid_.nv(); ++j)
        for (std::size_t i = 0; i < grid_.nu(); ++i)
            if ((*this)(i, j) != NodeState::absent) best = std::min(best, grid_.margin(i, j));
    return best;
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

NaturalFrame::NaturalFrame(CVec3Field u_field, Vec3Field w_field)
    : u(std::move(u_field)), v(transform(u, [](const CVec3& x) -> CVec3 { return x.conjugate(); })),
      w(std::move(w_field)) {
    require_same_grid(u.grid(), w.grid(), "NaturalFrame");
}

NaturalFrame extract_frame(const SurfacePatch& s) {
    Vec3Field n = surface_normal(s);
    return NaturalFrame(d_z(s.phi()), std::move(n));
}

FrameInvariants frame_invariants(const NaturalFrame& frame, const ScalarField& lambda, const NodeStates* states,
                                 std::optional<NodeState> only) {
    FrameInvariants r;
    const ParamGrid& g = frame.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (!frame.u.valid(i, j) || !lambda.valid(i, j)) continue;
            if (states && (*states)(i, j) == NodeState::absent) continue;
            if (states && only && (*states)(i, j) != *only) continue;
            const CVec3& u = frame.u(i, j);
            double l2 = lambda(i, j) * lambda(i, j);
            r.isotropy = std::max(r.isotropy, std::abs(u.dot(u.conjugate())) / l2);
            double herm = 2.0 * u.squaredNorm();
            r.metric = std::max(r.metric, std::abs(herm - l2) / l2);
            double un = u.norm();
            if (un > 0.0) r.conjugate = std::max(r.conjugate, (frame.v(i, j) - u.conjugate()).norm() / un);
            r.unit = std::max(r.unit, std::abs(frame.w(i, j).norm() - 1.0));
        }
    return r;
}

// ---------------------------------------------------------------------------
// BoundaryData
// ---------------------------------------------------------------------------

BoundaryData BoundaryData::from_rings(const SurfacePatch& s, const Rings& rings) {
    const ParamGrid& g = s.grid();
    if (rings.frame_begin < 1 || rings.mu_begin < 2) {
        throw InputError("boundary rings: frame rings start at margin >= 1, mu rings at margin >= 2");
    }
    NaturalFrame frame = extract_frame(s);
    ComplexField mu = mu_from_surface(s);
    BoundaryData bd{{s.phi(), NodeStates::rings(g, 0, rings.phi_width)},
                    {std::move(frame), NodeStates::rings(g, rings.frame_begin, rings.frame_width)},
                    {std::move(mu), NodeStates::rings(g, rings.mu_begin, rings.mu_width)},
                    rings};
    return bd;
}

BoundaryData BoundaryData::from_rings(const SurfacePatch& s) { return from_rings(s, Rings{}); }

BoundaryData BoundaryData::around_hole(const SurfacePatch& s, const HoleMask& hole) {
    require_same_grid(s.grid(), hole.grid(), "around_hole");
    hole.require_interior(5, "around_hole");
    NaturalFrame frame = extract_frame(s);
    ComplexField mu = mu_from_surface(s);
    return BoundaryData{{s.phi(), NodeStates::around(hole, 0)},
                        {std::move(frame), NodeStates::around(hole.dilated(1), 1)},
                        {std::move(mu), NodeStates::around(hole.dilated(2), 2)},
                        std::nullopt};
}

BoundaryData BoundaryData::moved(const RigidMotion& motion) const {
    BoundaryData out = *this;
    out.position.phi = transform(position.phi, [&](const Vec3& p) -> Vec3 { return motion.apply(p); });
    const Eigen::Matrix3cd rot = motion.rotation.cast<Complex>();
    out.frame.frame = NaturalFrame(transform(frame.frame.u, [&](const CVec3& u) -> CVec3 { return rot * u; }),
                                   transform(frame.frame.w, [&](const Vec3& w) -> Vec3 { return motion.rotation * w; }));
    return out;
}

// ---------------------------------------------------------------------------
// Codazzi right-hand side and mu
// ---------------------------------------------------------------------------

namespace {

void require_positive(const ScalarField& lambda, const char* stage) {
    const ParamGrid& g = lambda.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (lambda.valid(i, j) && !(lambda(i, j) > 0.0)) {
                throw InputError(std::string(stage) + ": lambda must be positive, node (" + std::to_string(i) +
                                 "," + std::to_string(j) + ")");
            }
}

std::string node_name(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

struct Offset {
    int di;
    int dj;
};
constexpr Offset kCross[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

std::size_t shifted(std::size_t x, int d) { return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + d); }

// Column index per node for nodes in the unknown state, -1 otherwise.
std::vector<std::ptrdiff_t> number_unknowns(const NodeStates& states, std::size_t& count) {
    const ParamGrid& g = states.grid();
    std::vector<std::ptrdiff_t> col(g.size(), -1);
    count = 0;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (states(i, j) == NodeState::unknown) col[g.index(i, j)] = static_cast<std::ptrdiff_t>(count++);
    return col;
}

}  // namespace

ComplexField codazzi_rhs(const ScalarField& lambda, const ScalarField& h_mean) {
    require_same_grid(lambda.grid(), h_mean.grid(), "codazzi_rhs");
    require_positive(lambda, "codazzi_rhs");
    const ComplexField lambda_z = d_z(lambda);
    const ComplexField h_z = d_z(h_mean);
    const ComplexField h_zz = d_z(h_z);
    ComplexField out(lambda.grid(), std::max({lambda_z.margin(), h_z.margin(), h_zz.margin()}));
    const ParamGrid& g = lambda.grid();
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (!out.valid(i, j)) continue;
            double l = lambda(i, j);
            out(i, j) = 0.5 * l * (2.0 * lambda_z(i, j) * h_z(i, j) + l * h_zz(i, j));
        }
    return out;
}

MuSolution solve_mu(const ComplexField& rhs, const MuBoundary& boundary) {
    const ParamGrid& g = rhs.grid();
    require_same_grid(g, boundary.mu.grid(), "solve_mu");
    require_same_grid(g, boundary.states.grid(), "solve_mu");
    const NodeStates& st = boundary.states;

    std::size_t count = 0;
    auto col = number_unknowns(st, count);
    MuSolution out{ComplexField(g, st.present_margin()), 0.0};
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (st(i, j) == NodeState::known) out.mu(i, j) = boundary.mu(i, j);
    if (count == 0) return out;

    const double h2 = g.h() * g.h();
    std::vector<Triplet> trip;
    trip.reserve(count * 5);
    Eigen::MatrixXd b(count, 2);
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (st(i, j) != NodeState::unknown) continue;
            if (!rhs.valid(i, j)) {
                throw InputError("solve_mu: right-hand side undefined at unknown node " + node_name(i, j));
            }
            auto row = col[g.index(i, j)];
            // 4 mu_p - sum(mu_q) = -h^2 Lap(mu) = -4 h^2 rhs
            Complex acc = -4.0 * h2 * rhs(i, j);
            trip.emplace_back(row, row, 4.0);
            for (auto [di, dj] : kCross) {
                std::size_t qi = shifted(i, di), qj = shifted(j, dj);
                NodeState s = st(qi, qj);
                if (s == NodeState::unknown) {
                    trip.emplace_back(row, col[g.index(qi, qj)], -1.0);
                } else if (s == NodeState::known) {
                    acc += boundary.mu(qi, qj);
                } else {
                    throw InputError("solve_mu: boundary ring incomplete next to node " + node_name(i, j));
                }
            }
            b(row, 0) = acc.real();
            b(row, 1) = acc.imag();
        }
    SparseMatrix a(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd x = spd_solve(a, b, "solve_mu");

    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            auto c = col[g.index(i, j)];
            if (c >= 0) out.mu(i, j) = Complex(x(c, 0), x(c, 1));
        }

    // Residual of Lap(mu)/4 = rhs on the unknown nodes.
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (st(i, j) != NodeState::unknown) continue;
            Complex lap = out.mu(i + 1, j) + out.mu(i - 1, j) + out.mu(i, j + 1) + out.mu(i, j - 1) -
                          4.0 * out.mu(i, j);
            num = std::max(num, std::abs(lap / (4.0 * h2) - rhs(i, j)));
            den = std::max(den, std::abs(rhs(i, j)));
        }
    out.residual = den > 0.0 ? num / den : num;
    return out;
}

// ---------------------------------------------------------------------------
// Natural frame
// ---------------------------------------------------------------------------

namespace {

enum class Slot { u, u_conj, w };

// Accumulates the real/imaginary row pair of one complex equation.
struct ComplexRow {
    std::ptrdiff_t row;  // index of the real part; imaginary part is row + 1
    std::vector<Triplet>* trip;
    Eigen::MatrixXd* rhs;
    const std::vector<std::ptrdiff_t>* col;
    const NodeStates* states;
    const NaturalFrame* known;
    const ParamGrid* grid;

    void add(Complex c, std::size_t i, std::size_t j, Slot slot) const {
        const std::size_t idx = grid->index(i, j);
        const std::ptrdiff_t node = (*col)[idx];
        const double cr = c.real(), ci = c.imag();
        if (node >= 0) {
            const std::ptrdiff_t x = 3 * node, y = 3 * node + 1, w = 3 * node + 2;
            switch (slot) {
                case Slot::u:
                    push(row, x, cr), push(row, y, -ci), push(row + 1, x, ci), push(row + 1, y, cr);
                    break;
                case Slot::u_conj:
                    push(row, x, cr), push(row, y, ci), push(row + 1, x, ci), push(row + 1, y, -cr);
                    break;
                case Slot::w:
                    push(row, w, cr), push(row + 1, w, ci);
                    break;
            }
            return;
        }
        for (int k = 0; k < 3; ++k) {
            Complex term;
            switch (slot) {
                case Slot::u: term = c * known->u(i, j)[k]; break;
                case Slot::u_conj: term = c * std::conj(known->u(i, j)[k]); break;
                case Slot::w: term = c * known->w(i, j)[k]; break;
            }
            (*rhs)(row, k) -= term.real();
            (*rhs)(row + 1, k) -= term.imag();
        }
    }

    void push(std::ptrdiff_t r, std::ptrdiff_t c, double value) const {
        if (value != 0.0) trip->emplace_back(static_cast<int>(r), static_cast<int>(c), value);
    }
};

bool touches_unknown(const NodeStates& st, std::size_t i, std::size_t j, bool include_center) {
    const ParamGrid& g = st.grid();
    if (include_center && st(i, j) == NodeState::unknown) return true;
    if (i == 0 || j == 0 || i == g.n() || j == g.m()) return false;
    for (auto [di, dj] : kCross)
        if (st(shifted(i, di), shifted(j, dj)) == NodeState::unknown) return true;
    return false;
}

}  // namespace

FrameSolution solve_frame(const ScalarField& lambda, const ScalarField& h_mean, const ComplexField& mu,
                          const FrameBoundary& boundary) {
    const ParamGrid& g = lambda.grid();
    require_same_grid(g, h_mean.grid(), "solve_frame");
    require_same_grid(g, mu.grid(), "solve_frame");
    require_same_grid(g, boundary.frame.grid(), "solve_frame");
    require_positive(lambda, "solve_frame");
    const NodeStates& st = boundary.states;

    const ComplexField lambda_z = d_z(lambda);
    std::size_t count = 0;
    auto col = number_unknowns(st, count);

    // Equations sit at every node whose stencil reaches an unknown.
    std::vector<std::pair<std::size_t, std::size_t>> eq_nodes;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (st(i, j) == NodeState::unknown && g.margin(i, j) == 0) {
                throw InputError("solve_frame: unknown frame node on the grid edge " + node_name(i, j));
            }
            if (!touches_unknown(st, i, j, true)) continue;
            if (st(i, j) == NodeState::absent) {
                throw InputError("solve_frame: absent node " + node_name(i, j) + " next to unknown frame nodes");
            }
            if (!lambda_z.valid(i, j) || !h_mean.valid(i, j) || !mu.valid(i, j)) {
                throw InputError("solve_frame: lambda, H or mu undefined at equation node " + node_name(i, j));
            }
            for (auto [di, dj] : kCross)
                if (st(shifted(i, di), shifted(j, dj)) == NodeState::absent) {
                    throw InputError("solve_frame: boundary ring incomplete around node " + node_name(i, j));
                }
            eq_nodes.emplace_back(i, j);
        }

    FrameSolution out{boundary.frame, 0.0, 0.0, {}, {}};
    out.frame.u.set_margin(st.present_margin());
    out.frame.w.set_margin(st.present_margin());
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (st(i, j) != NodeState::known) {
                out.frame.u(i, j) = CVec3::Zero();
                out.frame.w(i, j) = Vec3::Zero();
            }
    if (count == 0) {
        out.frame = NaturalFrame(out.frame.u, out.frame.w);
        return out;
    }

    const std::size_t rows = 6 * eq_nodes.size();
    std::vector<Triplet> trip;
    trip.reserve(eq_nodes.size() * 60);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), 3);
    const double q = 1.0 / (4.0 * g.h());
    const Complex I(0.0, 1.0);

    for (std::size_t e = 0; e < eq_nodes.size(); ++e) {
        auto [i, j] = eq_nodes[e];
        const double l = lambda(i, j);
        const double l2 = l * l;
        const double hm = h_mean(i, j);
        const Complex m = mu(i, j);
        const Complex a = 2.0 * lambda_z(i, j) / l;
        const double wt = 1.0 / l;  // makes the u rows scale-free like the w rows
        auto row = [&](std::size_t r) {
            return ComplexRow{static_cast<std::ptrdiff_t>(6 * e + r), &trip, &b, &col, &st, &boundary.frame, &g};
        };

        // d_z u - a u - mu w = 0
        ComplexRow r1 = row(0);
        r1.add(wt * q, i + 1, j, Slot::u);
        r1.add(-wt * q, i - 1, j, Slot::u);
        r1.add(-wt * q * I, i, j + 1, Slot::u);
        r1.add(wt * q * I, i, j - 1, Slot::u);
        r1.add(-wt * a, i, j, Slot::u);
        r1.add(-wt * m, i, j, Slot::w);

        // d_zbar u - (lambda^2/2) H w = 0
        ComplexRow r2 = row(2);
        r2.add(wt * q, i + 1, j, Slot::u);
        r2.add(-wt * q, i - 1, j, Slot::u);
        r2.add(wt * q * I, i, j + 1, Slot::u);
        r2.add(-wt * q * I, i, j - 1, Slot::u);
        r2.add(Complex(-wt * 0.5 * l2 * hm), i, j, Slot::w);

        // d_z w + H u + (2 mu / lambda^2) conj(u) = 0
        ComplexRow r3 = row(4);
        r3.add(q, i + 1, j, Slot::w);
        r3.add(-q, i - 1, j, Slot::w);
        r3.add(-q * I, i, j + 1, Slot::w);
        r3.add(q * I, i, j - 1, Slot::w);
        r3.add(Complex(hm), i, j, Slot::u);
        r3.add(2.0 * m / l2, i, j, Slot::u_conj);
    }

    SparseMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(3 * count));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd x;
    try {
        x = least_squares(a, b, "solve_frame", out.residual, out.misfit);
    } catch (const NumericalError& err) {
        throw NumericalError(std::string(err.what()) + " (rank-deficient frame assembly)");
    }

    CVec3Field u = out.frame.u;
    Vec3Field w = out.frame.w;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            auto c = col[g.index(i, j)];
            if (c < 0) continue;
            for (int k = 0; k < 3; ++k) {
                u(i, j)[k] = Complex(x(3 * c, k), x(3 * c + 1, k));
                w(i, j)[k] = x(3 * c + 2, k);
            }
        }
    NaturalFrame raw(u, w);
    out.invariants = frame_invariants(raw, lambda, &st, NodeState::unknown);
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (col[g.index(i, j)] >= 0) {
                double wn = w(i, j).norm();
                if (!(wn > 0.0)) throw NumericalError("solve_frame: zero normal at node " + node_name(i, j));
                w(i, j) /= wn;
            }
    out.frame = NaturalFrame(std::move(u), std::move(w));

    const double worst = std::max({out.invariants.isotropy, out.invariants.metric, out.invariants.unit});
    if (worst > 1e-4) {
        std::ostringstream msg;
        msg << "solve_frame: consistency warning, frame invariants violated by " << worst
            << " (lambda, H, mu not exactly integrable at this resolution)";
        out.warnings.push_back(msg.str());
    }
    if (out.residual > 1e-8) {
        std::ostringstream msg;
        msg << "solve_frame: normal-equation residual " << out.residual << " exceeds 1e-8";
        out.warnings.push_back(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Positions
// ---------------------------------------------------------------------------

PositionSolution integrate_position(const NaturalFrame& frame, const PositionBoundary& boundary) {
    const ParamGrid& g = boundary.phi.grid();
    require_same_grid(g, frame.grid(), "integrate_position");
    const NodeStates& st = boundary.states;
    std::size_t count = 0;
    auto col = number_unknowns(st, count);

    // Target gradient: phi_u = u + v = 2 Re u, phi_v = i (u - v) = -2 Im u.
    auto grad_u = [&](std::size_t i, std::size_t j) -> Vec3 { return (frame.u(i, j) + frame.v(i, j)).real(); };
    auto grad_v = [&](std::size_t i, std::size_t j) -> Vec3 {
        return (Complex(0.0, 1.0) * (frame.u(i, j) - frame.v(i, j))).real();
    };

    std::vector<std::pair<std::size_t, std::size_t>> eq_nodes;
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            if (st(i, j) == NodeState::unknown && g.margin(i, j) == 0) {
                throw InputError("integrate_position: unknown position on the grid edge " + node_name(i, j));
            }
            if (!touches_unknown(st, i, j, false)) continue;
            if (!frame.u.valid(i, j)) {
                throw InputError("integrate_position: frame undefined at equation node " + node_name(i, j));
            }
            for (auto [di, dj] : kCross)
                if (st(shifted(i, di), shifted(j, dj)) == NodeState::absent) {
                    throw InputError("integrate_position: boundary ring incomplete around node " + node_name(i, j));
                }
            eq_nodes.emplace_back(i, j);
        }

    Vec3Field phi = boundary.phi;
    phi.set_margin(0);
    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i)
            if (st(i, j) != NodeState::known) phi(i, j) = Vec3::Zero();

    PositionSolution out{SurfacePatch(phi), 0.0, 0.0, {}};
    if (count == 0) return out;

    const double inv_2h = 1.0 / (2.0 * g.h());
    std::vector<Triplet> trip;
    trip.reserve(eq_nodes.size() * 4);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(2 * eq_nodes.size()), 3);
    for (std::size_t e = 0; e < eq_nodes.size(); ++e) {
        auto [i, j] = eq_nodes[e];
        const Vec3 gu = grad_u(i, j);
        const Vec3 gv = grad_v(i, j);
        for (int axis = 0; axis < 2; ++axis) {
            const auto r = static_cast<Eigen::Index>(2 * e + axis);
            Vec3 target = axis == 0 ? gu : gv;
            std::size_t pi = axis == 0 ? i + 1 : i, pj = axis == 0 ? j : j + 1;
            std::size_t mi = axis == 0 ? i - 1 : i, mj = axis == 0 ? j : j - 1;
            for (auto [ni, nj, coef] : {std::tuple{pi, pj, inv_2h}, std::tuple{mi, mj, -inv_2h}}) {
                auto c = col[g.index(ni, nj)];
                if (c >= 0) {
                    trip.emplace_back(static_cast<int>(r), static_cast<int>(c), coef);
                } else {
                    target -= coef * boundary.phi(ni, nj);
                }
            }
            b.row(r) = target.transpose();
        }
    }
    SparseMatrix a(static_cast<Eigen::Index>(2 * eq_nodes.size()), static_cast<Eigen::Index>(count));
    a.setFromTriplets(trip.begin(), trip.end());
    double misfit = 0.0;
    Eigen::MatrixXd x = least_squares(a, b, "integrate_position", out.residual, misfit);

    for (std::size_t j = 0; j < g.nv(); ++j)
        for (std::size_t i = 0; i < g.nu(); ++i) {
            auto c = col[g.index(i, j)];
            if (c >= 0) phi(i, j) = x.row(c).transpose();
        }
    out.patch = SurfacePatch(std::move(phi));

    // Discrete curl of the target gradient over equation nodes whose
    // neighbours carry frame values, relative to the gradient size.
    double curl = 0.0, grad = 0.0;
    for (auto [i, j] : eq_nodes) {
        grad = std::max({grad, grad_u(i, j).norm(), grad_v(i, j).norm()});
        bool ok = true;
        for (auto [di, dj] : kCross) ok = ok && frame.u.valid(shifted(i, di), shifted(j, dj)) &&
                                          st(shifted(i, di), shifted(j, dj)) != NodeState::absent;
        if (!ok) continue;
        Vec3 dgu_dv = (grad_u(i, j + 1) - grad_u(i, j - 1)) * inv_2h;
        Vec3 dgv_du = (grad_v(i + 1, j) - grad_v(i - 1, j)) * inv_2h;
        curl = std::max(curl, (dgu_dv - dgv_du).norm());
    }
    out.curl = grad > 0.0 ? curl / grad : 0.0;
    if (out.curl > 1e-4) {
        std::ostringstream msg;
        msg << "integrate_position: integrability warning, relative discrete curl " << out.curl
            << "; least-squares positions returned";
        out.warnings.push_back(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

Reconstruction reconstruct_surface(const LambdaH& lh, const BoundaryData& bd) {
    require_same_grid(lh.lambda.grid(), lh.h_mean.grid(), "reconstruct_surface");
    require_same_grid(lh.lambda.grid(), bd.grid(), "reconstruct_surface");
    ComplexField rhs(lh.lambda.grid());
    try {
        rhs = codazzi_rhs(lh.lambda, lh.h_mean);
    } catch (const Error& e) {
        rethrow_tagged(e, "codazzi_rhs");
    }
    MuSolution mu{ComplexField(lh.lambda.grid()), 0.0};
    try {
        mu = solve_mu(rhs, bd.mu);
    } catch (const Error& e) {
        rethrow_tagged(e, "solve_mu");
    }
    std::optional<FrameSolution> frame;
    try {
        frame = solve_frame(lh.lambda, lh.h_mean, mu.mu, bd.frame);
    } catch (const Error& e) {
        rethrow_tagged(e, "solve_frame");
    }
    std::optional<PositionSolution> pos;
    try {
        pos = integrate_position(frame->frame, bd.position);
    } catch (const Error& e) {
        rethrow_tagged(e, "integrate_position");
    }
    Reconstruction out{std::move(pos->patch), std::move(mu.mu), std::move(frame->frame), frame->warnings};
    out.warnings.insert(out.warnings.end(), pos->warnings.begin(), pos->warnings.end());
    return out;
}

}  // namespace lh
