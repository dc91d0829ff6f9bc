// jacobi.hpp — curves of L-prederivatives for optimal-control second
// variations: per-interval discretization of the linearized weak maximum
// principle data (X_t, b_t), the pseudoinverse update step, the recursion
// with its flow property, dyadic refinement to the limit subspace, time
// variations and control projectors.

#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "maslov/maslov_index.hpp"

namespace maslov {

enum class QuadratureRule { midpoint, exact_pc };

/// Per-interval quadrature: the midpoint rule, composite over `subdivisions`
/// sub-intervals. With one subdivision it is exact for piecewise-constant
/// data aligned with the partition, which is what "exact_pc" asserts.
struct Quadrature {
    QuadratureRule rule = QuadratureRule::midpoint;
    int subdivisions = 1;
};

/// Time-dependent data of the linearized problem along an extremal:
/// x_map(t) is 2n x k (columns are the Hamiltonian-lift directions of the
/// controls), b_map(t) is the k x k symmetric control Hessian block, and the
/// optional projector_map(t) restricts to tangent directions of a control
/// constraint stratum.
struct JacobiProblem {
    int n = 0;
    int k = 0;
    double t1 = 0.0;
    std::function<Matrix(double)> x_map;
    std::function<Matrix(double)> b_map;
    std::function<Matrix(double)> projector_map;  // empty when unconstrained
    Quadrature quadrature;

    void validate_at(double t) const {
        Matrix x = x_map(t);
        if (x.rows() != 2 * n || x.cols() != k)
            throw std::invalid_argument("JacobiProblem: X(t) must be 2n x k");
        Matrix b = b_map(t);
        if (b.rows() != k || b.cols() != k)
            throw std::invalid_argument("JacobiProblem: b(t) must be k x k");
        if ((b - b.transpose()).norm() > 1e-10 * std::max(1.0, b.norm()))
            throw std::invalid_argument("JacobiProblem: b(t) must be symmetric");
        if (projector_map) {
            Matrix p = projector_map(t);
            const double scale = std::max(1.0, p.norm());
            if (p.rows() != k || p.cols() != k ||
                (p - p.transpose()).norm() > 1e-10 * scale ||
                (p * p - p).norm() > 1e-10 * scale)
                throw std::invalid_argument(
                    "JacobiProblem: P(t) must be a symmetric idempotent k x k");
        }
    }
};

/// Discretization of one interval shared by the recursion and the Hessian
/// oracle: Z = ∫ X dτ, the within-interval double integral
/// Gsigma(v, w) = ∫ sigma(∫ X v, X w) dτ, and B = ∫ b dτ.
struct IntervalData {
    double start = 0.0;
    double length = 0.0;
    Matrix z;        // 2n x k
    Matrix g_sigma;  // k x k (not symmetric)
    Matrix b_int;    // k x k symmetric
};

inline IntervalData discretize_interval(const JacobiProblem& problem, double start,
                                        double length) {
    const int sub = std::max(1, problem.quadrature.subdivisions);
    const double h = length / sub;
    IntervalData out;
    out.start = start;
    out.length = length;
    out.z = Matrix::Zero(2 * problem.n, problem.k);
    out.g_sigma = Matrix::Zero(problem.k, problem.k);
    out.b_int = Matrix::Zero(problem.k, problem.k);
    const auto space = standard_form(problem.n);
    for (int j = 0; j < sub; ++j) {
        const double mid = start + (j + 0.5) * h;
        Matrix x = problem.x_map(mid);
        Matrix b = problem.b_map(mid);
        if (problem.projector_map) {
            Matrix p = problem.projector_map(mid);
            x = x * p;
            b = p * b * p;
        }
        // cumulative-part cross term plus the exact in-cell double integral
        out.g_sigma += out.z.transpose() * space.omega * x * h +
                       0.5 * h * h * x.transpose() * space.omega * x;
        out.z += h * x;
        out.b_int += h * symmetrize(b);
    }
    return out;
}

inline std::vector<IntervalData> discretize(const JacobiProblem& problem,
                                            const std::vector<double>& partition) {
    if (partition.size() < 2 || partition.front() != 0.0)
        throw std::invalid_argument("discretize: partition must start at 0");
    std::vector<IntervalData> out;
    out.reserve(partition.size() - 1);
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        if (!(partition[i + 1] > partition[i]))
            throw std::invalid_argument("discretize: partition must increase");
        out.push_back(
            discretize_interval(problem, partition[i], partition[i + 1] - partition[i]));
    }
    return out;
}

inline std::vector<double> uniform_partition(double t1, int intervals) {
    if (intervals < 1) throw std::invalid_argument("uniform_partition: need >= 1");
    std::vector<double> nodes(intervals + 1);
    for (int i = 0; i <= intervals; ++i) nodes[i] = t1 * double(i) / intervals;
    nodes.back() = t1;
    return nodes;
}

struct StepDegeneracyError : std::runtime_error {
    int interval_index = -1;
    double isotropy_defect = 0.0;
    int rank = 0;
    StepDegeneracyError(const std::string& message, double defect, int rank_found)
        : std::runtime_error(message), isotropy_defect(defect), rank(rank_found) {}
};

struct StepDiagnostics {
    int eperp_dim = 0;
    Matrix a;      // pairing of the current frame with the averaged lift
    Matrix qform;  // effective control form on the active directions
};

namespace detail {

// diag(I, -I): the recursion runs on the sign-flipped data so that the
// emitted curve is the increasing-oriented multiplier curve (positive
// semidefinite b yields monotone increasing frames).
inline Matrix flip_matrix(int n) {
    Matrix d = Matrix::Identity(2 * n, 2 * n);
    d.bottomRightCorner(n, n) *= -1.0;
    return d;
}

struct StepSystem {
    Matrix a_full;   // n x k: sigma(frame_i, Zbar e_j), flipped data
    Matrix q_full;   // k x k: averaged control form, flipped data
    Matrix z_int;    // 2n x k: integrated flipped lift
};

inline StepSystem step_system(const LagrangianFrame& frame, const IntervalData& cell) {
    const int n = frame.n();
    StepSystem sys;
    Matrix d = flip_matrix(n);
    sys.z_int = d * cell.z;
    Matrix zbar = sys.z_int / cell.length;
    sys.a_full = frame.basis.transpose() * frame.space.omega * zbar;
    // sigma(D a, D b) = -sigma(a, b), so the flipped form is the negated one
    sys.q_full = -(cell.g_sigma + cell.b_int) / cell.length;
    return sys;
}

// Solution basis of  A_full^T c + Q_full^T v = 0  over (c, v), stacked.
inline Matrix step_solution_space(const StepSystem& sys) {
    const int n = int(sys.a_full.rows());
    const int k = int(sys.a_full.cols());
    Matrix stacked(k, n + k);
    stacked << sys.a_full.transpose(), sys.q_full.transpose();
    return nullspace(stacked);  // (n + k) x d
}

}  // namespace detail

/// One update of the Appendix construction over [start, start+length]:
/// (a) split the controls into E (directions invisible to the frame through
///     the averaged lift) and its orthogonal complement,
/// (b) form the pairing A and the control form Qform on the complement,
/// (c) keep ker A inside the frame and adjoin eta_j + (∫X)v_j with
///     eta_j = -A^+ Qform e_j.
/// The kept-plus-adjoined span equals the stationarity solution set; the
/// output is orthonormalized and asserted Lagrangian. An optional SPD metric
/// on the controls fixes the orthogonal complement; the output subspace does
/// not depend on it.
inline LagrangianFrame step_prederivative(const LagrangianFrame& frame,
                                          const JacobiProblem& problem, double start,
                                          double length, double tol = 1e-8,
                                          const Matrix& control_metric = Matrix(),
                                          StepDiagnostics* diagnostics = nullptr) {
    if (!(length > 0)) throw std::invalid_argument("step_prederivative: length <= 0");
    const IntervalData cell = discretize_interval(problem, start, length);
    const auto sys = detail::step_system(frame, cell);
    const int n = frame.n();
    const int k = problem.k;

    // (a) E = ker A_full in the chosen Euclidean structure; E-perp spans the
    // active directions. With a metric M, "orthogonal" means M-orthogonal.
    Matrix metric = control_metric.size() ? control_metric : Matrix::Identity(k, k);
    Matrix e_space = nullspace(sys.a_full);
    Matrix eperp;
    if (e_space.cols() == 0) {
        eperp = Matrix::Identity(k, k);
    } else if (e_space.cols() == k) {
        eperp = Matrix(k, 0);
    } else {
        eperp = nullspace(Matrix(e_space.transpose() * metric));
    }
    const int e = int(eperp.cols());

    // (b) the pairing and the effective control form on E-perp; slack
    // directions in E couple through Q_full and are eliminated exactly.
    Matrix a = sys.a_full * eperp;  // n x e
    // rows of the stationarity system in E-perp / E directions
    Matrix q_t_pp = eperp.transpose() * sys.q_full.transpose() * eperp;  // e x e
    Matrix slack = Matrix::Zero(k, e);
    if (e_space.cols() > 0 && e > 0) {
        Matrix q_t_ep = e_space.transpose() * sys.q_full.transpose() * eperp;
        Matrix q_t_ee = e_space.transpose() * sys.q_full.transpose() * e_space;
        // the EE block is eliminated against the scale of the whole control
        // form: a roundoff-level block must act as zero, never be inverted
        const double scale = std::max(1e-300, double(sys.q_full.norm()));
        Eigen::JacobiSVD<Matrix> svd(q_t_ee,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
        Vector inv = Vector::Zero(svd.singularValues().size());
        for (Eigen::Index i = 0; i < inv.size(); ++i)
            if (svd.singularValues()(i) > kRankTol * scale)
                inv(i) = 1.0 / svd.singularValues()(i);
        Matrix ee_pinv =
            svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
        Matrix s_coeff = -ee_pinv * q_t_ep;  // E-coords per active direction
        slack = e_space * s_coeff;           // k x e
        q_t_pp += eperp.transpose() * sys.q_full.transpose() * e_space * s_coeff;
    }
    if (diagnostics) {
        diagnostics->eperp_dim = e;
        diagnostics->a = a;
        diagnostics->qform = q_t_pp.transpose();
    }

    // (c) kept directions and the adjoined generators.
    Matrix keep_coords = (e == 0) ? Matrix(Matrix::Identity(n, n))
                                  : nullspace(Matrix(a.transpose()));
    Matrix generators(2 * n, keep_coords.cols() + e);
    generators.leftCols(keep_coords.cols()) = frame.basis * keep_coords;
    if (e > 0) {
        Matrix eta_coords = -pinv(Matrix(a.transpose())) * q_t_pp;  // n x e
        Matrix controls = eperp + slack;                            // k x e
        generators.rightCols(e) = frame.basis * eta_coords + sys.z_int * controls;
    }

    Matrix basis = orthonormalize(generators);
    const double scale = std::max(1.0, basis.norm());
    const double defect =
        basis.cols() ? (basis.transpose() * frame.space.omega * basis).norm() : 0.0;
    if (int(basis.cols()) != n || defect > tol * scale) {
        std::ostringstream msg;
        msg << "step_prederivative: degenerate output (rank " << basis.cols()
            << ", isotropy defect " << defect << ")";
        throw StepDegeneracyError(msg.str(), defect, int(basis.cols()));
    }
    return LagrangianFrame(frame.space, basis);
}

/// Independent route to the same subspace: the raw nullspace of the stacked
/// stationarity system, bypassing the E-split and the pseudoinverse.
inline LagrangianFrame step_prederivative_direct(const LagrangianFrame& frame,
                                                 const JacobiProblem& problem,
                                                 double start, double length) {
    const IntervalData cell = discretize_interval(problem, start, length);
    const auto sys = detail::step_system(frame, cell);
    Matrix solutions = detail::step_solution_space(sys);
    const int n = frame.n();
    Matrix generators = frame.basis * solutions.topRows(n) +
                        sys.z_int * solutions.bottomRows(problem.k);
    return LagrangianFrame(frame.space, orthonormalize(generators));
}

/// Curve of L-prederivatives over a partition of [0, t1].
struct LCurve {
    std::vector<double> partition;
    std::vector<LagrangianFrame> frames;  // frames[0] is the vertical
    std::vector<StepDiagnostics> caps;

    DiscreteLagrangianCurve as_discrete() const {
        return DiscreteLagrangianCurve{partition, frames};
    }
};

/// Inductive recursion starting from the vertical: frames[i+1] is the step
/// update of frames[i] over the i-th interval. Deterministic.
inline LCurve run_recursion(const JacobiProblem& problem,
                            const std::vector<double>& partition) {
    problem.validate_at(0.5 * problem.t1);
    LCurve curve;
    curve.partition = partition;
    const auto space = standard_form(problem.n);
    curve.frames.push_back(vertical_frame(space));
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        StepDiagnostics diag;
        try {
            curve.frames.push_back(step_prederivative(
                curve.frames.back(), problem, partition[i],
                partition[i + 1] - partition[i], 1e-8, Matrix(), &diag));
        } catch (const StepDegeneracyError& err) {
            std::ostringstream msg;
            msg << err.what() << " at interval " << i;
            StepDegeneracyError wrapped(msg.str(), err.isotropy_defect, err.rank);
            wrapped.interval_index = int(i);
            throw wrapped;
        }
        curve.caps.push_back(diag);
    }
    return curve;
}

/// Restart the recursion from a known frame over [start, ...]; used by the
/// flow-property check.
inline LagrangianFrame continue_recursion(const JacobiProblem& problem,
                                          LagrangianFrame frame,
                                          const std::vector<double>& nodes) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        frame = step_prederivative(frame, problem, nodes[i], nodes[i + 1] - nodes[i]);
    return frame;
}

/// Distance at s2 between (i) the single recursion over the [0, s2] partition
/// and (ii) the recursion over the clip of that partition to [0, s1]
/// restarted with variations supported on [s1, s2] only. Exact zero when the
/// two quantize the same grid; tends to zero under joint refinement.
inline double flow_property_defect(const JacobiProblem& problem, double s1, double s2,
                                   const std::vector<double>& partition_full,
                                   const std::vector<double>& partition_tail) {
    if (!(0 < s1 && s1 < s2 && s2 <= problem.t1))
        throw std::invalid_argument("flow_property_defect: need 0 < s1 < s2 <= t1");
    LagrangianFrame direct =
        run_recursion(problem, partition_full).frames.back();

    std::vector<double> head;
    for (double t : partition_full)
        if (t < s1 - 1e-15) head.push_back(t);
    head.push_back(s1);
    LagrangianFrame at_s1 = run_recursion(problem, head).frames.back();

    std::vector<double> tail = partition_tail;
    if (tail.empty() || std::abs(tail.front() - s1) > 1e-12 ||
        std::abs(tail.back() - s2) > 1e-12)
        throw std::invalid_argument("flow_property_defect: tail must span [s1, s2]");
    LagrangianFrame restarted = continue_recursion(problem, at_s1, tail);
    return grassmannian_distance(direct, restarted);
}

struct RefinementResult {
    LagrangianFrame frame;
    std::vector<double> distances;  // successive t1-frame gaps per doubling
    std::vector<int> interval_counts;
    bool converged = false;
};

/// Dyadically refine uniform partitions N0 * 2^d until the t1-frames are
/// Cauchy below tol or max_depth is exhausted.
inline RefinementResult refine_to_limit(const JacobiProblem& problem, double tol,
                                        int max_depth, int n0 = 8) {
    RefinementResult out{vertical_frame(standard_form(problem.n)), {}, {}, false};
    LagrangianFrame previous = out.frame;
    for (int depth = 0; depth <= max_depth; ++depth) {
        const int intervals = n0 << depth;
        LagrangianFrame current =
            run_recursion(problem, uniform_partition(problem.t1, intervals))
                .frames.back();
        out.interval_counts.push_back(intervals);
        if (depth > 0) {
            out.distances.push_back(grassmannian_distance(previous, current));
            if (out.distances.back() < tol) {
                out.frame = current;
                out.converged = true;
                return out;
            }
        }
        previous = current;
        out.frame = current;
    }
    return out;  // converged stays false; distances carry the history
}

/// Append the time-variation control: its lift is f_along + X udot and the
/// control Hessian acquires the border of b under v -> v + udot * gamma.
/// For C^2 extremal data the added column changes no index.
inline JacobiProblem time_variation_augment(
    const JacobiProblem& problem, std::function<Vector(double)> udot,
    std::function<Vector(double)> f_along) {
    JacobiProblem out = problem;
    out.k = problem.k + 1;
    out.x_map = [problem, udot, f_along](double t) {
        Matrix x = problem.x_map(t);
        Matrix aug(2 * problem.n, problem.k + 1);
        aug.leftCols(problem.k) = x;
        aug.col(problem.k) = f_along(t) + x * udot(t);
        return aug;
    };
    out.b_map = [problem, udot](double t) {
        Matrix b = problem.b_map(t);
        Vector d = udot(t);
        Matrix aug(problem.k + 1, problem.k + 1);
        aug.topLeftCorner(problem.k, problem.k) = b;
        aug.topRightCorner(problem.k, 1) = b * d;
        aug.bottomLeftCorner(1, problem.k) = (b * d).transpose();
        aug(problem.k, problem.k) = d.dot(b * d);
        return aug;
    };
    if (problem.projector_map) {
        out.projector_map = [problem](double t) {
            Matrix p = problem.projector_map(t);
            Matrix aug = Matrix::Zero(problem.k + 1, problem.k + 1);
            aug.topLeftCorner(problem.k, problem.k) = p;
            aug(problem.k, problem.k) = 1.0;
            return aug;
        };
    }
    return out;
}

/// Compose the control constraint projectors into the data: X -> X P and
/// b -> P b P; downstream operations are unchanged.
inline JacobiProblem apply_projectors(const JacobiProblem& problem) {
    if (!problem.projector_map)
        throw std::invalid_argument("apply_projectors: no projector present");
    for (double t : {0.0, 0.37 * problem.t1, problem.t1}) problem.validate_at(t);
    JacobiProblem out = problem;
    out.x_map = [problem](double t) {
        return Matrix(problem.x_map(t) * problem.projector_map(t));
    };
    out.b_map = [problem](double t) {
        Matrix p = problem.projector_map(t);
        return Matrix(p * problem.b_map(t) * p);
    };
    out.projector_map = nullptr;
    return out;
}

}  // namespace maslov
