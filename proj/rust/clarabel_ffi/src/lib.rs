// C bridge to the Clarabel interior-point conic solver.
//
// Problem form: minimize q'x subject to A x + s = b, s in K, where K is a
// product of zero, nonnegative, second-order, and exponential cones given
// in row order of A.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

pub const CONE_ZERO: i32 = 0;
pub const CONE_NONNEG: i32 = 1;
pub const CONE_SOC: i32 = 2;
pub const CONE_EXP: i32 = 3;

pub const STATUS_OPTIMAL: i32 = 0;
pub const STATUS_PRIMAL_INFEASIBLE: i32 = 1;
pub const STATUS_DUAL_INFEASIBLE: i32 = 2;
pub const STATUS_NUMERICAL_LIMIT: i32 = 3;
pub const STATUS_BAD_PROBLEM: i32 = -1;

/// Solves one conic program. Matrix `a` is in compressed sparse column
/// format with dimensions `m` x `n`. `cone_tags`/`cone_dims` describe the
/// cone blocks covering the `m` rows in order (exponential blocks must
/// have dimension 3).
///
/// On return fills `x_out` (length `n`), the objective value, iteration
/// count, and the worst primal/dual residual reported by the solver.
/// Primal values are written for optimal and numerical-limit statuses.
///
/// # Safety
/// All pointers must reference buffers of the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn clarabel_ffi_solve(
    n: usize,
    q: *const f64,
    m: usize,
    nnz: usize,
    colptr: *const usize,
    rowval: *const usize,
    nzval: *const f64,
    b: *const f64,
    n_cones: usize,
    cone_tags: *const i32,
    cone_dims: *const usize,
    tol: f64,
    max_iter: u32,
    verbose: i32,
    x_out: *mut f64,
    obj_out: *mut f64,
    iters_out: *mut u32,
    residual_out: *mut f64,
) -> i32 {
    let q = std::slice::from_raw_parts(q, n);
    let colptr = std::slice::from_raw_parts(colptr, n + 1);
    let rowval = std::slice::from_raw_parts(rowval, nnz);
    let nzval = std::slice::from_raw_parts(nzval, nnz);
    let b = std::slice::from_raw_parts(b, m);
    let tags = std::slice::from_raw_parts(cone_tags, n_cones);
    let dims = std::slice::from_raw_parts(cone_dims, n_cones);

    let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(n_cones);
    let mut rows = 0usize;
    for (tag, dim) in tags.iter().zip(dims.iter()) {
        rows += dim;
        match *tag {
            CONE_ZERO => cones.push(SupportedConeT::ZeroConeT(*dim)),
            CONE_NONNEG => cones.push(SupportedConeT::NonnegativeConeT(*dim)),
            CONE_SOC => cones.push(SupportedConeT::SecondOrderConeT(*dim)),
            CONE_EXP => {
                if *dim != 3 {
                    return STATUS_BAD_PROBLEM;
                }
                cones.push(SupportedConeT::ExponentialConeT());
            }
            _ => return STATUS_BAD_PROBLEM,
        }
    }
    if rows != m {
        return STATUS_BAD_PROBLEM;
    }

    let p = CscMatrix::<f64>::zeros((n, n));
    let a = CscMatrix::new(m, n, colptr.to_vec(), rowval.to_vec(), nzval.to_vec());

    let settings = DefaultSettings {
        verbose: verbose != 0,
        max_iter,
        tol_gap_abs: tol,
        tol_gap_rel: tol,
        tol_feas: tol,
        ..DefaultSettings::default()
    };

    let Ok(mut solver) = DefaultSolver::new(&p, q, &a, b, &cones, settings) else {
        return STATUS_BAD_PROBLEM;
    };
    solver.solve();

    let sol = &solver.solution;
    let info = &solver.info;
    *obj_out = sol.obj_val;
    *iters_out = info.iterations;
    *residual_out = info.res_primal.max(info.res_dual);

    let write_x = |dst: *mut f64| {
        let out = std::slice::from_raw_parts_mut(dst, n);
        out.copy_from_slice(&sol.x);
    };

    match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {
            write_x(x_out);
            STATUS_OPTIMAL
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            STATUS_PRIMAL_INFEASIBLE
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            STATUS_DUAL_INFEASIBLE
        }
        _ => {
            write_x(x_out);
            STATUS_NUMERICAL_LIMIT
        }
    }
}
