//! Inner approximation of the PSD cone as the Minkowski sum
//! `sum_k F_k [S^{s_k}_+] F_k^T` over a frame set, and Frobenius projection
//! onto it.
//!
//! The projection solver is exact cyclic block coordinate descent: because
//! every frame has orthonormal columns, `||F_k Y F_k^T - R||_F^2` equals
//! `||Y - F_k^T R F_k||_F^2` up to a constant, so each block subproblem is
//! an s x s eigenvalue clip in closed form. An independent Dykstra oracle on
//! the polar intersection cross-validates the solver.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, FrameSet};
use crate::symmat::{symmetrize, SymMatrix};

/// A conic sum of sub-cones spanned by a nonempty frame set; sub-dimensions
/// may vary across frames.
#[derive(Debug, Clone)]
pub struct ConeSum {
    frames: FrameSet,
}

impl ConeSum {
    pub fn new(frames: FrameSet) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidArgument(
                "a cone sum needs at least one frame".into(),
            ));
        }
        Ok(Self { frames })
    }

    pub fn ambient_dim(&self) -> usize {
        self.frames.ambient_dim().expect("nonempty frame set")
    }

    pub fn frames(&self) -> &[Frame] {
        self.frames.frames()
    }

    pub fn frame_set(&self) -> &FrameSet {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Result of projecting a target onto a cone sum.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// The projected matrix `X = sum_k F_k Y_k F_k^T`.
    pub matrix: SymMatrix,
    /// Per-frame PSD certificates `Y_k`.
    pub witnesses: Vec<DMatrix<f64>>,
    /// `||X - A||_F`.
    pub error: f64,
    /// Stationarity + complementarity residual of the KKT system.
    pub kkt_residual: f64,
    /// Sweeps used.
    pub iterations: usize,
    pub converged: bool,
}

fn check_ambient(a: &SymMatrix, cone: &ConeSum) -> Result<()> {
    if a.dim() != cone.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "target has dimension {}, cone sum lives in dimension {}",
            a.dim(),
            cone.ambient_dim()
        )));
    }
    Ok(())
}

/// Projects an s x s symmetric matrix onto the PSD cone (eigenvalue clip).
fn psd_clip(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(SymMatrix::from_dense(m.clone())?
        .psd_project()?
        .into_matrix())
}

/// Euclidean projection onto the single sub-cone `F [S^s_+] F^T`:
/// `F psd_project(F^T Z F) F^T`.
pub fn project_onto_subcone(z: &SymMatrix, frame: &Frame) -> Result<SymMatrix> {
    if z.dim() != frame.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} does not match frame ambient {}",
            z.dim(),
            frame.ambient_dim()
        )));
    }
    let compressed = frame.compress(z.as_matrix());
    SymMatrix::from_dense(frame.expand(&psd_clip(&compressed)?))
}

/// KKT residual of `min ||X - A|| over {Y_k >= 0}`: for each k the gradient
/// `G_k = F_k^T (X - A) F_k` must be PSD with `<Y_k, G_k> = 0`; the residual
/// is the worst stationarity violation `max(0, -lambda_min(G_k))` or
/// normalized complementarity gap across blocks.
fn kkt_residual(
    a: &SymMatrix,
    frames: &[Frame],
    witnesses: &[DMatrix<f64>],
    x: &DMatrix<f64>,
) -> Result<f64> {
    let mut kkt = 0.0_f64;
    for (frame, w) in frames.iter().zip(witnesses) {
        let grad = frame.compress(&(x - a.as_matrix()));
        let min_eig = SymMatrix::from_dense(grad.clone())?.min_eigenvalue()?;
        let stationarity = (-min_eig).max(0.0);
        let complementarity = grad.dot(w).abs() / w.norm().max(1.0);
        kkt = kkt.max(stationarity).max(complementarity);
    }
    Ok(kkt)
}

/// Frobenius projection of `a` onto the cone sum by exact cyclic block
/// coordinate descent from `Y_k = 0`. Convergence requires both the
/// per-sweep iterate change <= `tol` and the KKT residual <= `10 tol` (the
/// step-size criterion alone does not bound the residual when descent is
/// slow); `max_iter` sweeps cap the run. The objective is non-increasing
/// across sweeps; non-convergence is reported through the `converged` flag,
/// not an error.
pub fn project_onto_cone_sum(
    a: &SymMatrix,
    cone: &ConeSum,
    tol: f64,
    max_iter: usize,
) -> Result<ProjectionResult> {
    check_ambient(a, cone)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = a.dim();
    let frames = cone.frames();
    let mut witnesses: Vec<DMatrix<f64>> = frames
        .iter()
        .map(|f| DMatrix::zeros(f.sub_dim(), f.sub_dim()))
        .collect();
    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut converged = false;
    let mut iterations = 0;
    let mut prev_objective = f64::INFINITY;

    for sweep in 1..=max_iter {
        iterations = sweep;
        let x_before = x.clone();
        for (k, frame) in frames.iter().enumerate() {
            // residual seen by block k: A - sum_{j != k} F_j Y_j F_j^T
            let residual = a.as_matrix() - &x + frame.expand(&witnesses[k]);
            let updated = psd_clip(&frame.compress(&residual))?;
            x += frame.expand(&updated) - frame.expand(&witnesses[k]);
            witnesses[k] = updated;
        }
        x = symmetrize(&x);
        let objective = (a.as_matrix() - &x).norm();
        debug_assert!(
            objective <= prev_objective + 1e-9 * prev_objective.max(1.0),
            "objective increased across a sweep: {prev_objective} -> {objective}"
        );
        prev_objective = objective;
        if (&x - x_before).norm() <= tol && kkt_residual(a, frames, &witnesses, &x)? <= 10.0 * tol
        {
            converged = true;
            break;
        }
    }

    // rebuild X exactly from the witnesses to remove incremental drift
    let mut exact = DMatrix::<f64>::zeros(n, n);
    for (frame, w) in frames.iter().zip(&witnesses) {
        exact += frame.expand(w);
    }
    let matrix = SymMatrix::from_dense(exact)?;
    let error = (a.as_matrix() - matrix.as_matrix()).norm();
    let kkt = kkt_residual(a, frames, &witnesses, matrix.as_matrix())?;

    Ok(ProjectionResult {
        matrix,
        witnesses,
        error,
        kkt_residual: kkt,
        iterations,
        converged,
    })
}

/// Independent projection oracle via the Moreau decomposition: the polar of
/// the Minkowski sum is the intersection of the polars
/// `C_k^o = { Z : F_k^T Z F_k <= 0 }`, each of which projects in closed form
/// as `Z - F_k psd_project(F_k^T Z F_k) F_k^T`. Dykstra's cyclic algorithm
/// on this intersection yields the polar projection, and the result is
/// `A - proj_polar(A)`. Shares no solver state with the BCD path.
pub fn project_oracle(
    a: &SymMatrix,
    cone: &ConeSum,
    tol: f64,
    max_iter: usize,
) -> Result<SymMatrix> {
    check_ambient(a, cone)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = a.dim();
    let frames = cone.frames();
    let mut iterate = a.as_matrix().clone();
    let mut corrections: Vec<DMatrix<f64>> = frames.iter().map(|_| DMatrix::zeros(n, n)).collect();

    for _ in 0..max_iter {
        let before = iterate.clone();
        for (k, frame) in frames.iter().enumerate() {
            let shifted = &iterate + &corrections[k];
            let clipped = psd_clip(&frame.compress(&shifted))?;
            let projected = &shifted - frame.expand(&clipped);
            corrections[k] = &shifted - &projected;
            iterate = projected;
        }
        if (&iterate - before).norm() <= tol {
            break;
        }
    }
    SymMatrix::from_dense(a.as_matrix() - iterate)
}

/// Tests membership of `a` in the cone sum: projects and compares the
/// projection error against `tol`. Returns the flag and the distance.
pub fn membership(a: &SymMatrix, cone: &ConeSum, tol: f64) -> Result<(bool, f64)> {
    let solver_tol = (tol * 1e-2).clamp(1e-12, 1e-9);
    let result = project_onto_cone_sum(a, cone, solver_tol, 20_000)?;
    Ok((result.error <= tol, result.error))
}

/// One diagonal block of a restricted semidefinite program.
#[derive(Debug, Serialize, Deserialize)]
pub struct SdpBlock {
    pub s: usize,
    /// Frame columns, column-major.
    pub frame: Vec<f64>,
    /// `F^T C F`, row-major rows.
    pub objective: Vec<Vec<f64>>,
    /// One `F^T A_i F` per constraint, row-major rows.
    pub constraints: Vec<Vec<Vec<f64>>>,
}

/// A block-diagonal conic program over `{Y_k >= 0}` produced by substituting
/// `X = sum_k F_k Y_k F_k^T` into an SDP's objective and constraints. The
/// document is self-describing and meant for consumption by external conic
/// solvers; nothing is solved here.
#[derive(Debug, Serialize, Deserialize)]
pub struct RestrictedSdp {
    pub n: usize,
    pub blocks: Vec<SdpBlock>,
    pub rhs: Vec<f64>,
    pub sense: String,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Rewrites `min <C, X> s.t. <A_i, X> = b_i, X in cone sum` into block form
/// with coefficient blocks `F_k^T C F_k` and `F_k^T A_i F_k`.
pub fn export_restricted_sdp(
    objective: &SymMatrix,
    constraints: &[(SymMatrix, f64)],
    cone: &ConeSum,
) -> Result<RestrictedSdp> {
    check_ambient(objective, cone)?;
    for (a_i, _) in constraints {
        check_ambient(a_i, cone)?;
    }
    let blocks = cone
        .frames()
        .iter()
        .map(|frame| SdpBlock {
            s: frame.sub_dim(),
            frame: frame.columns().as_slice().to_vec(),
            objective: rows_of(&frame.compress(objective.as_matrix())),
            constraints: constraints
                .iter()
                .map(|(a_i, _)| rows_of(&frame.compress(a_i.as_matrix())))
                .collect(),
        })
        .collect();
    Ok(RestrictedSdp {
        n: objective.dim(),
        blocks,
        rhs: constraints.iter().map(|(_, b)| *b).collect(),
        sense: "min".into(),
    })
}

impl RestrictedSdp {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sdp serialization")
    }

    /// Parses and validates a restricted-SDP document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: RestrictedSdp = serde_json::from_str(text)?;
        if doc.n == 0 {
            return Err(Error::Parse("ambient dimension must be >= 1".into()));
        }
        if doc.sense != "min" && doc.sense != "max" {
            return Err(Error::Parse(format!("unknown sense {:?}", doc.sense)));
        }
        if doc.blocks.is_empty() {
            return Err(Error::Parse("document has no blocks".into()));
        }
        for (k, block) in doc.blocks.iter().enumerate() {
            if block.s == 0 || block.s > doc.n {
                return Err(Error::Parse(format!(
                    "block {k} has sub-dimension {} outside [1, {}]",
                    block.s, doc.n
                )));
            }
            if block.frame.len() != doc.n * block.s {
                return Err(Error::Parse(format!(
                    "block {k} frame data length {} does not match {}x{}",
                    block.frame.len(),
                    doc.n,
                    block.s
                )));
            }
            if !block.frame.iter().all(|v| v.is_finite()) {
                return Err(Error::Parse(format!("block {k} frame has non-finite entries")));
            }
            let square = |rows: &Vec<Vec<f64>>, what: &str| -> Result<()> {
                if rows.len() != block.s || rows.iter().any(|r| r.len() != block.s) {
                    return Err(Error::Parse(format!(
                        "block {k} {what} is not {s}x{s}",
                        s = block.s
                    )));
                }
                if !rows.iter().flatten().all(|v| v.is_finite()) {
                    return Err(Error::Parse(format!(
                        "block {k} {what} has non-finite entries"
                    )));
                }
                Ok(())
            };
            square(&block.objective, "objective")?;
            if block.constraints.len() != doc.rhs.len() {
                return Err(Error::Parse(format!(
                    "block {k} carries {} constraint blocks but rhs has {}",
                    block.constraints.len(),
                    doc.rhs.len()
                )));
            }
            for c in &block.constraints {
                square(c, "constraint")?;
            }
        }
        if !doc.rhs.iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("rhs has non-finite entries".into()));
        }
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Provenance;
    use crate::symmat::{frob_dist, random_psd_normalized};

    fn cone_of(frames: Vec<Frame>) -> ConeSum {
        ConeSum::new(FrameSet::new(frames, Provenance::new("test", String::new(), None)).unwrap())
            .unwrap()
    }

    fn e(n: usize, i: usize) -> Frame {
        Frame::standard_basis(n, &[i]).unwrap()
    }

    #[test]
    fn subcone_projection_examples() {
        // member is a fixed point
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let z = SymMatrix::from_dense(f.expand(&y)).unwrap();
        let p = project_onto_subcone(&z, &f).unwrap();
        assert!(frob_dist(&p, &z).unwrap() < 1e-12);

        // negative compressed part clips to zero
        let neg = SymMatrix::from_diagonal(&[-1.0, 5.0]);
        let p = project_onto_subcone(&neg, &e(2, 0)).unwrap();
        assert!(p.frob_norm() < 1e-12);

        // F = e1, Z = [[2,1],[1,0]]: F^T Z F = 2, expands to diag(2, 0)
        let z = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = project_onto_subcone(&z, &e(2, 0)).unwrap();
        assert!(frob_dist(&p, &SymMatrix::from_diagonal(&[2.0, 0.0])).unwrap() < 1e-12);

        // idempotent
        let q = project_onto_subcone(&p, &e(2, 0)).unwrap();
        assert!(frob_dist(&p, &q).unwrap() < 1e-12);
    }

    #[test]
    fn full_cone_recovers_psd_projection() {
        let n = 4;
        let full = cone_of(vec![Frame::standard_basis(n, &[0, 1, 2, 3]).unwrap()]);
        let a = SymMatrix::from_diagonal(&[1.0, -2.0, 3.0, -4.0]);
        let result = project_onto_cone_sum(&a, &full, 1e-10, 50).unwrap();
        let direct = a.psd_project().unwrap();
        assert!(frob_dist(&result.matrix, &direct).unwrap() <= 1e-10);
        let expect = frob_dist(&a, &direct).unwrap();
        assert!((result.error - expect).abs() <= 1e-10);
        assert!(result.converged);
    }

    #[test]
    fn diagonal_cone_zeroes_offdiagonal() {
        let a = SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let cone = cone_of(vec![e(2, 0), e(2, 1)]);
        let result = project_onto_cone_sum(&a, &cone, 1e-12, 200).unwrap();
        assert!(frob_dist(&result.matrix, &SymMatrix::from_diagonal(&[0.5, 0.5])).unwrap() < 1e-9);
        assert!((result.error - 0.5_f64.sqrt() ).abs() < 1e-9);
        assert!(result.kkt_residual <= 1e-9);
    }

    #[test]
    fn witnesses_reconstruct_the_projection() {
        let a = random_psd_normalized(5, 21);
        let frames = vec![
            Frame::standard_basis(5, &[0, 1]).unwrap(),
            Frame::standard_basis(5, &[1, 2]).unwrap(),
            Frame::standard_basis(5, &[3, 4]).unwrap(),
        ];
        let cone = cone_of(frames.clone());
        let result = project_onto_cone_sum(&a, &cone, 1e-9, 5_000).unwrap();
        let mut acc = DMatrix::<f64>::zeros(5, 5);
        for (f, w) in frames.iter().zip(&result.witnesses) {
            let min_eig = SymMatrix::from_dense(w.clone()).unwrap().min_eigenvalue().unwrap();
            assert!(min_eig >= -1e-9);
            acc += f.expand(w);
        }
        assert!((acc - result.matrix.as_matrix()).norm() <= 1e-8);
    }

    #[test]
    fn oracle_matches_single_subcone() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let cone = cone_of(vec![f.clone()]);
        let a = SymMatrix::from_rows(&[
            vec![1.0, 0.3, -0.2],
            vec![0.3, -0.5, 0.1],
            vec![-0.2, 0.1, 2.0],
        ])
        .unwrap();
        let via_oracle = project_oracle(&a, &cone, 1e-12, 10_000).unwrap();
        let direct = project_onto_subcone(&a, &f).unwrap();
        assert!(frob_dist(&via_oracle, &direct).unwrap() <= 1e-8);
    }

    #[test]
    fn oracle_matches_diagonal_example() {
        let a = SymMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let cone = cone_of(vec![e(2, 0), e(2, 1)]);
        let p = project_oracle(&a, &cone, 1e-12, 10_000).unwrap();
        assert!(frob_dist(&p, &SymMatrix::from_diagonal(&[0.5, 0.5])).unwrap() <= 1e-8);
    }

    #[test]
    fn membership_examples() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let cone = cone_of(vec![f.clone()]);
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let member = SymMatrix::from_dense(f.expand(&y)).unwrap();
        let (ok, dist) = membership(&member, &cone, 1e-8).unwrap();
        assert!(ok, "distance {dist}");

        let neg = SymMatrix::identity(3).scale(-1.0);
        let (ok, dist) = membership(&neg, &cone, 1e-6).unwrap();
        assert!(!ok);
        assert!((dist - 3.0_f64.sqrt()).abs() < 1e-8, "projection of -I is 0");
    }

    #[test]
    fn export_full_frame_keeps_data() {
        let n = 3;
        let c = random_psd_normalized(n, 5);
        let a1 = SymMatrix::identity(n);
        let cone = cone_of(vec![Frame::standard_basis(n, &[0, 1, 2]).unwrap()]);
        let doc = export_restricted_sdp(&c, &[(a1.clone(), 1.0)], &cone).unwrap();
        assert_eq!(doc.blocks.len(), 1);
        assert_eq!(doc.rhs, vec![1.0]);
        for i in 0..n {
            for j in 0..n {
                assert!((doc.blocks[0].objective[i][j] - c.entry(i, j)).abs() < 1e-12);
                assert!((doc.blocks[0].constraints[0][i][j] - a1.entry(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn export_scalar_block() {
        let cone = cone_of(vec![e(2, 0)]);
        let doc = export_restricted_sdp(&SymMatrix::identity(2), &[], &cone).unwrap();
        assert_eq!(doc.blocks[0].objective, vec![vec![1.0]]);
        assert!(doc.rhs.is_empty());
        assert!(doc.blocks[0].constraints.is_empty());
    }

    #[test]
    fn sdp_json_roundtrip_and_validation() {
        let cone = cone_of(vec![e(2, 0), e(2, 1)]);
        let doc = export_restricted_sdp(&SymMatrix::identity(2), &[(SymMatrix::identity(2), 2.0)], &cone)
            .unwrap();
        let text = doc.to_json();
        let back = RestrictedSdp::from_json_str(&text).unwrap();
        assert_eq!(back.blocks.len(), 2);
        assert!(RestrictedSdp::from_json_str("{}").is_err());
        assert!(RestrictedSdp::from_json_str("{\"n\":0,\"blocks\":[],\"rhs\":[],\"sense\":\"min\"}").is_err());
    }
}
