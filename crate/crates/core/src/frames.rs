//! Frames on the Stiefel manifold, principal angles between the subspaces
//! they span, and the two subspace metrics used by the packing objective:
//! the chordal distance `sqrt(s - ||Fi^T Fj||_F^2)` and the cone distance
//! `||Fi Fi^T - Fj Fj^T||_F` between sub-cone central projectors. The two
//! agree up to the factor sqrt(2).

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmat::{symmetrize, SymMatrix};

/// Orthonormality slack admitted by the [`Frame`] invariant.
pub const STIEFEL_TOL: f64 = 1e-10;

/// An n x s matrix with orthonormal columns, representing a point of the
/// Stiefel manifold and, through its column span, an s-dimensional subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    cols: DMatrix<f64>,
}

/// Cosines of the principal angles between two subspaces, non-increasing,
/// clamped to [0, 1].
#[derive(Debug, Clone)]
pub struct PrincipalAngles {
    cosines: Vec<f64>,
}

impl Frame {
    /// Accepts `raw` if its columns are orthonormal within `tol`, otherwise
    /// re-orthonormalizes through the orthogonal factor of a Householder QR
    /// factorization (which preserves the column span). Numerical rank
    /// deficiency, detected on the R diagonal at 1e-10 relative, is an
    /// error.
    pub fn from_columns(raw: DMatrix<f64>, tol: f64) -> Result<Self> {
        let (n, s) = (raw.nrows(), raw.ncols());
        if s == 0 || n == 0 {
            return Err(Error::InvalidArgument(
                "frame dimensions must be >= 1".into(),
            ));
        }
        if s > n {
            return Err(Error::DimensionMismatch(format!(
                "frame has {s} columns in ambient dimension {n}"
            )));
        }
        if !raw.iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("frame contains non-finite entries".into()));
        }
        let gram = raw.transpose() * &raw;
        let defect = (&gram - DMatrix::<f64>::identity(s, s)).norm();
        if defect <= tol.max(STIEFEL_TOL) {
            return Ok(Self { cols: raw });
        }
        let (q, r) = raw.qr().unpack();
        let rdiag: Vec<f64> = (0..s).map(|i| r[(i, i)].abs()).collect();
        let rmax = rdiag.iter().cloned().fold(0.0, f64::max);
        let rmin = rdiag.iter().cloned().fold(f64::INFINITY, f64::min);
        if rmin <= 1e-10 * rmax.max(1.0) {
            return Err(Error::Degenerate(format!(
                "frame columns are numerically rank-deficient (|r_min| {rmin:.3e}, |r_max| {rmax:.3e})"
            )));
        }
        Ok(Self { cols: q })
    }

    /// The exact index frame with columns `e_i` for `i` in `indices`.
    ///
    /// Indices must be strictly increasing and within `0..n`.
    pub fn standard_basis(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() || indices.len() > n {
            return Err(Error::InvalidArgument(format!(
                "need between 1 and {n} indices, got {}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) || *indices.last().unwrap() >= n {
            return Err(Error::InvalidArgument(format!(
                "indices must be strictly increasing and < {n}: {indices:?}"
            )));
        }
        let mut cols = DMatrix::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            cols[(i, c)] = 1.0;
        }
        Ok(Self { cols })
    }

    /// A unit-column frame from a single vector (s = 1).
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        Frame::from_columns(DMatrix::from_column_slice(v.len(), 1, v), 0.0)
    }

    /// Orthonormalized standard-Gaussian n x s block.
    pub fn random(n: usize, s: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let gauss = DMatrix::from_fn(n, s, |_, _| rng.sample::<f64, _>(StandardNormal));
        Frame::from_columns(gauss, 0.0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn sub_dim(&self) -> usize {
        self.cols.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.cols
    }

    /// `|| F^T F - I ||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let s = self.sub_dim();
        (self.cols.transpose() * &self.cols - DMatrix::<f64>::identity(s, s)).norm()
    }

    /// The n x n orthogonal projector `F F^T` onto the column span.
    pub fn projector(&self) -> DMatrix<f64> {
        symmetrize(&(&self.cols * self.cols.transpose()))
    }

    /// `F^T Z F`, the compression of an ambient matrix to frame coordinates.
    pub fn compress(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        symmetrize(&(self.cols.transpose() * z * &self.cols))
    }

    /// `F Y F^T`, the expansion of an s x s matrix back to the ambient space.
    pub fn expand(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        symmetrize(&(&self.cols * y * self.cols.transpose()))
    }
}

impl PrincipalAngles {
    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    /// `sqrt(sum_i sin^2 theta_i)`, the angle-based form of the chordal
    /// distance. Kept as an independent route for cross-checking the
    /// Frobenius-based form.
    pub fn chordal_from_angles(&self) -> f64 {
        self.cosines
            .iter()
            .map(|c| 1.0 - c * c)
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }
}

fn check_same_shape(fi: &Frame, fj: &Frame) -> Result<()> {
    if fi.ambient_dim() != fj.ambient_dim() || fi.sub_dim() != fj.sub_dim() {
        return Err(Error::DimensionMismatch(format!(
            "frames have shapes {}x{} and {}x{}",
            fi.ambient_dim(),
            fi.sub_dim(),
            fj.ambient_dim(),
            fj.sub_dim()
        )));
    }
    Ok(())
}

/// Principal-angle cosines: singular values of `M = Fi^T Fj`, sorted
/// non-increasing and clamped to [0, 1].
///
/// Computed as square roots of the eigenvalues of `M^T M` through the same
/// fixed symmetric eigensolver used everywhere else in the crate.
pub fn principal_angles(fi: &Frame, fj: &Frame) -> Result<PrincipalAngles> {
    check_same_shape(fi, fj)?;
    let product = fi.columns().transpose() * fj.columns();
    let gram = SymMatrix::from_dense(product.transpose() * &product)?;
    let dec = gram.eig()?;
    let mut cosines = Vec::with_capacity(fi.sub_dim());
    for lambda in dec.eigenvalues.iter() {
        let c = lambda.max(0.0).sqrt();
        if c > 1.0 + 1e-9 {
            return Err(Error::Numerical(format!(
                "principal-angle cosine {c} exceeds 1 beyond tolerance"
            )));
        }
        cosines.push(c.clamp(0.0, 1.0));
    }
    Ok(PrincipalAngles { cosines })
}

/// Chordal distance `sqrt(s - ||Fi^T Fj||_F^2)`, in [0, sqrt(s)].
///
/// Evaluated as `|| Fj - Fi (Fi^T Fj) ||_F`, which is the same quantity
/// (expand the square and use `Fi^T Fi = I`) but stays accurate near
/// coincident subspaces, where the radicand form loses half the digits to
/// cancellation before the square root.
pub fn chordal_distance(fi: &Frame, fj: &Frame) -> Result<f64> {
    check_same_shape(fi, fj)?;
    let cross = fi.columns().transpose() * fj.columns();
    let residual = fj.columns() - fi.columns() * cross;
    let d = residual.norm();
    let s = fi.sub_dim() as f64;
    if d * d > s + 1e-10 {
        return Err(Error::Numerical(format!(
            "chordal distance {d:.6e} exceeds sqrt(s) beyond tolerance; frames violate \
             the Stiefel invariant"
        )));
    }
    Ok(d)
}

/// Cone distance `||Fi Fi^T - Fj Fj^T||_F`, computed directly from the two
/// n x n projectors. Equals sqrt(2) times the chordal distance.
pub fn cone_distance(fi: &Frame, fj: &Frame) -> Result<f64> {
    check_same_shape(fi, fj)?;
    Ok((fi.projector() - fj.projector()).norm())
}

/// Minimum pairwise chordal distance over all unordered pairs (the packing
/// objective; the cone-distance minimum is sqrt(2) times this).
pub fn min_pairwise_distance(frames: &[Frame]) -> Result<f64> {
    if frames.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "pairwise minimum undefined for {} frame(s)",
            frames.len()
        )));
    }
    let mut min = f64::INFINITY;
    for i in 0..frames.len() {
        for j in (i + 1)..frames.len() {
            min = min.min(chordal_distance(&frames[i], &frames[j])?);
        }
    }
    Ok(min)
}

/// Generation metadata attached to a [`FrameSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub params: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: &str, params: String, seed: Option<u64>) -> Self {
        Self {
            generator: generator.to_string(),
            params,
            seed,
        }
    }
}

/// An ordered collection of frames sharing one ambient dimension.
///
/// Sub-dimensions may vary (chordal-clique families); the cached minimum
/// pairwise chordal distance is only defined when they are all equal.
#[derive(Debug, Clone)]
pub struct FrameSet {
    frames: Vec<Frame>,
    provenance: Provenance,
    min_chordal: Option<f64>,
}

/// Wire format for one frame: column-major storage.
#[derive(Debug, Serialize, Deserialize)]
struct FrameJson {
    n: usize,
    s: usize,
    columns: Vec<f64>,
}

/// Wire format for a frame set with its metadata header.
#[derive(Debug, Serialize, Deserialize)]
struct FrameSetJson {
    n: usize,
    provenance: Provenance,
    min_chordal: Option<f64>,
    frames: Vec<FrameJson>,
}

impl FrameSet {
    pub fn new(frames: Vec<Frame>, provenance: Provenance) -> Result<Self> {
        if let Some(first) = frames.first() {
            let n = first.ambient_dim();
            if frames.iter().any(|f| f.ambient_dim() != n) {
                return Err(Error::DimensionMismatch(
                    "all frames in a set must share the ambient dimension".into(),
                ));
            }
        }
        Ok(Self {
            frames,
            provenance,
            min_chordal: None,
        })
    }

    /// Computes and caches the minimum pairwise chordal distance.
    pub fn with_min_chordal(mut self) -> Result<Self> {
        self.min_chordal = Some(min_pairwise_distance(&self.frames)?);
        Ok(self)
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        self.frames.first().map(Frame::ambient_dim)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn min_chordal(&self) -> Option<f64> {
        self.min_chordal
    }

    /// True when every frame has the same sub-dimension.
    pub fn uniform_sub_dim(&self) -> Option<usize> {
        let s = self.frames.first()?.sub_dim();
        self.frames.iter().all(|f| f.sub_dim() == s).then_some(s)
    }

    /// Appends seeded random frames of sub-dimension `s`, keeping provenance.
    ///
    /// Used to grow a packed set into a nested superset without re-packing.
    pub fn extend_random(&self, extra: usize, s: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let n = self
            .ambient_dim()
            .ok_or_else(|| Error::InvalidArgument("cannot extend an empty frame set".into()))?;
        let mut frames = self.frames.clone();
        for _ in 0..extra {
            frames.push(Frame::random(n, s, rng)?);
        }
        let provenance = Provenance::new(
            &self.provenance.generator,
            format!("{} +{} random", self.provenance.params, extra),
            self.provenance.seed,
        );
        FrameSet::new(frames, provenance)
    }

    pub fn to_json(&self) -> String {
        let doc = FrameSetJson {
            n: self.ambient_dim().unwrap_or(0),
            provenance: self.provenance.clone(),
            min_chordal: self.min_chordal,
            frames: self
                .frames
                .iter()
                .map(|f| FrameJson {
                    n: f.ambient_dim(),
                    s: f.sub_dim(),
                    columns: f.columns().as_slice().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("frame set serialization")
    }

    /// Parses and validates a frame-set document. Every frame must satisfy
    /// the Stiefel invariant (mild drift is re-orthonormalized); a stored
    /// `min_chordal` is checked against a recomputation.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: FrameSetJson = serde_json::from_str(text)?;
        let mut frames = Vec::with_capacity(doc.frames.len());
        for fj in &doc.frames {
            if fj.n != doc.n {
                return Err(Error::Parse(format!(
                    "frame ambient dimension {} does not match set dimension {}",
                    fj.n, doc.n
                )));
            }
            if fj.s == 0 || fj.s > fj.n {
                return Err(Error::Parse(format!(
                    "frame sub-dimension {} out of range for ambient {}",
                    fj.s, fj.n
                )));
            }
            let expect = fj.n.checked_mul(fj.s).ok_or_else(|| {
                Error::Parse("frame dimensions overflow".into())
            })?;
            if fj.columns.len() != expect {
                return Err(Error::Parse(format!(
                    "frame data length {} does not match {}x{}",
                    fj.columns.len(),
                    fj.n,
                    fj.s
                )));
            }
            frames.push(Frame::from_columns(
                DMatrix::from_column_slice(fj.n, fj.s, &fj.columns),
                1e-8,
            )?);
        }
        let mut set = FrameSet::new(frames, doc.provenance)?;
        if let Some(stored) = doc.min_chordal {
            let actual = min_pairwise_distance(&set.frames)?;
            if (stored - actual).abs() > 1e-10 {
                return Err(Error::Parse(format!(
                    "stored min chordal distance {stored} disagrees with recomputed {actual}"
                )));
            }
            set.min_chordal = Some(actual);
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;

    fn e(n: usize, i: usize) -> Frame {
        Frame::standard_basis(n, &[i]).unwrap()
    }

    fn line(angle_deg: f64) -> Frame {
        let t = angle_deg.to_radians();
        Frame::from_vector(&[t.cos(), t.sin()]).unwrap()
    }

    #[test]
    fn from_columns_accepts_orthonormal() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let g = Frame::from_columns(f.columns().clone(), 1e-12).unwrap();
        assert_eq!(f.columns(), g.columns());
    }

    #[test]
    fn from_columns_rescales() {
        let f = Frame::from_columns(DMatrix::from_column_slice(2, 1, &[2.0, 0.0]), 1e-12).unwrap();
        assert!((f.columns()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(f.columns()[(1, 0)].abs() < 1e-12);
    }

    #[test]
    fn from_columns_rejects_rank_deficient() {
        let dup = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            Frame::from_columns(dup, 1e-12),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn principal_angles_examples() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let same = principal_angles(&f, &f).unwrap();
        assert!(same.cosines().iter().all(|c| (c - 1.0).abs() < 1e-12));

        let a = e(2, 0);
        let b = e(2, 1);
        let orth = principal_angles(&a, &b).unwrap();
        assert!(orth.cosines()[0].abs() < 1e-12);

        // span(e1,e2) vs span(e1,e3): cosines (1, 0)
        let g = Frame::standard_basis(3, &[0, 2]).unwrap();
        let mixed = principal_angles(&f, &g).unwrap();
        assert!((mixed.cosines()[0] - 1.0).abs() < 1e-12);
        assert!(mixed.cosines()[1].abs() < 1e-12);
    }

    #[test]
    fn chordal_distance_examples() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let g = Frame::standard_basis(3, &[0, 2]).unwrap();
        assert!(chordal_distance(&f, &f).unwrap().abs() < 1e-12);
        assert!((chordal_distance(&e(2, 0), &e(2, 1)).unwrap() - 1.0).abs() < 1e-12);
        assert!((chordal_distance(&f, &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_distance_examples() {
        let f = Frame::standard_basis(3, &[0, 1]).unwrap();
        let g = Frame::standard_basis(3, &[0, 2]).unwrap();
        let r2 = 2.0_f64.sqrt();
        assert!(cone_distance(&f, &f).unwrap().abs() < 1e-12);
        assert!((cone_distance(&e(2, 0), &e(2, 1)).unwrap() - r2).abs() < 1e-12);
        assert!((cone_distance(&f, &g).unwrap() - r2).abs() < 1e-12);
    }

    #[test]
    fn min_pairwise_examples() {
        let pair = [e(2, 0), e(2, 1)];
        assert!((min_pairwise_distance(&pair).unwrap() - 1.0).abs() < 1e-12);

        let dup = [e(2, 0), e(2, 0)];
        assert!(min_pairwise_distance(&dup).unwrap().abs() < 1e-12);

        // three lines at 0, 60, 120 degrees: all pairwise angles 60 degrees
        let trio = [line(0.0), line(60.0), line(120.0)];
        let want = 60.0_f64.to_radians().sin();
        assert!((min_pairwise_distance(&trio).unwrap() - want).abs() < 1e-12);

        assert!(matches!(
            min_pairwise_distance(&[e(2, 0)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn angle_and_frobenius_forms_agree() {
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let fi = Frame::random(6, 3, &mut rng).unwrap();
            let fj = Frame::random(6, 3, &mut rng).unwrap();
            let via_angles = principal_angles(&fi, &fj).unwrap().chordal_from_angles();
            let direct = chordal_distance(&fi, &fj).unwrap();
            assert!((via_angles - direct).abs() <= 1e-9);
        }
    }

    #[test]
    fn frameset_json_roundtrip() {
        let mut rng = rng_from_seed(42);
        let frames = vec![
            Frame::random(4, 2, &mut rng).unwrap(),
            Frame::random(4, 2, &mut rng).unwrap(),
        ];
        let set = FrameSet::new(frames, Provenance::new("test", "n=4 s=2".into(), Some(42)))
            .unwrap()
            .with_min_chordal()
            .unwrap();
        let back = FrameSet::from_json_str(&set.to_json()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.provenance().generator, "test");
        assert!((back.min_chordal().unwrap() - set.min_chordal().unwrap()).abs() < 1e-15);
        for (a, b) in set.frames().iter().zip(back.frames()) {
            assert_eq!(a.columns(), b.columns());
        }
    }

    #[test]
    fn frameset_json_rejects_mismatched_ambient() {
        let text = r#"{"n":3,"provenance":{"generator":"t","params":"","seed":null},
                       "min_chordal":null,
                       "frames":[{"n":2,"s":1,"columns":[1.0,0.0]}]}"#;
        assert!(FrameSet::from_json_str(text).is_err());
    }
}
