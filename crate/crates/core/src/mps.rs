//! Matrix-product machinery for translation-invariant states: transfer
//! matrices, canonical forms, explicit clustering witnesses, periodic ring
//! truncations, and the contraction of shallow brickwork unit cells into a
//! per-cell tensor.
//!
//! The central object is the site tensor `A = (A_0, ..., A_{χ-1})` of `D×D`
//! matrices. Its transfer matrix `E(X) = Σ_i A_i X A_i†` acts on `D×D`
//! matrices, represented here as a dense `D²×D²` operator over row-major
//! vectorizations. [`canonicalize`] rescales and gauges the tensor so that
//! `E(1) = 1` and `E†(ρ) = ρ` for a positive unit-trace `ρ`; the tensor is
//! *normal* when the rescaled transfer matrix has a unique eigenvalue of
//! modulus one, equal to one, with positive fixed points on both sides.
//! Normality is what makes distant observables decouple:
//! [`clustering_constant`] finds an explicit separation `ℓ` and constant `c`
//! with `⟨PQ⟩ ≤ c·⟨P⟩·⟨Q⟩` for positive observables at least `ℓ` sites
//! apart. [`ring_amplitudes`] closes `L` copies of the tensor into a
//! periodic state, and [`circuit_to_imps`] turns the two-site unit cell of
//! an infinite brickwork circuit into the per-cell tensor of the state it
//! prepares, so that shallow circuits can be fed through the same analysis.

use serde::{Deserialize, Serialize};

use crate::circuit::{LocalOperator, StateVector, UNITARITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    complex_spectrum, hermitian_eigen, inv_sqrt_hermitian_pd, require_hermitian, sort_spectrum,
    spectral_norm, sqrt_hermitian_psd, unit_fixed_point, CMatrix, CVector, C64,
};

/// Largest accepted bond dimension. Keeps every transfer matrix within the
/// dense spectral routines.
pub const MAX_BOND_DIM: usize = 8;

/// Largest accepted physical dimension per site.
pub const MAX_PHYS_DIM: usize = 8;

/// Cap on the amplitude count of a contracted ring.
pub const MAX_RING_AMPLITUDES: usize = 1 << 20;

/// Residual accepted on the canonical-gauge fixed-point equations.
pub const GAUGE_TOL: f64 = 1e-10;

/// Depth cap for the dense unit-cell contraction.
pub const MAX_CELL_DEPTH: usize = 2;

/// Relative threshold below which a fixed point counts as singular.
const POSITIVITY_TOL: f64 = 1e-10;

/// Spectral-gap tolerance for deciding normality.
const NORMALITY_TOL: f64 = 1e-8;

/// Singular values below this are treated as zero when splitting a gate.
const SCHMIDT_TOL: f64 = 1e-12;

/// Iteration cap for the clustering-length search.
const CLUSTERING_MAX_ELL: usize = 10_000;

/// Separations spot-checked beyond the clustering length.
const CLUSTERING_SAMPLES: usize = 8;

/// Site tensor of a translation-invariant matrix-product state: one `D×D`
/// matrix per physical level.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MPSTensorData", into = "MPSTensorData")]
pub struct MPSTensor {
    phys_dim: usize,
    bond_dim: usize,
    matrices: Vec<CMatrix>,
}

/// Serialized form: `matrices[level][row][col] = [re, im]`.
#[derive(Serialize, Deserialize)]
struct MPSTensorData {
    phys_dim: usize,
    bond_dim: usize,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TryFrom<MPSTensorData> for MPSTensor {
    type Error = Error;

    fn try_from(data: MPSTensorData) -> Result<Self> {
        if data.matrices.len() != data.phys_dim {
            return Err(Error::DimensionMismatch(format!(
                "physical dimension {} with {} matrices",
                data.phys_dim,
                data.matrices.len()
            )));
        }
        let mut matrices = Vec::with_capacity(data.matrices.len());
        for rows in &data.matrices {
            if rows.len() != data.bond_dim || rows.iter().any(|r| r.len() != data.bond_dim) {
                return Err(Error::DimensionMismatch(format!(
                    "bond dimension {} with a non-{0}x{0} matrix",
                    data.bond_dim
                )));
            }
            matrices.push(CMatrix::from_fn(data.bond_dim, data.bond_dim, |r, c| {
                let [re, im] = rows[r][c];
                C64::new(re, im)
            }));
        }
        Self::new(matrices)
    }
}

impl From<MPSTensor> for MPSTensorData {
    fn from(tensor: MPSTensor) -> Self {
        let d = tensor.bond_dim;
        let matrices = tensor
            .matrices
            .iter()
            .map(|m| {
                (0..d)
                    .map(|r| (0..d).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self {
            phys_dim: tensor.phys_dim,
            bond_dim: tensor.bond_dim,
            matrices,
        }
    }
}

impl MPSTensor {
    /// Wraps one matrix per physical level, checking shapes, finiteness,
    /// and the dense caps.
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidInput(
                "a site tensor needs at least one physical level".into(),
            ));
        }
        if matrices.len() > MAX_PHYS_DIM {
            return Err(Error::InvalidInput(format!(
                "physical dimension {} exceeds the cap of {MAX_PHYS_DIM}",
                matrices.len()
            )));
        }
        let bond_dim = matrices[0].nrows();
        if bond_dim == 0 || bond_dim > MAX_BOND_DIM {
            return Err(Error::InvalidInput(format!(
                "bond dimension {bond_dim} is outside 1..={MAX_BOND_DIM}"
            )));
        }
        for m in &matrices {
            if m.nrows() != bond_dim || m.ncols() != bond_dim {
                return Err(Error::DimensionMismatch(format!(
                    "every level must be a {bond_dim}x{bond_dim} matrix, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::InvalidInput("tensor entries must be finite".into()));
            }
        }
        Ok(Self {
            phys_dim: matrices.len(),
            bond_dim,
            matrices,
        })
    }

    /// Number of physical levels per site.
    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    /// Bond dimension `D`.
    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    /// All level matrices, indexed by physical level.
    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// The matrix of one physical level.
    pub fn matrix(&self, level: usize) -> &CMatrix {
        &self.matrices[level]
    }
}

/// Bond-dimension-one tensor whose rings are product states with the given
/// single-site amplitudes.
pub fn product_tensor(amplitudes: &[C64]) -> Result<MPSTensor> {
    MPSTensor::new(
        amplitudes
            .iter()
            .map(|&a| CMatrix::from_element(1, 1, a))
            .collect(),
    )
}

/// The two-level, bond-dimension-two tensor whose rings are GHZ states
/// `(|0⋯0⟩ + |1⋯1⟩)/√2`. Its transfer matrix has a doubly degenerate unit
/// eigenvalue, the standard example of a non-normal tensor.
pub fn ghz_tensor() -> MPSTensor {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let a0 = CMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
    let a1 = CMatrix::from_row_slice(2, 2, &[zero, zero, zero, one]);
    MPSTensor::new(vec![a0, a1]).expect("static tensor")
}

/// The spin-1 AKLT tensor in its canonical normalization. Its transfer
/// spectrum is `{1, -1/3, -1/3, -1/3}`, so it is normal with a gap of
/// exactly `1/3` and fixed point `ρ = 1/2`.
pub fn aklt_tensor() -> MPSTensor {
    let zero = C64::new(0.0, 0.0);
    let plus = C64::new((2.0_f64 / 3.0).sqrt(), 0.0);
    let mid = C64::new(-(1.0_f64 / 3.0).sqrt(), 0.0);
    let a_plus = CMatrix::from_row_slice(2, 2, &[zero, plus, zero, zero]);
    let a_zero = CMatrix::from_row_slice(2, 2, &[mid, zero, zero, -mid]);
    let a_minus = CMatrix::from_row_slice(2, 2, &[zero, zero, -plus, zero]);
    MPSTensor::new(vec![a_plus, a_zero, a_minus]).expect("static tensor")
}

/// Row-major vectorization `vec(X)[i·D + j] = X[i, j]`, under which
/// `(A ⊗ conj(B)) vec(X) = vec(A X B†)`.
fn vec_row_major(m: &CMatrix) -> CVector {
    let cols = m.ncols();
    CVector::from_fn(m.nrows() * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vec_row_major`] for square matrices.
fn mat_row_major(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| v[r * d + c])
}

/// Dense transfer operator of a site tensor, acting on row-major
/// vectorized `D×D` matrices.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    /// Bond dimension `D` of the underlying tensor.
    pub bond_dim: usize,
    /// The `D²×D²` matrix of the map.
    pub matrix: CMatrix,
    /// Optional description of the sandwiched observable.
    pub label: Option<String>,
}

impl TransferMatrix {
    /// Applies the map to a `D×D` matrix.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        mat_row_major(&(&self.matrix * vec_row_major(x)), self.bond_dim)
    }
}

/// Transfer matrix of `a`, optionally sandwiching a local observable.
///
/// Without an observable this is `E = Σ_i A_i ⊗ conj(A_i)`, realizing
/// `X ↦ Σ_i A_i X A_i†`. With an observable `O` on `d` consecutive sites it
/// is `E_O = Σ_{I,J} O_{I,J} A_I ⊗ conj(A_J)` where `I, J` run over
/// length-`d` level strings and `A_I` is the ordered product
/// `A_{i_1} ⋯ A_{i_d}`.
///
/// # Errors
///
/// Fails with [`Error::DimensionMismatch`] when the observable dimension is
/// not `phys_dim^d` for the declared support size.
pub fn transfer_matrix(a: &MPSTensor, op: Option<&LocalOperator>) -> Result<TransferMatrix> {
    match op {
        None => Ok(identity_transfer(a)),
        Some(op) => {
            let sites = op.support.len();
            let dim = (a.phys_dim as u128).pow(sites as u32);
            if op.matrix.nrows() as u128 != dim {
                return Err(Error::DimensionMismatch(format!(
                    "an observable on {sites} sites of a dimension-{} chain needs a \
                     {dim}-dimensional matrix, got {}",
                    a.phys_dim,
                    op.matrix.nrows()
                )));
            }
            observable_transfer(a, &op.matrix)
        }
    }
}

/// Transfer matrix with an explicit observable matrix whose dimension is a
/// power `phys_dim^d`. This is the entry point for non-qubit chains, where
/// [`LocalOperator`] does not apply.
pub fn observable_transfer(a: &MPSTensor, observable: &CMatrix) -> Result<TransferMatrix> {
    if observable.nrows() != observable.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "observable must be square, got {}x{}",
            observable.nrows(),
            observable.ncols()
        )));
    }
    let sites = support_sites(a.phys_dim, observable.nrows())?;
    let products = site_products(a, sites);
    let dd = a.bond_dim * a.bond_dim;
    let mut matrix = CMatrix::zeros(dd, dd);
    for (i, ket) in products.iter().enumerate() {
        for (j, bra) in products.iter().enumerate() {
            let weight = observable[(i, j)];
            if weight.norm_sqr() == 0.0 {
                continue;
            }
            matrix += ket.kronecker(&bra.map(|x| x.conj())) * weight;
        }
    }
    Ok(TransferMatrix {
        bond_dim: a.bond_dim,
        matrix,
        label: None,
    })
}

fn identity_transfer(a: &MPSTensor) -> TransferMatrix {
    let dd = a.bond_dim * a.bond_dim;
    let mut matrix = CMatrix::zeros(dd, dd);
    for m in &a.matrices {
        matrix += m.kronecker(&m.map(|x| x.conj()));
    }
    TransferMatrix {
        bond_dim: a.bond_dim,
        matrix,
        label: None,
    }
}

/// Number of sites `d` with `phys^d = dim`.
fn support_sites(phys: usize, dim: usize) -> Result<usize> {
    let mut acc = phys;
    let mut sites = 1;
    while acc < dim {
        acc = acc.saturating_mul(phys);
        sites += 1;
    }
    if acc == dim && phys > 1 {
        Ok(sites)
    } else {
        Err(Error::DimensionMismatch(format!(
            "observable dimension {dim} is not a power of the physical dimension {phys}"
        )))
    }
}

/// Ordered products `A_{i_1} ⋯ A_{i_d}` for all level strings, indexed with
/// the first site most significant.
fn site_products(a: &MPSTensor, sites: usize) -> Vec<CMatrix> {
    let mut products = vec![CMatrix::identity(a.bond_dim, a.bond_dim)];
    for _ in 0..sites {
        let mut next = Vec::with_capacity(products.len() * a.phys_dim);
        for prefix in &products {
            for m in &a.matrices {
                next.push(prefix * m);
            }
        }
        products = next;
    }
    products
}

/// A site tensor rescaled and gauged to the canonical fixed-point form.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Gauged, rescaled tensor with `Σ_i A_i A_i† = 1`.
    pub tensor: MPSTensor,
    /// Positive unit-trace left fixed point: `Σ_i A_i† ρ A_i = ρ`.
    pub rho: CMatrix,
    /// Modulus of the second-largest transfer eigenvalue after rescaling.
    pub lambda2: f64,
    /// Whether the rescaled transfer matrix has a unique modulus-one
    /// eigenvalue, equal to one, with positive fixed points on both sides.
    pub is_normal: bool,
    /// Full transfer spectrum after rescaling, sorted by descending modulus.
    pub spectrum: Vec<C64>,
    /// `‖Σ A_i A_i† − 1‖_F` in the returned gauge.
    pub residual_right: f64,
    /// `‖Σ A_i† ρ A_i − ρ‖_F` in the returned gauge.
    pub residual_left: f64,
}

/// Rescales the tensor so the transfer spectral radius is one and gauges it
/// so the right fixed point is the identity; the left fixed point is then
/// normalized to a unit-trace density matrix.
///
/// Degenerate peripheral spectra (GHZ being the standard example) still
/// return, with `is_normal = false`; what cannot be repaired is a singular
/// right fixed point, since its inverse square root is the gauge transform.
///
/// # Errors
///
/// * [`Error::InvalidInput`] when the transfer spectrum vanishes or the
///   gauge transform is singular.
/// * [`Error::NoConvergence`] when the fixed-point iteration stalls or the
///   gauge residuals exceed `max(tol, 1e-12)`.
pub fn canonicalize(a: &MPSTensor, tol: f64) -> Result<CanonicalForm> {
    let acceptance = tol.max(1e-12);
    let d = a.bond_dim;
    let e0 = identity_transfer(a);
    let mut spectrum = complex_spectrum(&e0.matrix)?;
    sort_spectrum(&mut spectrum);
    let radius = spectrum[0].norm();
    if radius < 1e-300 {
        return Err(Error::InvalidInput(
            "transfer matrix has zero spectral radius".into(),
        ));
    }
    for v in spectrum.iter_mut() {
        *v /= radius;
    }
    let scale = radius.sqrt();
    let e_mat = e0.matrix.map(|x| x / radius);

    // The transfer matrix of a completely positive map attains its spectral
    // radius at a nonnegative eigenvalue, so after rescaling there is an
    // eigenvalue at one. Iterating the phase-damped map (E + E²)/2 singles
    // it out even when other modulus-one eigenvalues carry nontrivial
    // phases: those are strictly contracted by the damping.
    let damped = (&e_mat + &e_mat * &e_mat).map(|x| x * 0.5);
    let start = vec_row_major(&CMatrix::identity(d, d));
    let fixed = unit_fixed_point(&damped, &start)?;
    let x = hermitian_part(&mat_row_major(&fixed, d))?;
    let xe = hermitian_eigen(&x)?;
    let xmax = xe.values[0];
    let xmin = *xe.values.last().expect("nonempty spectrum");
    if xmax <= 0.0 || xmin <= xmax * POSITIVITY_TOL {
        return Err(Error::InvalidInput(format!(
            "gauge transform is singular: right fixed point has eigenvalue range \
             [{xmin:.3e}, {xmax:.3e}]"
        )));
    }
    let x_sqrt = sqrt_hermitian_psd(&x, xmax * POSITIVITY_TOL)?;
    let x_inv_sqrt = inv_sqrt_hermitian_pd(&x, xmax * POSITIVITY_TOL)?;
    let gauged: Vec<CMatrix> = a
        .matrices
        .iter()
        .map(|m| &x_inv_sqrt * m.map(|x| x / scale) * &x_sqrt)
        .collect();
    let tensor = MPSTensor::new(gauged)?;

    let e = identity_transfer(&tensor);
    let adj = e.matrix.adjoint();
    let damped_left = (&adj + &adj * &adj).map(|x| x * 0.5);
    let fixed_left = unit_fixed_point(&damped_left, &start)?;
    let mut rho = hermitian_part(&mat_row_major(&fixed_left, d))?;
    let trace = rho.trace().re;
    rho = rho.map(|x| x / trace);
    let rho_eig = hermitian_eigen(&rho)?;
    let rho_pd = rho_eig.values[0] > 0.0
        && *rho_eig.values.last().expect("nonempty spectrum") > rho_eig.values[0] * POSITIVITY_TOL;

    let id_vec = vec_row_major(&CMatrix::identity(d, d));
    let rho_vec = vec_row_major(&rho);
    let residual_right = (&e.matrix * &id_vec - &id_vec).norm();
    let residual_left = (e.matrix.adjoint() * &rho_vec - &rho_vec).norm();
    if residual_right > acceptance || residual_left > acceptance {
        return Err(Error::NoConvergence(format!(
            "gauge residuals {residual_right:.3e} / {residual_left:.3e} exceed {acceptance:.1e}"
        )));
    }

    let lambda2 = if spectrum.len() > 1 {
        spectrum[1].norm()
    } else {
        0.0
    };
    let unit_unique = (spectrum[0] - C64::new(1.0, 0.0)).norm() <= NORMALITY_TOL
        && (spectrum.len() == 1 || lambda2 <= 1.0 - NORMALITY_TOL);
    let is_normal = unit_unique && rho_pd;

    Ok(CanonicalForm {
        tensor,
        rho,
        lambda2,
        is_normal,
        spectrum,
        residual_right,
        residual_left,
    })
}

/// Rotates away the global phase, making the trace real and positive, and
/// projects onto the Hermitian part.
fn hermitian_part(m: &CMatrix) -> Result<CMatrix> {
    let trace = m.trace();
    if trace.norm() < 1e-12 {
        return Err(Error::InvalidInput(
            "gauge transform is singular: fixed point has vanishing trace".into(),
        ));
    }
    let phase = trace / trace.norm();
    let rotated = m.map(|x| x / phase);
    Ok((rotated.adjoint() + rotated).map(|x| x * 0.5))
}

/// One spot check of the clustering inequality at a fixed separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringSample {
    /// Sites between the two observables.
    pub separation: usize,
    /// `⟨PQ⟩ = tr(ρ E_P E^sep E_Q(1))`.
    pub correlator: f64,
    /// `⟨P⟩·⟨Q⟩`.
    pub product: f64,
    /// `c·⟨P⟩·⟨Q⟩`, which must dominate the correlator.
    pub bound: f64,
}

/// Explicit clustering witness: the separation beyond which products of
/// positive observables factorize up to a multiplicative constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringReport {
    /// Smallest separation `ℓ ≥ 1` with `‖E^ℓ − E_∞‖ ≤ λ^ℓ`.
    pub ell: usize,
    /// Decay rate used, strictly between the transfer gap and one.
    pub lambda: f64,
    /// `c = 1 + λ^ℓ·‖ρ⁻¹‖`.
    pub constant: f64,
    /// `‖ρ⁻¹‖`, the reciprocal of the smallest fixed-point eigenvalue.
    pub rho_inverse_norm: f64,
    /// Spot checks of `⟨PQ⟩ ≤ c·⟨P⟩·⟨Q⟩` at and beyond `ℓ`.
    pub verified_pairs: Vec<ClusteringSample>,
}

/// Finds the clustering length and constant of a normal tensor and verifies
/// the inequality `⟨PQ⟩ ≤ c·⟨P⟩·⟨Q⟩` on the supplied positive observables.
///
/// `E_∞ = vec(1)·vec(ρ)†` is the exact rank-one projector onto the fixed
/// point, `X ↦ tr(ρX)·1`. The length `ℓ` is the smallest with
/// `‖E^ℓ − E_∞‖ ≤ λ^ℓ` in operator norm, and `c = 1 + λ^ℓ·‖ρ⁻¹‖`. When no
/// rate is supplied, the midpoint `(λ₂ + 1)/2` of the admissible interval
/// is used.
///
/// # Errors
///
/// * [`Error::Inapplicable`] when the tensor is not normal.
/// * [`Error::InvalidInput`] when `λ ∉ (λ₂, 1)` or an observable is not
///   positive semidefinite.
/// * [`Error::InvariantViolation`] when a spot check fails, which would
///   falsify the derivation.
pub fn clustering_constant(
    a: &MPSTensor,
    lambda: Option<f64>,
    p: &CMatrix,
    q: &CMatrix,
) -> Result<ClusteringReport> {
    let canon = canonicalize(a, GAUGE_TOL)?;
    if !canon.is_normal {
        return Err(Error::Inapplicable(
            "clustering needs a normal tensor: a unique unit transfer eigenvalue with \
             positive fixed points"
                .into(),
        ));
    }
    let lambda = lambda.unwrap_or((canon.lambda2 + 1.0) / 2.0);
    if !(lambda > canon.lambda2 && lambda < 1.0) {
        return Err(Error::InvalidInput(format!(
            "decay rate must lie strictly between the transfer gap {:.6} and one, got {lambda}",
            canon.lambda2
        )));
    }
    require_psd(p, "first observable")?;
    require_psd(q, "second observable")?;

    let tensor = &canon.tensor;
    let d = tensor.bond_dim;
    let e = identity_transfer(tensor);
    let e_p = observable_transfer(tensor, p)?;
    let e_q = observable_transfer(tensor, q)?;
    let id_vec = vec_row_major(&CMatrix::identity(d, d));
    let rho_vec = vec_row_major(&canon.rho);
    let e_inf = CMatrix::from_fn(d * d, d * d, |r, c| id_vec[r] * rho_vec[c].conj());

    let mut power = e.matrix.clone();
    let mut ell = 1usize;
    loop {
        let gap = spectral_norm(&(&power - &e_inf))?;
        if gap <= lambda.powi(ell as i32) {
            break;
        }
        ell += 1;
        if ell > CLUSTERING_MAX_ELL {
            return Err(Error::NoConvergence(format!(
                "no separation up to {CLUSTERING_MAX_ELL} meets the decay bound"
            )));
        }
        power = &power * &e.matrix;
    }

    let rho_eig = hermitian_eigen(&canon.rho)?;
    let rho_min = *rho_eig.values.last().expect("nonempty spectrum");
    let rho_inverse_norm = 1.0 / rho_min;
    let constant = 1.0 + lambda.powi(ell as i32) * rho_inverse_norm;

    let mean_p = rho_vec.dotc(&(&e_p.matrix * &id_vec)).re;
    let mean_q = rho_vec.dotc(&(&e_q.matrix * &id_vec)).re;
    let product = mean_p * mean_q;
    let bound = constant * product;
    let mut propagated = &e_q.matrix * &id_vec;
    for _ in 0..ell {
        propagated = &e.matrix * propagated;
    }
    let mut verified_pairs = Vec::with_capacity(CLUSTERING_SAMPLES);
    for sep in ell..ell + CLUSTERING_SAMPLES {
        let correlator = rho_vec.dotc(&(&e_p.matrix * &propagated)).re;
        if correlator > bound + 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "correlator {correlator:.6e} exceeds the bound {bound:.6e} at separation {sep}"
            )));
        }
        verified_pairs.push(ClusteringSample {
            separation: sep,
            correlator,
            product,
            bound,
        });
        propagated = &e.matrix * propagated;
    }

    Ok(ClusteringReport {
        ell,
        lambda,
        constant,
        rho_inverse_norm,
        verified_pairs,
    })
}

fn require_psd(m: &CMatrix, what: &str) -> Result<()> {
    require_hermitian(m)?;
    let eig = hermitian_eigen(m)?;
    let min = *eig.values.last().expect("nonempty spectrum");
    let scale = eig.values[0].abs().max(1.0);
    if min < -1e-10 * scale {
        return Err(Error::InvalidInput(format!(
            "{what} must be positive semidefinite, smallest eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// Amplitudes of the periodic length-`sites` contraction
/// `ψ(s_1⋯s_L) = tr[A_{s_1} ⋯ A_{s_L}]`, normalized. Site 0 occupies the
/// most significant digit of the amplitude index, and cyclicity of the
/// trace makes the result exactly translation invariant.
///
/// # Errors
///
/// * [`Error::InvalidInput`] when `sites == 0`, the amplitude count exceeds
///   [`MAX_RING_AMPLITUDES`], or the contraction has zero norm.
pub fn ring_amplitudes(a: &MPSTensor, sites: usize) -> Result<Vec<C64>> {
    if sites == 0 {
        return Err(Error::InvalidInput("a ring needs at least one site".into()));
    }
    let total = (a.phys_dim as u128).pow(sites as u32);
    if total > MAX_RING_AMPLITUDES as u128 {
        return Err(Error::InvalidInput(format!(
            "ring of {total} amplitudes exceeds the dense cap of {MAX_RING_AMPLITUDES}"
        )));
    }
    let mut amps = Vec::with_capacity(total as usize);
    let prefix = CMatrix::identity(a.bond_dim, a.bond_dim);
    fill_ring(a, &mut amps, &prefix, sites);
    let norm = amps.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::InvalidInput("ring contraction has zero norm".into()));
    }
    for amp in &mut amps {
        *amp /= norm;
    }
    Ok(amps)
}

fn fill_ring(a: &MPSTensor, amps: &mut Vec<C64>, prefix: &CMatrix, remaining: usize) {
    if remaining == 0 {
        amps.push(prefix.trace());
        return;
    }
    for m in &a.matrices {
        fill_ring(a, amps, &(prefix * m), remaining - 1);
    }
}

/// Closes `sites` copies of the tensor into a periodic qubit register.
/// Requires a power-of-two physical dimension; each site then contributes
/// `log2(phys_dim)` qubits, most significant first.
pub fn ring_truncation(a: &MPSTensor, sites: usize) -> Result<StateVector> {
    if !a.phys_dim.is_power_of_two() || a.phys_dim < 2 {
        return Err(Error::InvalidInput(format!(
            "a qubit register needs a power-of-two physical dimension, got {}; \
             use ring_amplitudes for general chains",
            a.phys_dim
        )));
    }
    StateVector::from_amplitudes(ring_amplitudes(a, sites)?)
}

/// One layer of a translation-invariant brickwork unit cell on two sites.
#[derive(Debug, Clone)]
pub enum CellLayer {
    /// Independent single-qubit gates on the first and second cell site.
    Singles(CMatrix, CMatrix),
    /// A two-qubit gate inside the cell, first site most significant.
    Within(CMatrix),
    /// A two-qubit gate straddling the cell boundary: it couples the second
    /// site of each cell (most significant gate index) to the first site of
    /// the next.
    Spanning(CMatrix),
}

/// Two-site unit cell of an infinite translation-invariant circuit, layers
/// listed earliest first.
#[derive(Debug, Clone)]
pub struct UnitCell {
    /// Gate layers in application order.
    pub layers: Vec<CellLayer>,
}

/// Contracts the unit cell of a depth ≤ [`MAX_CELL_DEPTH`] brickwork
/// circuit acting on `|00⋯⟩` into the per-cell site tensor of the prepared
/// state: physical dimension four (two qubits per cell), bond dimension the
/// operator Schmidt rank of the boundary gate.
///
/// Boundary gates are composed when adjacent; cells without a boundary gate
/// contract to bond dimension one. The depth cap keeps the contraction
/// dense and exact, with the bond dimension bounded by `2^(2t)`.
///
/// # Errors
///
/// * [`Error::InvalidInput`] when the depth cap is exceeded, a gate is not
///   unitary, or boundary gates are separated by other layers.
/// * [`Error::DimensionMismatch`] when a gate has the wrong shape.
pub fn circuit_to_imps(cell: &UnitCell) -> Result<MPSTensor> {
    if cell.layers.len() > MAX_CELL_DEPTH {
        return Err(Error::InvalidInput(format!(
            "cell depth {} exceeds the dense contraction cap of {MAX_CELL_DEPTH}",
            cell.layers.len()
        )));
    }
    for layer in &cell.layers {
        validate_layer(layer)?;
    }

    let id4 = CMatrix::identity(4, 4);
    let mut pre = id4.clone();
    let mut post = id4;
    let mut boundary: Option<CMatrix> = None;
    let mut post_touched = false;
    for layer in &cell.layers {
        match layer {
            CellLayer::Singles(u0, u1) => {
                let gate = u0.kronecker(u1);
                if boundary.is_some() {
                    post_touched = true;
                    post = gate * post;
                } else {
                    pre = gate * pre;
                }
            }
            CellLayer::Within(gate) => {
                if boundary.is_some() {
                    post_touched = true;
                    post = gate * post;
                } else {
                    pre = gate * pre;
                }
            }
            CellLayer::Spanning(gate) => match boundary.take() {
                None => boundary = Some(gate.clone()),
                Some(prev) if !post_touched => boundary = Some(gate * prev),
                Some(_) => {
                    return Err(Error::InvalidInput(
                        "boundary gates separated by other layers are not supported".into(),
                    ));
                }
            },
        }
    }

    let vacuum = CVector::from_fn(4, |k, _| {
        if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    match boundary {
        None => {
            let amps = &post * (&pre * &vacuum);
            MPSTensor::new(
                (0..4)
                    .map(|s| CMatrix::from_element(1, 1, amps[s]))
                    .collect(),
            )
        }
        Some(gate) => {
            let (left, right) = schmidt_split(&gate)?;
            let rank = left.len();
            let seed = &pre * &vacuum;
            let mut matrices = vec![CMatrix::zeros(rank, rank); 4];
            for (nu, r_fact) in right.iter().enumerate() {
                for (mu, l_fact) in left.iter().enumerate() {
                    let w = &post * (r_fact.kronecker(l_fact) * &seed);
                    for (s, m) in matrices.iter_mut().enumerate() {
                        m[(nu, mu)] = w[s];
                    }
                }
            }
            MPSTensor::new(matrices)
        }
    }
}

/// Splits a two-qubit gate `G` into `G = Σ_τ L_τ ⊗ R_τ` across its two
/// qubits, the first factor acting on the more significant one. The factors
/// absorb `√σ_τ` each, and singular values at most [`SCHMIDT_TOL`] are
/// dropped.
fn schmidt_split(g: &CMatrix) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let paired = CMatrix::from_fn(4, 4, |row, col| {
        let (l_out, l_in) = (row / 2, row % 2);
        let (r_out, r_in) = (col / 2, col % 2);
        g[(l_out * 2 + r_out, l_in * 2 + r_in)]
    });
    let svd = paired.svd(true, true);
    let u = svd.u.as_ref().expect("svd with vectors");
    let v_t = svd.v_t.as_ref().expect("svd with vectors");
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in 0..svd.singular_values.len() {
        let sigma = svd.singular_values[t];
        if sigma <= SCHMIDT_TOL {
            continue;
        }
        let root = sigma.sqrt();
        left.push(CMatrix::from_fn(2, 2, |out, inp| {
            u[(out * 2 + inp, t)] * root
        }));
        right.push(CMatrix::from_fn(2, 2, |out, inp| {
            v_t[(t, out * 2 + inp)] * root
        }));
    }
    if left.is_empty() {
        return Err(Error::InvalidInput(
            "boundary gate has zero operator Schmidt rank".into(),
        ));
    }
    Ok((left, right))
}

fn validate_layer(layer: &CellLayer) -> Result<()> {
    match layer {
        CellLayer::Singles(u0, u1) => {
            require_unitary(u0, 2)?;
            require_unitary(u1, 2)
        }
        CellLayer::Within(g) | CellLayer::Spanning(g) => require_unitary(g, 4),
    }
}

fn require_unitary(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "expected a {dim}x{dim} gate, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let deviation = (m.adjoint() * m - CMatrix::identity(dim, dim)).norm();
    if deviation > UNITARITY_TOL * dim as f64 {
        return Err(Error::InvalidInput(format!(
            "gate is not unitary: ‖U†U − 1‖ = {deviation:.3e}"
        )));
    }
    Ok(())
}
