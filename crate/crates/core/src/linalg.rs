//! Dense complex linear algebra used by every analysis module.
//!
//! Storage and elementwise arithmetic come from [`nalgebra`]; the solvers that
//! the analyses depend on are implemented here so their numerical behavior is
//! fixed and self-certifying:
//!
//! - [`hermitian_eigen`]: cyclic complex Jacobi rotations, off-diagonal
//!   Frobenius threshold `1e-12`, at most 100 sweeps, dimensions up to 128.
//! - [`complex_spectrum`]: full (possibly complex) spectrum via shift-inverted
//!   power iteration with deterministic restart seeds and Householder
//!   deflation; every accepted eigenvalue carries a residual certificate
//!   `‖Av − λv‖ ≤ 1e-12·max(1, ‖A‖_F)`.
//! - [`unit_fixed_point`]: eigenvalue-1 eigenvectors via matrix-squaring
//!   accelerated power iteration.
//! - [`bisect_root`] / [`golden_section_max`]: scalar solvers for the bound
//!   and search pipelines.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;
/// Dense dynamically-sized complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense dynamically-sized complex vector.
pub type CVector = DVector<C64>;

/// Largest dimension accepted by the Jacobi eigensolver.
pub const JACOBI_MAX_DIM: usize = 128;
/// Off-diagonal Frobenius threshold at which a Jacobi sweep is converged.
pub const JACOBI_TOL: f64 = 1e-12;
/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Residual tolerance for the general spectrum and fixed-point solvers.
pub const SPECTRUM_TOL: f64 = 1e-12;
/// Total iteration cap shared by the spectrum and fixed-point solvers.
pub const SPECTRUM_MAX_ITERS: usize = 10_000;
/// Frobenius deviation from `m = m†` accepted by Hermitian-only operations.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are real and sorted in descending order; column `k` of `vectors`
/// is a unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unitary matrix of eigenvector columns, aligned with `values`.
    pub vectors: CMatrix,
}

/// Frobenius norm of `m − m†`.
#[must_use]
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Checks `m` is square and Hermitian within [`HERMITICITY_TOL`]
/// (relative to `max(1, ‖m‖_F)`).
pub fn require_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let deviation = hermitian_deviation(m);
    let tolerance = HERMITICITY_TOL * m.norm().max(1.0);
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Square root of the sum of squared moduli of off-diagonal entries.
fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += m[(p, q)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation annihilates one off-diagonal pair with a unitary plane
/// rotation carrying the phase of the entry; sweeps repeat until the
/// off-diagonal Frobenius norm falls below `1e-12·max(1, ‖m‖_F)`.
///
/// # Errors
///
/// Fails on non-square or non-Hermitian input, on dimensions above
/// [`JACOBI_MAX_DIM`], and (not observed in practice) if 100 sweeps do not
/// converge.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    require_hermitian(m)?;
    let n = m.nrows();
    if n > JACOBI_MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "Jacobi eigensolver supports dimensions up to {JACOBI_MAX_DIM}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    // Work on the Hermitian average so roundoff in the input cannot bias the
    // rotations.
    let mut a = (m + m.adjoint()).scale(0.5);
    let mut v = CMatrix::identity(n, n);
    let threshold = JACOBI_TOL * a.norm().max(1.0);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence(format!(
            "Jacobi sweeps exhausted at off-diagonal norm {:.3e}",
            off_diagonal_norm(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("real eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating the `(p, q)` entry of `a`,
/// accumulated into the eigenvector matrix `v`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs <= f64::MIN_POSITIVE {
        a[(p, q)] = C64::ZERO;
        a[(q, p)] = C64::ZERO;
        return;
    }
    let phase = apq / abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * abs);
    // Smaller root of t² + 2θt − 1 = 0: the rotation angle stays ≤ π/4.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.nrows();

    // Columns: A ← A·U with U = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] on (p, q).
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase.conj() * s;
        a[(k, q)] = akp * phase * s + akq * c;
    }
    // Rows: A ← U†·A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * phase.conj() * s + aqk * c;
    }
    a[(p, q)] = C64::ZERO;
    a[(q, p)] = C64::ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // Eigenvectors accumulate the same column rotation.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase.conj() * s;
        v[(k, q)] = vkp * phase * s + vkq * c;
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix (Schatten-1 norm).
pub fn trace_norm_hermitian(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.values.iter().map(|v| v.abs()).sum())
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn operator_norm_hermitian(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Largest singular value of a general matrix, via the Hermitian
/// eigendecomposition of `m†m`.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = m.adjoint() * m;
    let top = hermitian_eigen(&gram)?.values[0].max(0.0);
    Ok(top.sqrt())
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues below `-tol` are rejected; small negative roundoff is clamped
/// to zero.
pub fn sqrt_hermitian_psd(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(m)?;
    map_hermitian_spectrum(&eig, tol, |v| Ok(v.sqrt()))
}

/// Hermitian inverse square root of a positive definite matrix.
///
/// # Errors
///
/// Fails with [`Error::InvalidInput`] when an eigenvalue is at or below
/// `tol` (the gauge transform would be singular).
pub fn inv_sqrt_hermitian_pd(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(m)?;
    map_hermitian_spectrum(&eig, -tol, |v| {
        if v <= tol {
            Err(Error::InvalidInput(format!(
                "matrix is not positive definite (eigenvalue {v:.3e})"
            )))
        } else {
            Ok(1.0 / v.sqrt())
        }
    })
}

fn map_hermitian_spectrum(
    eig: &HermitianEigen,
    floor: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<CMatrix> {
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (k, &v) in eig.values.iter().enumerate() {
        if v < floor {
            return Err(Error::InvalidInput(format!(
                "matrix is not positive semidefinite (eigenvalue {v:.3e})"
            )));
        }
        let fv = f(v.max(0.0))?;
        for r in 0..n {
            scaled[(r, k)] *= fv;
        }
    }
    Ok(&scaled * eig.vectors.adjoint())
}

/// Eigenvalues of a 2×2 complex matrix, closed form.
///
/// The discriminant is computed as `(a − d)² + 4bc` rather than
/// `tr² − 4·det`: the latter cancels catastrophically for near-double
/// roots and would split a degenerate eigenvalue by `√ε`.
fn eigenvalues_2x2(m: &CMatrix) -> [C64; 2] {
    let tr = m[(0, 0)] + m[(1, 1)];
    let gap = m[(0, 0)] - m[(1, 1)];
    let disc = (gap * gap + (m[(0, 1)] * m[(1, 0)]).scale(4.0)).sqrt();
    [(tr + disc).scale(0.5), (tr - disc).scale(0.5)]
}

/// Deterministic ordering for reported spectra: descending modulus, ties
/// broken by descending real then descending imaginary part.
pub fn sort_spectrum(values: &mut [C64]) {
    values.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .expect("finite eigenvalue moduli")
            .then(b.re.partial_cmp(&a.re).expect("finite eigenvalues"))
            .then(b.im.partial_cmp(&a.im).expect("finite eigenvalues"))
    });
}

/// Full spectrum of a general complex matrix.
///
/// One eigenpair at a time is found by shift-inverted power iteration; the
/// shifts walk a deterministic spiral inside the Frobenius-norm disk and the
/// start vectors come from seeded streams, so the result is reproducible.
/// Each accepted eigenvalue satisfies `‖Av − λv‖ ≤ 1e-12·max(1, ‖A‖_F)` in
/// the matrix it was extracted from; converged pairs are deflated by a
/// Householder similarity and the remaining block is recursed until a 2×2
/// base case is reached.
///
/// Complex shifts are essential: spectra of the transfer matrices this crate
/// feeds in come in conjugate pairs with exactly tied moduli, which plain
/// power iteration cannot separate.
///
/// # Errors
///
/// Fails on non-square input, dimensions above 128, or iteration-budget
/// exhaustion ([`SPECTRUM_MAX_ITERS`] applications per deflation level).
pub fn complex_spectrum(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() > JACOBI_MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "spectrum solver supports dimensions up to {JACOBI_MAX_DIM}, got {}",
            m.nrows()
        )));
    }
    let scale = m.norm().max(1.0);
    let mut values = Vec::with_capacity(m.nrows());
    let mut work = m.clone();
    while work.nrows() > 2 {
        let (lambda, vector) = dominant_by_shift_invert(&work, scale)?;
        values.push(lambda);
        work = deflate(&work, &vector);
    }
    match work.nrows() {
        2 => values.extend(eigenvalues_2x2(&work)),
        1 => values.push(work[(0, 0)]),
        _ => {}
    }
    sort_spectrum(&mut values);
    Ok(values)
}

/// Golden-ratio fractional part used to space restart shift angles.
const SHIFT_ANGLE_STEP: f64 = 0.618_033_988_749_894_9;
/// Shift radii as fractions of the Frobenius norm, cycled across restarts.
const SHIFT_RADII: [f64; 6] = [0.9, 0.5, 1.2, 0.25, 0.05, 1.6];

/// Finds one eigenpair of `a` by shift-inverted power iteration with
/// deterministic restarts.
fn dominant_by_shift_invert(a: &CMatrix, scale: f64) -> Result<(C64, CVector)> {
    let n = a.nrows();
    let fro = a.norm();
    if fro <= f64::MIN_POSITIVE {
        let mut e0 = CVector::from_element(n, C64::ZERO);
        e0[0] = C64::ONE;
        return Ok((C64::ZERO, e0));
    }
    let mut spent = 0usize;
    for restart in 0..64u64 {
        let radius = SHIFT_RADII[(restart as usize) % SHIFT_RADII.len()] * fro;
        let angle = std::f64::consts::TAU * ((restart as f64 + 1.0) * SHIFT_ANGLE_STEP).fract();
        let mut mu = C64::from_polar(radius, angle);
        let mut rng = ChaCha8Rng::seed_from_u64(restart);
        let mut v = random_unit_vector(n, &mut rng);
        let mut lu = match shifted_lu(a, mu, fro) {
            Some(lu) => lu,
            None => continue,
        };
        let budget = 200.min(SPECTRUM_MAX_ITERS - spent);
        for iter in 0..budget {
            spent += 1;
            let w = match lu.solve(&v) {
                Some(w) => w,
                None => break,
            };
            let norm = w.norm();
            if !norm.is_finite() || norm <= f64::MIN_POSITIVE {
                break;
            }
            v = w.unscale(norm);
            let lambda = rayleigh_quotient(a, &v);
            let residual = (a * &v - v.scale_complex(lambda)).norm();
            if residual <= SPECTRUM_TOL * scale {
                return Ok((lambda, v));
            }
            // Rayleigh-quotient restarts give cubic convergence near a pair.
            if iter % 8 == 7 {
                mu = lambda;
                match shifted_lu(a, mu, fro) {
                    Some(refreshed) => lu = refreshed,
                    None => break,
                }
            }
        }
        if spent >= SPECTRUM_MAX_ITERS {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "shift-inverted power iteration exhausted its budget on a {n}x{n} block"
    )))
}

/// LU factorization of `a − μI`, nudging `μ` off an exact eigenvalue if the
/// factorization is singular.
fn shifted_lu(
    a: &CMatrix,
    mu: C64,
    fro: f64,
) -> Option<nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    for attempt in 0..4 {
        let nudge = C64::new(1.0, 1.0).scale(fro * 1e-9 * attempt as f64);
        let shifted = a - CMatrix::identity(a.nrows(), a.ncols()).scale_complex(mu + nudge);
        let lu = shifted.lu();
        if lu.is_invertible() {
            return Some(lu);
        }
    }
    None
}

fn rayleigh_quotient(a: &CMatrix, v: &CVector) -> C64 {
    let av = a * v;
    let mut acc = C64::ZERO;
    for i in 0..v.len() {
        acc += v[i].conj() * av[i];
    }
    acc
}

/// Householder similarity that moves the converged eigenvector onto the first
/// axis, then drops the first row and column.
fn deflate(a: &CMatrix, v: &CVector) -> CMatrix {
    let n = a.nrows();
    let phase = if v[0].norm() <= f64::MIN_POSITIVE {
        C64::ONE
    } else {
        v[0] / v[0].norm()
    };
    let mut u = v.clone();
    u[0] += phase;
    let norm_sqr = u.norm_squared();
    // H = I − 2uu†/‖u‖² is Hermitian and unitary with H·v = −phase·e₀.
    let mut h = CMatrix::identity(n, n);
    for r in 0..n {
        for c in 0..n {
            h[(r, c)] -= u[r] * u[c].conj() * C64::from(2.0 / norm_sqr);
        }
    }
    let b = &h * a * &h;
    b.view((1, 1), (n - 1, n - 1)).into_owned()
}

/// Eigenvalue-1 eigenvector of `e`, by power iteration accelerated with six
/// matrix squarings (each application of `e^64` contracts every other mode by
/// its modulus to the 64th power).
///
/// The caller is responsible for rescaling `e` so the target eigenvalue is 1;
/// residuals are measured against `e` itself.
///
/// # Errors
///
/// Fails when the start vector has (numerically) no overlap with the fixed
/// space or when the iteration cap is reached.
pub fn unit_fixed_point(e: &CMatrix, start: &CVector) -> Result<CVector> {
    if e.nrows() != e.ncols() || e.nrows() != start.len() {
        return Err(Error::DimensionMismatch(
            "fixed-point solver needs a square matrix matching the start vector".into(),
        ));
    }
    let mut accel = e.clone();
    for _ in 0..6 {
        accel = &accel * &accel;
    }
    let norm = start.norm();
    if norm <= f64::MIN_POSITIVE {
        return Err(Error::InvalidInput("zero start vector".into()));
    }
    let mut z = start.unscale(norm);
    let scale = e.norm().max(1.0);
    for _ in 0..(SPECTRUM_MAX_ITERS / 64).max(8) {
        let w = &accel * &z;
        let norm = w.norm();
        if !norm.is_finite() || norm <= 1e-300 {
            return Err(Error::NoConvergence(
                "start vector lost all overlap with the fixed space".into(),
            ));
        }
        z = w.unscale(norm);
        let residual = (e * &z - &z).norm();
        if residual <= SPECTRUM_TOL * scale {
            // Fix the overall phase deterministically: largest entry real positive.
            let k = (0..z.len())
                .max_by(|&i, &j| z[i].norm().partial_cmp(&z[j].norm()).expect("finite"))
                .unwrap_or(0);
            let phase = if z[k].norm() > 0.0 {
                z[k] / z[k].norm()
            } else {
                C64::ONE
            };
            return Ok(z.map(|c| c * phase.conj()));
        }
    }
    Err(Error::NoConvergence(
        "fixed-point power iteration exhausted its budget".into(),
    ))
}

/// Root of `f` in `[lo, hi]` by bisection.
///
/// Requires a sign change over the bracket; stops when `|f(mid)| ≤ tol` or
/// after `max_iter` halvings (the interval is then below any representable
/// tolerance for the inputs used here).
pub fn bisect_root(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!(
            "no sign change over [{lo}, {hi}] (f: {flo:.3e} .. {fhi:.3e})"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Position and value of the maximum of a unimodal `f` on `[a, b]` by
/// golden-section search.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm >= f1 && fm >= f2 {
        (mid, fm)
    } else if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Seeded deterministic RNG used for every stochastic search in the crate.
#[must_use]
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian sample (real and imaginary parts `N(0, 1)`),
/// via Box–Muller.
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    C64::new(r * c, r * s)
}

/// Unit-norm vector of complex Gaussian entries.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Extension helpers for complex scalar multiplication, which `nalgebra`
/// exposes only through the `ClosedMul` machinery.
pub trait ScaleComplexExt {
    /// Multiplies every entry by the complex scalar `factor`.
    #[must_use]
    fn scale_complex(&self, factor: C64) -> Self;
}

impl ScaleComplexExt for CMatrix {
    fn scale_complex(&self, factor: C64) -> Self {
        self.map(|c| c * factor)
    }
}

impl ScaleComplexExt for CVector {
    fn scale_complex(&self, factor: C64) -> Self {
        self.map(|c| c * factor)
    }
}
