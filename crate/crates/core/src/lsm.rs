//! Momentum, charge, and the large-gauge-transform obstruction for
//! translation-invariant rings.
//!
//! A translation-invariant state on a periodic chain carries a momentum
//! `p`, read off from `T|ψ⟩ = e^{ip}|ψ⟩` for the cyclic shift `T`. When the
//! state is also an eigenstate of a total charge `Q̂ = Σ_x q̂_x` built from a
//! per-site operator with integer eigenvalues, the large gauge transform
//!
//! ```text
//! U = exp((2πi/L) Σ_x x·q̂_x)
//! ```
//!
//! twists the state by one flux quantum. The commutation `T U = e^{-iα} U T`
//! with `α = 2πQ/L` then forces `U|ψ⟩` into the momentum sector `p − α`:
//! whenever `α ≢ 0 (mod 2π)`, the twisted state is exactly orthogonal to the
//! original, yet on any small region the two are nearly indistinguishable,
//! with trace distance `O(|S|/L)`. [`lsm_report`] verifies all three facts
//! numerically and, when a circuit depth and accuracy are supplied,
//! evaluates the two hypothesis branches under which that tension lower
//! bounds the depth of any preparation circuit.

use std::f64::consts::{E, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circuit::{reduced_density_matrix, trace_norm, Region, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, require_hermitian, CMatrix, CVector, C64};

/// Residual accepted when reading off a momentum eigenvalue.
pub const MOMENTUM_TOL: f64 = 1e-8;

/// Residual accepted when checking a charge-sector eigenstate.
pub const CHARGE_TOL: f64 = 1e-8;

/// Overlap above which orthogonality of the twisted state is violated.
pub const OVERLAP_TOL: f64 = 1e-10;

/// A per-site Hermitian charge with integer eigenvalues, replicated over a
/// ring of `sites` sites.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ChargeAssignmentData", into = "ChargeAssignmentData")]
pub struct ChargeAssignment {
    charge: CMatrix,
    sites: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

/// Serialized form: row-major `[re, im]` entries of the per-site charge.
#[derive(Serialize, Deserialize)]
struct ChargeAssignmentData {
    sites: usize,
    charge: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<ChargeAssignmentData> for ChargeAssignment {
    type Error = Error;

    fn try_from(data: ChargeAssignmentData) -> Result<Self> {
        let dim = data.charge.len();
        if data.charge.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch(
                "per-site charge must be square".into(),
            ));
        }
        let charge = CMatrix::from_fn(dim, dim, |r, c| {
            let [re, im] = data.charge[r][c];
            C64::new(re, im)
        });
        Self::new(charge, data.sites)
    }
}

impl From<ChargeAssignment> for ChargeAssignmentData {
    fn from(assignment: ChargeAssignment) -> Self {
        let dim = assignment.charge.nrows();
        let charge = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        let v = assignment.charge[(r, c)];
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            sites: assignment.sites,
            charge,
        }
    }
}

impl ChargeAssignment {
    /// Validates Hermiticity and integer eigenvalues (both within `1e-8`)
    /// and caches the eigendecomposition for later phase exponentials.
    pub fn new(charge: CMatrix, sites: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidInput(
                "a charge assignment needs at least two sites".into(),
            ));
        }
        if charge.nrows() < 2 || charge.nrows() != charge.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "per-site charge must be square of dimension at least two, got {}x{}",
                charge.nrows(),
                charge.ncols()
            )));
        }
        require_hermitian(&charge)?;
        let eig = hermitian_eigen(&charge)?;
        for &v in &eig.values {
            if (v - v.round()).abs() > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "charge eigenvalue {v} is not an integer within 1e-8"
                )));
            }
        }
        Ok(Self {
            charge,
            sites,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
        })
    }

    /// The occupation-number charge `(1 − Z)/2 = diag(0, 1)` on each site.
    pub fn uniform_excitation(sites: usize) -> Result<Self> {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        Self::new(
            CMatrix::from_row_slice(2, 2, &[zero, zero, zero, one]),
            sites,
        )
    }

    /// The per-site charge matrix.
    pub fn charge(&self) -> &CMatrix {
        &self.charge
    }

    /// Ring length the assignment applies to.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Operator norm of the per-site charge, the largest `|eigenvalue|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// The diagonal unitary `exp(iθ·q̂)` on one site.
    fn phase_exponential(&self, theta: f64) -> CMatrix {
        let dim = self.charge.nrows();
        let mut scaled = self.eigenvectors.clone();
        for (k, &v) in self.eigenvalues.iter().enumerate() {
            let phase = C64::new(0.0, theta * v).exp();
            for r in 0..dim {
                scaled[(r, k)] *= phase;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

/// Best-fit momentum of a translation-invariant periodic state: the phase
/// `p ∈ [0, 2π)` with `T|ψ⟩ = e^{ip}|ψ⟩` for the cyclic shift of qubit
/// sites.
///
/// # Errors
///
/// Fails with [`Error::Inapplicable`] when no phase satisfies
/// `‖T|ψ⟩ − e^{ip}|ψ⟩‖ ≤ 1e-8`.
pub fn momentum_phase(state: &StateVector, sites: usize) -> Result<f64> {
    if state.qubit_count() != sites {
        return Err(Error::DimensionMismatch(format!(
            "state on {} qubits with a {sites}-site ring",
            state.qubit_count()
        )));
    }
    let amps: Vec<C64> = state.amplitudes().iter().copied().collect();
    momentum_of_amplitudes(&amps, 2, sites)
}

/// Momentum of a general amplitude vector over `sites` sites of dimension
/// `site_dim`, with site 0 in the most significant digit.
pub fn momentum_of_amplitudes(amps: &[C64], site_dim: usize, sites: usize) -> Result<f64> {
    let total = (site_dim as u128).pow(sites as u32);
    if site_dim < 2 || amps.len() as u128 != total {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for {sites} sites of dimension {site_dim}",
            amps.len()
        )));
    }
    let total = total as usize;
    let top = total / site_dim;
    // The cyclic shift sends site s to s + 1; on base-`site_dim` indices
    // with site 0 most significant this is a rotate-right by one digit.
    let shifted_index = |idx: usize| idx / site_dim + (idx % site_dim) * top;
    let mut overlap = C64::new(0.0, 0.0);
    for (idx, amp) in amps.iter().enumerate() {
        overlap += amps[shifted_index(idx)].conj() * amp;
    }
    if overlap.norm() < 1e-12 {
        return Err(Error::Inapplicable(
            "state is not a translation eigenstate: ⟨ψ|Tψ⟩ vanishes".into(),
        ));
    }
    let momentum = overlap.arg().rem_euclid(TAU);
    let phase = C64::new(0.0, momentum).exp();
    let mut residual_sq = 0.0;
    for (idx, amp) in amps.iter().enumerate() {
        residual_sq += (amp - phase * amps[shifted_index(idx)]).norm_sqr();
    }
    let residual = residual_sq.sqrt();
    if residual > MOMENTUM_TOL {
        return Err(Error::Inapplicable(format!(
            "state is not translation invariant: best-fit residual {residual:.3e}"
        )));
    }
    Ok(if TAU - momentum < 1e-12 {
        0.0
    } else {
        momentum
    })
}

/// Applies the large gauge transform `U = exp((2πi/L) Σ_x x·q̂_x)` to a
/// periodic qubit register, sites numbered from zero.
pub fn large_gauge_transform(
    state: &StateVector,
    charges: &ChargeAssignment,
) -> Result<StateVector> {
    let sites = check_register(state, charges)?;
    let mut amps: Vec<C64> = state.amplitudes().iter().copied().collect();
    for site in 0..sites {
        let u = charges.phase_exponential(TAU * site as f64 / sites as f64);
        apply_single_site(&mut amps, &u, site, sites);
    }
    StateVector::from_amplitudes(amps)
}

/// `Q̂|ψ⟩` for the total charge `Q̂ = Σ_x q̂_x` (not unitary, generally
/// unnormalized).
fn total_charge_apply(state: &StateVector, charges: &ChargeAssignment) -> Result<CVector> {
    let sites = check_register(state, charges)?;
    let amps: Vec<C64> = state.amplitudes().iter().copied().collect();
    let mut acc = vec![C64::new(0.0, 0.0); amps.len()];
    for site in 0..sites {
        let mut term = amps.clone();
        apply_single_site(&mut term, charges.charge(), site, sites);
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
    }
    Ok(CVector::from_vec(acc))
}

fn check_register(state: &StateVector, charges: &ChargeAssignment) -> Result<usize> {
    if charges.charge().nrows() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "qubit registers need a 2x2 per-site charge, got {}x{}",
            charges.charge().nrows(),
            charges.charge().ncols()
        )));
    }
    if charges.sites() != state.qubit_count() {
        return Err(Error::DimensionMismatch(format!(
            "charge assignment on {} sites for a {}-qubit state",
            charges.sites(),
            state.qubit_count()
        )));
    }
    Ok(charges.sites())
}

/// Applies a single-site matrix in place; site 0 is the most significant
/// bit of the amplitude index.
fn apply_single_site(amps: &mut [C64], m: &CMatrix, site: usize, sites: usize) {
    let stride = 1usize << (sites - 1 - site);
    let mut idx = 0;
    while idx < amps.len() {
        if idx & stride == 0 {
            let lo = amps[idx];
            let hi = amps[idx | stride];
            amps[idx] = m[(0, 0)] * lo + m[(0, 1)] * hi;
            amps[idx | stride] = m[(1, 0)] * lo + m[(1, 1)] * hi;
        }
        idx += 1;
    }
}

/// Trace distance between the marginals of the original and twisted state
/// on one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDistance {
    /// Number of contiguous sites in the region.
    pub size: usize,
    /// `‖tr_S̄(|ψ⟩⟨ψ| − U|ψ⟩⟨ψ|U†)‖₁`.
    pub trace_distance: f64,
}

/// Numeric evaluation of the two hypothesis branches of the depth bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmConditions {
    /// Circuit depth hypothesis `t`.
    pub depth: usize,
    /// Preparation accuracy hypothesis `δ`.
    pub delta: f64,
    /// Operator norm of the per-site charge.
    pub charge_norm: f64,
    /// First branch, left side: `δ`.
    pub condition1_lhs: f64,
    /// First branch, right side: `(1 − eδ − e(9πt²‖q̂‖/(2L))²)^(L/t)`,
    /// clamped at zero when the base is negative.
    pub condition1_rhs: f64,
    /// Whether `δ > condition1_rhs`.
    pub condition1_holds: bool,
    /// Second branch, left side: `t`.
    pub condition2_lhs: f64,
    /// Second branch, right side: `√(L·(2/(9π‖q̂‖))·(1/(7e) − δ))`, zero
    /// when the radicand is negative.
    pub condition2_rhs: f64,
    /// Whether `t ≥ condition2_rhs`.
    pub condition2_holds: bool,
    /// Whether at least one branch holds.
    pub either_holds: bool,
}

/// Full report of the translation-plus-charge obstruction on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmReport {
    /// Ring length.
    pub sites: usize,
    /// Momentum `p ∈ [0, 2π)` of the input state.
    pub momentum: f64,
    /// Total charge `⟨Q̂⟩` of the input state.
    pub total_charge: f64,
    /// Twist angle `α = 2πQ/L ∈ [0, 2π)`.
    pub charge_phase: f64,
    /// Whether the obstruction applies, i.e. `α ≢ 0 (mod 2π)`.
    pub applicable: bool,
    /// `|⟨ψ|U|ψ⟩|`; exactly zero whenever the obstruction applies.
    pub overlap: f64,
    /// Momentum of the twisted state `U|ψ⟩`.
    pub transformed_momentum: f64,
    /// Whether the twisted momentum equals `p − α (mod 2π)` within `1e-8`.
    pub momentum_shift_verified: bool,
    /// Trace distances between marginals of `|ψ⟩` and `U|ψ⟩` on contiguous
    /// regions of size `1..=L/2`.
    pub indistinguishability: Vec<RegionDistance>,
    /// Depth-bound branch evaluation, present when `t` and `δ` were given.
    pub conditions: Option<LsmConditions>,
}

/// Verifies the translation-plus-charge obstruction on a periodic state and
/// reports every quantity involved.
///
/// The state must be a translation eigenstate and a charge eigenstate, both
/// within `1e-8`. With a commensurate charge (`α = 0`) the obstruction does
/// not apply and the report simply says so; the twisted state need not be
/// orthogonal then. When `depth` and `delta` are supplied (only together),
/// the two hypothesis branches of the depth bound are evaluated verbatim.
///
/// # Errors
///
/// * [`Error::Inapplicable`] when the state fails the translation or
///   charge-sector test.
/// * [`Error::InvalidInput`] for inconsistent hypothesis arguments.
/// * [`Error::InvariantViolation`] when an exact consequence of the
///   commutation relation fails numerically, which would falsify the
///   derivation.
pub fn lsm_report(
    state: &StateVector,
    charges: &ChargeAssignment,
    depth: Option<usize>,
    delta: Option<f64>,
) -> Result<LsmReport> {
    let sites = check_register(state, charges)?;
    let momentum = momentum_phase(state, sites)?;

    let charged = total_charge_apply(state, charges)?;
    let amps = state.amplitudes();
    let total_charge = amps.dotc(&charged).re;
    let residual = (&charged - amps.map(|x| x * total_charge)).norm();
    if residual > CHARGE_TOL {
        return Err(Error::Inapplicable(format!(
            "state is not a charge eigenstate: residual {residual:.3e}"
        )));
    }

    let mut charge_phase = (TAU * total_charge / sites as f64).rem_euclid(TAU);
    if TAU - charge_phase < 1e-9 || charge_phase < 1e-9 {
        charge_phase = 0.0;
    }
    let applicable = 2.0 * (charge_phase / 2.0).sin().abs() > 1e-8;

    let twisted = large_gauge_transform(state, charges)?;
    let overlap = state.inner(&twisted)?.norm();
    if applicable && overlap > OVERLAP_TOL {
        return Err(Error::InvariantViolation(format!(
            "twisted state fails exact orthogonality: overlap {overlap:.3e}"
        )));
    }

    let transformed_momentum = momentum_phase(&twisted, sites)?;
    let expected = (momentum - charge_phase).rem_euclid(TAU);
    let gap = (transformed_momentum - expected).abs();
    let momentum_shift_verified = gap.min(TAU - gap) <= MOMENTUM_TOL;
    if !momentum_shift_verified {
        return Err(Error::InvariantViolation(format!(
            "twisted momentum {transformed_momentum:.9} differs from p − α = {expected:.9}"
        )));
    }

    let mut indistinguishability = Vec::with_capacity(sites / 2);
    for size in 1..=sites / 2 {
        let region = Region::new((0..size).collect());
        let difference =
            reduced_density_matrix(state, &region)? - reduced_density_matrix(&twisted, &region)?;
        let trace_distance = trace_norm(&difference)?;
        if !(0.0..=2.0 + 1e-9).contains(&trace_distance) {
            return Err(Error::InvariantViolation(format!(
                "trace distance {trace_distance} outside [0, 2]"
            )));
        }
        indistinguishability.push(RegionDistance {
            size,
            trace_distance,
        });
    }

    let conditions = match (depth, delta) {
        (None, None) => None,
        (Some(t), Some(d)) => Some(evaluate_conditions(t, d, charges.norm(), sites)?),
        _ => {
            return Err(Error::InvalidInput(
                "depth and accuracy must be supplied together".into(),
            ));
        }
    };

    Ok(LsmReport {
        sites,
        momentum,
        total_charge,
        charge_phase,
        applicable,
        overlap,
        transformed_momentum,
        momentum_shift_verified,
        indistinguishability,
        conditions,
    })
}

fn evaluate_conditions(
    depth: usize,
    delta: f64,
    charge_norm: f64,
    sites: usize,
) -> Result<LsmConditions> {
    if depth == 0 {
        return Err(Error::InvalidInput(
            "the hypothesis branches need a depth of at least one".into(),
        ));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "accuracy must be finite and nonnegative, got {delta}"
        )));
    }
    if charge_norm <= 0.0 {
        return Err(Error::InvalidInput(
            "the hypothesis branches need a nonzero charge".into(),
        ));
    }
    let l = sites as f64;
    let t = depth as f64;
    let kick = (9.0 * PI * t * t * charge_norm / (2.0 * l)).powi(2);
    let base = 1.0 - E * delta - E * kick;
    let condition1_rhs = if base <= 0.0 { 0.0 } else { base.powf(l / t) };
    let condition1_holds = delta > condition1_rhs;
    let radicand = l * (2.0 / (9.0 * PI * charge_norm)) * (1.0 / (7.0 * E) - delta);
    let condition2_rhs = radicand.max(0.0).sqrt();
    let condition2_holds = t >= condition2_rhs;
    Ok(LsmConditions {
        depth,
        delta,
        charge_norm,
        condition1_lhs: delta,
        condition1_rhs,
        condition1_holds,
        condition2_lhs: t,
        condition2_rhs,
        condition2_holds,
        either_holds: condition1_holds || condition2_holds,
    })
}
